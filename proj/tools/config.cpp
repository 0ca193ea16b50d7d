#include "config.hpp"

#include "lvwigner/dynamics.hpp"
#include "lvwigner/error.hpp"
#include "lvwigner/gaussian.hpp"
#include "lvwigner/thermo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lvw::cli {

namespace {

const std::vector<std::string> kGlobalKeys = {"grid", "output-dir", "seed", "reproducible"};
const char* kDefaultGrid = "-6:6:-6:6:241:241";

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, const std::string& key)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d))
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw UsageError(key, "invalid real value '" + v + "' for key '" + key + "'");
    }
}

long to_integer(const std::string& v, const std::string& key)
{
    try {
        std::size_t used = 0;
        const long n = std::stol(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw UsageError(key, "invalid integer value '" + v + "' for key '" + key + "'");
    }
}

bool to_flag(const std::string& v, const std::string& key)
{
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw UsageError(key, "invalid boolean value '" + v + "' for key '" + key + "'");
}

std::string value_to_string(const ParamValue& v)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>)
                return format_number(x);
            else if constexpr (std::is_same_v<T, long>)
                return std::to_string(x);
            else if constexpr (std::is_same_v<T, bool>)
                return x ? "true" : "false";
            else
                return x;
        },
        v);
}

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text)
{
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(line, "config line " + std::to_string(lineno) + " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw UsageError("", "config line " + std::to_string(lineno) + " has an empty key");
        if (!kv.emplace(key, value).second)
            throw UsageError(key, "duplicate config key '" + key + "'");
    }
    return kv;
}

void validate(const RunConfig& c)
{
    c.grid.validate();
    switch (c.subcommand) {
    case Subcommand::classical: {
        lv_hamiltonian(c.real("a"));
        for (double e : parse_list(c.text("energies"), "energies"))
            (void)e;
        if (c.integer("t-samples") < 3)
            throw DomainError("t-samples>=3", "classical: need at least 3 T samples");
        if (c.real("tau-end") < 0.0 || !(c.real("dt") > 0.0))
            throw DomainError("dt>0,tau-end>=0", "classical: invalid integration horizon");
        break;
    }
    case Subcommand::thermo: {
        const auto as = parse_list(c.text("a"), "a");
        if (c.flag("field")) {
            for (double a : as)
                ThermoParams{c.real("beta"), a}.validate();
            break;
        }
        // Rows past the guard carry nan in the corrected columns; a scan with
        // no admissible beta at all is rejected.
        const auto betas = parse_range(c.text("beta-range"), "beta-range");
        for (double a : as) {
            for (double b : betas)
                ThermoParams{b, a}.validate();
            ThermoParams{betas.front(), a}.require_corrected();
        }
        break;
    }
    case Subcommand::gaussian: {
        const GaussianParams G{c.real("alpha"), 0.0};
        G.validate();
        if (G.alpha > 4.0)
            throw AccuracyLoss("gaussian: alpha above 4 leaves the erf accuracy strip");
        lv_hamiltonian(c.real("a"));
        break;
    }
    case Subcommand::camouflage:
        tuned_camouflage(c.real("nu1"), c.real("nu2"), c.real("zeta"));
        break;
    case Subcommand::evolve: {
        const DynamicsParams D{parse_order(c.text("order")), c.real("a"), c.real("alpha")};
        D.validate();
        if (!(c.real("y0") > 0.0) || !(c.real("z0") > 0.0))
            throw DomainError("y>0,z>0", "evolve: initial populations must be positive");
        if (!(c.real("tau-end") > 0.0) || !(c.real("dt") > 0.0))
            throw DomainError("dtau>0,tau_end>0", "evolve: step and horizon must be positive");
        if (D.order == VelocityOrder::exact && c.real("dt") > 1e-3)
            throw DomainError("dtau<=1e-3", "evolve: the exact order needs dt <= 1e-3");
        break;
    }
    case Subcommand::specfun_selftest:
        if (c.integer("samples") < 1)
            throw DomainError("samples>=1", "specfun-selftest: samples must be positive");
        break;
    }
}

RunConfig build(Subcommand sc, const KeyValues& kv)
{
    RunConfig c;
    c.subcommand = sc;
    const auto& specs = schema(sc);
    for (const auto& [key, value] : kv) {
        const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& p) { return p.name == key; })
                           || std::find(kGlobalKeys.begin(), kGlobalKeys.end(), key) != kGlobalKeys.end();
        if (!known)
            throw UsageError(key, "unknown key '" + key + "' for subcommand " + to_string(sc));
    }
    for (const auto& p : specs) {
        const auto it = kv.find(p.name);
        const std::string v = it != kv.end() ? it->second : p.default_value;
        switch (p.kind) {
        case ParamKind::real: c.parameters[p.name] = to_real(v, p.name); break;
        case ParamKind::integer: c.parameters[p.name] = to_integer(v, p.name); break;
        case ParamKind::flag: c.parameters[p.name] = to_flag(v, p.name); break;
        case ParamKind::text: c.parameters[p.name] = v; break;
        }
    }
    auto get = [&](const std::string& k) -> const std::string* {
        const auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    c.grid = parse_grid(get("grid") ? *get("grid") : kDefaultGrid);
    if (const auto* v = get("output-dir"))
        c.output_dir = *v;
    else if (const char* env = std::getenv(kOutputDirEnv); env && *env)
        c.output_dir = env;
    if (const auto* v = get("seed")) {
        const long s = to_integer(*v, "seed");
        if (s < 0)
            throw UsageError("seed", "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (const auto* v = get("reproducible"))
        c.reproducible = to_flag(*v, "reproducible");
    validate(c);
    return c;
}

} // namespace

std::string to_string(Subcommand s)
{
    switch (s) {
    case Subcommand::classical: return "classical";
    case Subcommand::thermo: return "thermo";
    case Subcommand::gaussian: return "gaussian";
    case Subcommand::camouflage: return "camouflage";
    case Subcommand::evolve: return "evolve";
    case Subcommand::specfun_selftest: return "specfun-selftest";
    }
    return "classical";
}

Subcommand parse_subcommand(const std::string& s)
{
    for (auto sc : {Subcommand::classical, Subcommand::thermo, Subcommand::gaussian, Subcommand::camouflage,
                    Subcommand::evolve, Subcommand::specfun_selftest})
        if (to_string(sc) == s)
            return sc;
    throw UsageError("command", "unknown subcommand '" + s + "'");
}

namespace {

std::string describe(Subcommand s)
{
    switch (s) {
    case Subcommand::classical: return "level sets, parametric orbits and RK4 trajectories";
    case Subcommand::thermo: return "partition-function scan, or the corrected field with --field";
    case Subcommand::gaussian: return "erf-based gaussian currents, divergences and topology";
    case Subcommand::camouflage: return "stationarity check of the tuned camouflage potential";
    case Subcommand::evolve: return "population dynamics at a chosen order with a stability report";
    case Subcommand::specfun_selftest: return "identity checks of the special functions";
    }
    return "";
}

} // namespace

const std::vector<ParamSpec>& schema(Subcommand s)
{
    static const std::map<Subcommand, std::vector<ParamSpec>> table = {
        {Subcommand::classical,
         {{"a", ParamKind::real, "1", "anisotropy a > 0"},
          {"energies", ParamKind::text, "6,5,4,3,2.5,2.2,2.1,2.05", "comma-separated orbit energies"},
          {"t-samples", ParamKind::integer, "400", "T samples per parametric orbit (a = 1 only)"},
          {"x0", ParamKind::real, "0.5", "trajectory start x"},
          {"k0", ParamKind::real, "0.5", "trajectory start k"},
          {"tau-end", ParamKind::real, "0", "trajectory horizon; 0 skips the trajectory"},
          {"dt", ParamKind::real, "0.001", "RK4 step"}}},
        {Subcommand::thermo,
         {{"a", ParamKind::text, "1", "comma-separated anisotropies, one CSV per value"},
          {"beta-range", ParamKind::text, "0.1:2:20", "lo:hi:n inverse-temperature scan"},
          {"field", ParamKind::flag, "false", "emit the W/J/quantifier grid instead of the scan"},
          {"beta", ParamKind::real, "1", "inverse temperature for --field"}}},
        {Subcommand::gaussian,
         {{"alpha", ParamKind::real, "1", "gaussian inverse width, 0 < alpha <= 4"},
          {"a", ParamKind::real, "1", "anisotropy a > 0"}}},
        {Subcommand::camouflage,
         {{"nu1", ParamKind::real, "1", "cosh frequency of the potential"},
          {"nu2", ParamKind::real, "2", "cos frequency of the potential"},
          {"zeta", ParamKind::real, "0", "squeeze parameter"},
          {"detune", ParamKind::real, "1", "factor applied to lambda_k after tuning"}}},
        {Subcommand::evolve,
         {{"order", ParamKind::text, "classical", "classical|alpha2|alpha4|exact"},
          {"a", ParamKind::real, "1", "anisotropy a > 0"},
          {"alpha", ParamKind::real, "0.8", "gaussian inverse width"},
          {"y0", ParamKind::real, "0.5", "initial y"},
          {"z0", ParamKind::real, "0.5", "initial z"},
          {"tau-end", ParamKind::real, "50", "integration horizon"},
          {"dt", ParamKind::real, "0.001", "RK4 step (<= 1e-3 for exact)"}}},
        {Subcommand::specfun_selftest, {{"samples", ParamKind::integer, "1000", "random samples per property"}}},
    };
    return table.at(s);
}

double RunConfig::real(const std::string& key) const { return std::get<double>(parameters.at(key)); }
long RunConfig::integer(const std::string& key) const { return std::get<long>(parameters.at(key)); }
bool RunConfig::flag(const std::string& key) const { return std::get<bool>(parameters.at(key)); }
const std::string& RunConfig::text(const std::string& key) const { return std::get<std::string>(parameters.at(key)); }

bool operator==(const RunConfig& a, const RunConfig& b)
{
    return a.subcommand == b.subcommand && a.parameters == b.parameters && a.output_dir == b.output_dir
           && a.grid == b.grid && a.seed == b.seed && a.reproducible == b.reproducible;
}

RunConfig parse_config(int argc, const char* const* argv)
{
    CLI::App app{"Phase-space Wigner flow toolkit for the Lotka-Volterra system", "lvwigner"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    KeyValues given;
    std::string config_file, grid, output_dir, seed;
    bool reproducible = false;
    app.add_option("--config", config_file, "plain-text key = value configuration file");
    app.add_option("--grid", grid, "x_min:x_max:k_min:k_max:nx:nk")->default_str(kDefaultGrid);
    app.add_option("--output-dir", output_dir, std::string("output directory (default $") + kOutputDirEnv + " or .)");
    app.add_option("--seed", seed, "seed for randomized suites")->default_str("12345");
    app.add_flag("--reproducible", reproducible, "suppress the timestamp header line");

    std::map<Subcommand, CLI::App*> subs;
    std::map<std::string, std::pair<CLI::Option*, std::string>> storage;
    std::map<Subcommand, std::map<std::string, std::string>> sub_values;
    std::map<Subcommand, std::map<std::string, bool>> sub_flags;
    for (auto sc : {Subcommand::classical, Subcommand::thermo, Subcommand::gaussian, Subcommand::camouflage,
                    Subcommand::evolve, Subcommand::specfun_selftest}) {
        auto* sub = app.add_subcommand(to_string(sc), describe(sc));
        subs[sc] = sub;
        for (const auto& p : schema(sc)) {
            if (p.kind == ParamKind::flag)
                sub->add_flag("--" + p.name, sub_flags[sc][p.name], p.help);
            else
                sub->add_option("--" + p.name, sub_values[sc][p.name], p.help)->default_str(p.default_value);
        }
    }

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i)
        args.emplace_back(argv[i]);
    // CLI11 consumes the argument vector back to front.
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ExtrasError& e) {
        std::string key = e.what();
        for (const auto& a : args)
            if (a.rfind("--", 0) == 0) {
                const auto name = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
                bool known = false;
                for (auto& [sc, sub] : subs)
                    known = known || sub->get_option_no_throw("--" + name) != nullptr;
                known = known || app.get_option_no_throw("--" + name) != nullptr;
                if (!known) {
                    key = name;
                    break;
                }
            }
        throw UsageError(key, std::string("unexpected argument: ") + e.what());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.get_name(), e.what());
    }

    KeyValues kv;
    std::optional<Subcommand> chosen;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in)
            throw UsageError("config", "cannot read config file '" + config_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        kv = parse_key_values(ss.str());
        if (auto it = kv.find("command"); it != kv.end()) {
            chosen = parse_subcommand(it->second);
            kv.erase(it);
        }
    }
    for (auto& [sc, sub] : subs)
        if (sub->parsed()) {
            if (chosen && *chosen != sc)
                throw UsageError("command", "subcommand on the command line differs from the config file");
            chosen = sc;
            for (const auto& p : schema(sc)) {
                auto* opt = sub->get_option("--" + p.name);
                if (opt->count() == 0)
                    continue;
                kv[p.name] = p.kind == ParamKind::flag ? (sub_flags[sc][p.name] ? "true" : "false") : sub_values[sc][p.name];
            }
        }
    if (!chosen)
        throw UsageError("command", "no subcommand given (classical, thermo, gaussian, camouflage, evolve, specfun-selftest)");
    if (app.get_option("--grid")->count())
        kv["grid"] = grid;
    if (app.get_option("--output-dir")->count())
        kv["output-dir"] = output_dir;
    if (app.get_option("--seed")->count())
        kv["seed"] = seed;
    if (reproducible)
        kv["reproducible"] = "true";
    return build(*chosen, kv);
}

RunConfig parse_config_text(const std::string& text)
{
    KeyValues kv = parse_key_values(text);
    const auto it = kv.find("command");
    if (it == kv.end())
        throw UsageError("command", "config text lacks a 'command = <subcommand>' entry");
    const Subcommand sc = parse_subcommand(it->second);
    kv.erase(it);
    return build(sc, kv);
}

std::string render(const RunConfig& c)
{
    std::ostringstream out;
    out << "command = " << to_string(c.subcommand) << "\n";
    for (const auto& p : schema(c.subcommand))
        out << p.name << " = " << value_to_string(c.parameters.at(p.name)) << "\n";
    out << "grid = " << format_grid(c.grid) << "\n";
    out << "output-dir = " << c.output_dir.string() << "\n";
    out << "seed = " << c.seed << "\n";
    out << "reproducible = " << (c.reproducible ? "true" : "false") << "\n";
    return out.str();
}

PhaseGrid parse_grid(const std::string& s)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 6)
        throw UsageError("grid", "grid must be x_min:x_max:k_min:k_max:nx:nk");
    PhaseGrid g{to_real(trim(parts[0]), "grid"), to_real(trim(parts[1]), "grid"), to_real(trim(parts[2]), "grid"),
                to_real(trim(parts[3]), "grid"), static_cast<int>(to_integer(trim(parts[4]), "grid")),
                static_cast<int>(to_integer(trim(parts[5]), "grid"))};
    g.validate();
    return g;
}

std::string format_grid(const PhaseGrid& g)
{
    return format_number(g.x_min) + ":" + format_number(g.x_max) + ":" + format_number(g.k_min) + ":"
           + format_number(g.k_max) + ":" + std::to_string(g.nx) + ":" + std::to_string(g.nk);
}

std::vector<double> parse_list(const std::string& s, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_real(trim(item), key));
    if (out.empty())
        throw UsageError(key, "empty list for key '" + key + "'");
    return out;
}

std::vector<double> parse_range(const std::string& s, const std::string& key)
{
    std::stringstream ss(s);
    std::string a, b, n;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n) )
        throw UsageError(key, "range must be lo:hi:n");
    const double lo = to_real(trim(a), key), hi = to_real(trim(b), key);
    const long count = to_integer(trim(n), key);
    if (count < 1 || hi < lo)
        throw UsageError(key, "range needs hi >= lo and n >= 1");
    std::vector<double> out;
    for (long i = 0; i < count; ++i)
        out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            return buf;
    }
    return buf;
}

} // namespace lvw::cli
