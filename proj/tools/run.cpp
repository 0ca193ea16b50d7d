#include "run.hpp"

#include "lvwigner/classical.hpp"
#include "lvwigner/dynamics.hpp"
#include "lvwigner/error.hpp"
#include "lvwigner/gaussian.hpp"
#include "lvwigner/specfun.hpp"
#include "lvwigner/thermo.hpp"
#include "lvwigner/version.hpp"
#include "lvwigner/wignerflow.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace lvw::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Writes to a sibling temporary and renames it into place on commit.
void write_atomic(const fs::path& path, const std::string& content)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f)
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into '" + path.string() + "': " + ec.message());
    }
}

struct Column {
    std::string name;
    std::string provenance;
};

class CsvFile {
public:
    CsvFile(const RunConfig& c, std::vector<Column> columns) : columns_(std::move(columns))
    {
        buf_ << "# lvwigner " << kVersion << "\n";
        if (!c.reproducible)
            buf_ << "# generated " << timestamp() << "\n";
        std::istringstream cfg(render(c));
        std::string line;
        while (std::getline(cfg, line))
            buf_ << "# config " << line << "\n";
        for (const auto& col : columns_)
            buf_ << "# column " << col.name << ": " << col.provenance << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i)
            buf_ << (i ? "," : "") << columns_[i].name;
        buf_ << "\n";
    }

    void row(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            buf_ << (i ? "," : "") << num(values[i]);
        buf_ << "\n";
    }

    void commit(const fs::path& path) const { write_atomic(path, buf_.str()); }

private:
    std::vector<Column> columns_;
    std::ostringstream buf_;
};

ordered_json meta(const RunConfig& c, const std::vector<Column>& fields)
{
    ordered_json m;
    m["version"] = kVersion;
    if (!c.reproducible)
        m["generated"] = timestamp();
    ordered_json cfg;
    std::istringstream in(render(c));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    m["config"] = cfg;
    ordered_json prov;
    for (const auto& f : fields)
        prov[f.name] = f.provenance;
    m["provenance"] = prov;
    return m;
}

void commit_json(const fs::path& path, const ordered_json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string tag(double v) { return format_number(v); }

std::vector<double> linspace(double lo, double hi, long n)
{
    std::vector<double> out;
    for (long i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

ordered_json point_json(PhasePoint p) { return ordered_json{{"x", p.x}, {"k", p.k}}; }

// Stagnation points of a sampled flow, each typed from the exact sampler and
// given a winding number on a small loop around it.
ordered_json topology(const FlowField& F, const FlowSampler& exact, double w_floor)
{
    const auto rep = find_stagnation(F, 1e-9, exact, w_floor);
    ordered_json records = ordered_json::array();
    const double r = 0.25 * std::min(F.grid.dx(), F.grid.dk());
    for (const auto& s : rep.points) {
        const auto info = classify_critical_point(exact, s.p);
        ordered_json rec;
        rec["type"] = to_string(info.type);
        rec["x"] = s.p.x;
        rec["k"] = s.p.k;
        rec["residual"] = s.residual;
        rec["W"] = s.W;
        rec["sense"] = info.sense;
        try {
            const auto w = winding_number(exact, circle_loop(s.p, r));
            rec["winding"] = w.winding;
        } catch (const IllConditioned&) {
            rec["winding"] = nullptr;
        }
        records.push_back(rec);
    }
    ordered_json out;
    out["records"] = records;
    ordered_json nc = ordered_json::array();
    for (const auto& p : rep.non_converged)
        nc.push_back(point_json(p));
    out["non_converged"] = nc;
    out["masked_candidates"] = rep.masked_candidates;
    return out;
}

void run_classical(const RunConfig& c, std::ostream& out)
{
    const double a = c.real("a");
    const auto H = lv_hamiltonian(a);
    const std::vector<Column> cols_level = {
        {"polyline", "index of the connected contour piece"},
        {"x", "marching-squares level set of H on the grid"},
        {"k", "marching-squares level set of H on the grid"},
        {"y", "exp(-x)"},
        {"z", "exp(-k)"},
        {"H", "H evaluated at the contour vertex"}};
    for (double e : parse_list(c.text("energies"), "energies")) {
        CsvFile f(c, cols_level);
        const auto lines = level_set(H, e, c.grid);
        for (std::size_t n = 0; n < lines.size(); ++n)
            for (const auto& p : lines[n].points) {
                const Species s = species_map(p);
                f.row({static_cast<double>(n), p.x, p.k, s.y, s.z, H.evaluate(p)});
            }
        const auto path = c.output_dir / ("level_set_e" + tag(e) + ".csv");
        f.commit(path);
        out << "wrote " << path.string() << "\n";

        // The closed parametrisation exists for the symmetric case only.
        if (a != 1.0 || e < 2.0)
            continue;
        const auto [lo, hi] = orbit_T_interval(e);
        const auto orbit = parametric_orbit(e, linspace(lo, hi, c.integer("t-samples")));
        CsvFile g(c, {{"T", "parameter T = y + z"},
                      {"branch", "+1 for y = (T + sqrt(D))/2, -1 for the other root"},
                      {"x", "parametric orbit"},
                      {"k", "parametric orbit"},
                      {"y", "exp(-x)"},
                      {"z", "exp(-k)"},
                      {"H", "H evaluated on the parametric point"}});
        for (const auto& s : orbit.samples)
            for (int b : {1, -1}) {
                const PhasePoint p = b > 0 ? s.plus : s.minus;
                const Species sp = species_map(p);
                g.row({s.T, static_cast<double>(b), p.x, p.k, sp.y, sp.z, H.evaluate(p)});
            }
        const auto opath = c.output_dir / ("orbit_e" + tag(e) + ".csv");
        g.commit(opath);
        out << "wrote " << opath.string() << "\n";
    }

    if (c.real("tau-end") > 0.0) {
        const auto tr = integrate_classical(H, {c.real("x0"), c.real("k0")}, c.real("tau-end"), c.real("dt"));
        CsvFile f(c, {{"tau", "RK4 time"},
                      {"x", "RK4 with half-step error monitor"},
                      {"k", "RK4 with half-step error monitor"},
                      {"y", "exp(-x)"},
                      {"z", "exp(-k)"},
                      {"H", "H along the trajectory"}});
        for (std::size_t n = 0; n < tr.size(); ++n)
            f.row({tr.times[n], tr.points[n].x, tr.points[n].k, tr.species[n].y, tr.species[n].z, tr.energies[n]});
        const auto path = c.output_dir / "trajectory.csv";
        f.commit(path);
        out << "wrote " << path.string() << "\n";
    }
}

void write_field(const RunConfig& c, const FlowField& F, const ScalarField& divJ, const ScalarField& divW,
                 const std::vector<Column>& cols, const fs::path& path)
{
    CsvFile f(c, cols);
    const auto& g = F.grid;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nk; ++j) {
            const auto n = g.index(i, j);
            f.row({g.x(i), g.k(j), F.W[n], F.Jx[n], F.Jk[n], divJ.masked(n) ? NAN : divJ.values[n],
                   divW.masked(n) ? NAN : divW.values[n]});
        }
    f.commit(path);
}

void run_thermo(const RunConfig& c, std::ostream& out)
{
    const auto as = parse_list(c.text("a"), "a");
    if (c.flag("field")) {
        const double beta = c.real("beta");
        for (double a : as) {
            const ThermoParams P{beta, a};
            const FlowSampler s = td_sampler(P);
            const FlowField F = sample_flow(c.grid, s, "thermodynamic ensemble");
            const ScalarField divJ = fd_divergence(F);
            const ScalarField divW = sample_scalar(c.grid, [&](PhasePoint p) { return td_liouvillian(P, p); },
                                                   "closed-form Liouvillianity quantifier");
            const std::vector<Column> cols = {
                {"x", "grid"},
                {"k", "grid"},
                {"W", "unnormalised O(hbar^2) weight (1 + chi) exp(-beta H)"},
                {"Jx", "closed-form O(hbar^2) thermodynamic current"},
                {"Jk", "closed-form O(hbar^2) thermodynamic current"},
                {"divJ", "fourth-order finite differences of Jx, Jk; nan within two cells of the edge"},
                {"divW_quantifier", "closed-form divergence of w = J/W"}};
            const auto path = c.output_dir / ("thermo_field_a" + tag(a) + ".csv");
            write_field(c, F, divJ, divW, cols, path);
            out << "wrote " << path.string() << "\n";

            ordered_json j;
            j["meta"] = meta(c, {{"records", "stagnation points of the closed-form currents, Newton refined"}});
            const auto topo = topology(F, s, 0.0);
            for (auto it = topo.begin(); it != topo.end(); ++it)
                j[it.key()] = it.value();
            const auto jpath = c.output_dir / ("thermo_topology_a" + tag(a) + ".json");
            commit_json(jpath, j);
            out << "wrote " << jpath.string() << "\n";
        }
        return;
    }

    const auto betas = parse_range(c.text("beta-range"), "beta-range");
    for (double a : as) {
        CsvFile f(c, {{"beta", "inverse temperature"},
                      {"Z0", "gamma-function closed form"},
                      {"ZST", "closed form with the O(hbar^2) correction; nan where a*beta^2 >= 24"},
                      {"E0", "-d ln Z0/d beta via digamma"},
                      {"EST", "-d ln ZST/d beta; nan where a*beta^2 >= 24"},
                      {"C0", "beta^2 d^2 ln Z0/d beta^2 via trigamma"},
                      {"CST", "beta^2 d^2 ln ZST/d beta^2; nan where a*beta^2 >= 24"}});
        for (double b : betas) {
            const ThermoParams P{b, a};
            const bool ok = P.u() < 1.0;
            f.row({b, partition_classical(P), ok ? partition_corrected(P) : NAN,
                   internal_energy(P, Which::classical), ok ? internal_energy(P, Which::corrected) : NAN,
                   heat_capacity(P, Which::classical), ok ? heat_capacity(P, Which::corrected) : NAN});
        }
        const auto path = c.output_dir / ("thermo_a" + tag(a) + ".csv");
        f.commit(path);
        out << "wrote " << path.string() << "\n";
    }
}

void run_gaussian(const RunConfig& c, std::ostream& out)
{
    const GaussianParams G{c.real("alpha"), 0.0};
    const double a = c.real("a");
    const FlowSampler s = lv_gaussian_sampler(G, a);
    const FlowField F = sample_flow(c.grid, s, "gaussian erf closed form");
    const double floor = default_gaussian_floor(G);

    ScalarField divJ = sample_scalar(
        c.grid, [&](PhasePoint p) { const Vec2 d = lv_divergences(G, a, p); return d.x + d.k; },
        "closed-form divergence");
    ScalarField divW = divJ;
    divW.provenance = "divergence of w = J/W from closed forms";
    divW.mask.assign(divW.values.size(), 0);
    const auto& g = c.grid;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nk; ++j) {
            const auto n = g.index(i, j);
            const PhasePoint p = g.point(i, j);
            const double W = F.W[n];
            if (W < floor) {
                divW.mask[n] = 1;
                continue;
            }
            const double Wx = gaussian_partial(G, Axis::x, 1, p), Wk = gaussian_partial(G, Axis::k, 1, p);
            divW.values[n] = divJ.values[n] / W - (F.Jx[n] * Wx + F.Jk[n] * Wk) / (W * W);
        }

    const std::vector<Column> cols = {
        {"x", "grid"},
        {"k", "grid"},
        {"W", "gaussian weight alpha^2/pi exp(-alpha^2 (x^2 + k^2))"},
        {"Jx", "exact erf closed form"},
        {"Jk", "exact erf closed form"},
        {"divJ", "exact closed-form divergence"},
        {"divW_quantifier", "divergence of J/W from closed forms; nan below the weight floor"}};
    const auto path = c.output_dir / "gaussian_field.csv";
    write_field(c, F, divJ, divW, cols, path);
    out << "wrote " << path.string() << "\n";

    ordered_json j;
    j["meta"] = meta(c, {{"records", "stagnation points of the erf currents, Newton refined"}});
    const auto topo = topology(F, s, floor);
    for (auto it = topo.begin(); it != topo.end(); ++it)
        j[it.key()] = it.value();
    const auto jpath = c.output_dir / "gaussian_topology.json";
    commit_json(jpath, j);
    out << "wrote " << jpath.string() << "\n";
}

void run_camouflage(const RunConfig& c, std::ostream& out)
{
    const auto rep = camouflage_stationarity_check(c.real("nu1"), c.real("nu2"), c.real("zeta"), c.grid,
                                                   c.real("detune"));
    ordered_json j;
    j["meta"] = meta(c, {{"max_divJ", "max over the grid of the closed-form divergence"},
                         {"tuned", "max_divJ <= 1e-12"}});
    j["max_divJ"] = rep.max_abs_div;
    j["tuned"] = rep.max_abs_div <= 1e-12;
    j["parameters"] = {{"nu1", rep.params.nu1},           {"nu2", rep.params.nu2},
                       {"mu1", rep.params.mu1},           {"mu2", rep.params.mu2},
                       {"lambda_x", rep.params.lambda_x}, {"lambda_k", rep.params.lambda_k}};
    j["squeeze"] = {{"alpha", rep.gaussian.alpha}, {"zeta", rep.gaussian.zeta}};
    j["detune"] = rep.detune;
    const auto path = c.output_dir / "camouflage.json";
    commit_json(path, j);
    out << "wrote " << path.string() << "\n";
}

void run_evolve(const RunConfig& c, std::ostream& out)
{
    const DynamicsParams D{parse_order(c.text("order")), c.real("a"), c.real("alpha")};
    const StabilityReport sr = stability_report(D);
    const EvolveResult res = evolve(D, {c.real("y0"), c.real("z0")}, c.real("tau-end"), c.real("dt"));
    const auto& tr = res.trajectory;
    const Species eq = sr.equilibrium;

    CsvFile f(c, {{"tau", "RK4 time"},
                  {"y", "RK4 of the " + to_string(D.order) + " population velocities"},
                  {"z", "RK4 of the " + to_string(D.order) + " population velocities"},
                  {"r", "distance from the Newton equilibrium of the same order"}});
    for (std::size_t n = 0; n < tr.size(); ++n) {
        const auto& s = tr.species[n];
        f.row({tr.times[n], s.y, s.z, std::hypot(s.y - eq.y, s.z - eq.z)});
    }
    const auto stem = "evolve_" + to_string(D.order);
    const auto path = c.output_dir / (stem + ".csv");
    f.commit(path);
    out << "wrote " << path.string() << "\n";

    ordered_json j;
    j["meta"] = meta(c, {{"jacobian", to_string(D.order) == "exact" ? "central differences" : "analytic"},
                         {"equilibrium", "Newton on the population velocities"}});
    j["equilibrium"] = {{"y", eq.y}, {"z", eq.z}};
    j["jacobian"] = {{sr.jacobian[0][0], sr.jacobian[0][1]}, {sr.jacobian[1][0], sr.jacobian[1][1]}};
    j["trace"] = sr.trace;
    j["det"] = sr.det;
    j["discriminant"] = sr.discriminant;
    j["classification"] = to_string(sr.classification);
    j["residual"] = sr.residual;
    j["extinction"] = res.extinction;
    if (res.extinction)
        j["extinction_time"] = res.extinction_time;
    j["step_rejections"] = res.step_rejections;
    ordered_json periods = ordered_json::array();
    for (const auto& p : period_averages(tr, eq))
        periods.push_back({{"t_start", p.t_start}, {"t_end", p.t_end}, {"mean_radius", p.mean_radius}});
    j["periods"] = periods;
    const auto jpath = c.output_dir / (stem + "_stability.json");
    commit_json(jpath, j);
    out << "wrote " << jpath.string() << "\n";
}

int run_selftest(const RunConfig& c, std::ostream& out)
{
    using specfun::Complex;
    std::mt19937_64 rng(c.seed);
    const long N = c.integer("samples");
    std::uniform_real_distribution<double> ux(-6.0, 6.0), uy(-2.0, 2.0), upos(0.5, 20.0), uh(-3.0, 3.0);
    std::uniform_int_distribution<int> un(1, 20);
    bool all = true;
    auto report = [&](const std::string& name, long checks, double worst, double tol) {
        const bool ok = worst <= tol;
        all = all && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %s (%ld checks, max error %.3e, tol %.1e)\n", ok ? "PASS" : "FAIL",
                      name.c_str(), checks, worst, tol);
        out << buf;
    };

    double worst = 0.0;
    for (long n = 0; n < N; ++n) {
        const Complex z{ux(rng), uy(rng)};
        worst = std::max(worst, std::abs(specfun::erf_complex(-z) + specfun::erf_complex(z)));
    }
    report("erf reflection", N, worst, 1e-12);

    worst = 0.0;
    for (long n = 0; n < N; ++n) {
        const Complex z{ux(rng), uy(rng)};
        worst = std::max(worst, std::abs(specfun::erf_complex(std::conj(z)) - std::conj(specfun::erf_complex(z))));
    }
    report("erf conjugation", N, worst, 1e-12);

    worst = 0.0;
    for (long n = 0; n < N; ++n) {
        const double x = ux(rng);
        worst = std::max(worst, std::abs(specfun::erf_complex({x, 0.0}).real() - std::erf(x)));
    }
    report("erf real axis", N, worst, 1e-12);

    worst = 0.0;
    for (long n = 0; n < N; ++n) {
        const double x = uy(rng);
        const Complex e = specfun::erf_complex({0.0, x});
        const double v = specfun::erfi(x);
        worst = std::max(worst, std::abs(e - Complex{0.0, v}) / std::max(1.0, std::abs(v)));
    }
    report("erfi consistency", N, worst, 1e-12);

    worst = 0.0;
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0})
        worst = std::max(worst, std::abs(specfun::digamma(x + 1.0) - specfun::digamma(x) - 1.0 / x));
    report("digamma recurrence", 5, worst, 1e-10);

    worst = 0.0;
    const double h = 1e-5;
    for (long n = 0; n < N; ++n) {
        const double x = upos(rng);
        const double fd = (specfun::digamma(x + h) - specfun::digamma(x - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(specfun::trigamma(x) - fd));
    }
    report("trigamma derivative", N, worst, 1e-6);

    worst = 0.0;
    for (long n = 0; n < N; ++n) {
        const int k = un(rng);
        const double u = uh(rng);
        const double fd = (specfun::hermite(k, u + h) - specfun::hermite(k, u - h)) / (2.0 * h);
        const double exact = 2.0 * k * specfun::hermite(k - 1, u);
        const double scale = std::max({std::abs(exact), std::abs(specfun::hermite(k, u)), 1.0});
        worst = std::max(worst, std::abs(fd - exact) / scale);
    }
    report("hermite derivative", N, worst, 1e-6);

    return all ? 0 : 1;
}

} // namespace

int run(const RunConfig& config, std::ostream& out)
{
    switch (config.subcommand) {
    case Subcommand::classical: run_classical(config, out); break;
    case Subcommand::thermo: run_thermo(config, out); break;
    case Subcommand::gaussian: run_gaussian(config, out); break;
    case Subcommand::camouflage: run_camouflage(config, out); break;
    case Subcommand::evolve: run_evolve(config, out); break;
    case Subcommand::specfun_selftest: return run_selftest(config, out);
    }
    return 0;
}

int report_error(std::ostream& err)
{
    ordered_json j;
    int status = 5;
    try {
        throw;
    } catch (const UsageError& e) {
        j = {{"error", e.kind()}, {"key", e.key()}, {"message", e.what()}};
        status = 2;
    } catch (const DomainError& e) {
        j = {{"error", e.kind()}, {"guard", e.guard()}, {"message", e.what()}};
        status = 3;
    } catch (const Error& e) {
        j = {{"error", e.kind()}, {"message", e.what()}};
        status = 4;
    } catch (const std::exception& e) {
        j = {{"error", "io_error"}, {"message", e.what()}};
    } catch (...) {
        j = {{"error", "unknown"}, {"message", "unrecognised exception"}};
    }
    err << j.dump() << "\n";
    return status;
}

} // namespace lvw::cli
