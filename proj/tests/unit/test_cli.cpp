#include "config.hpp"
#include "run.hpp"

#include "lvwigner/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lvw;
using namespace lvw::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args)
{
    args.insert(args.begin(), "lvwigner");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("lvwigner_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<fs::path> listing(const fs::path& dir)
{
    std::vector<fs::path> v;
    for (const auto& e : fs::directory_iterator(dir))
        v.push_back(e.path().filename());
    std::sort(v.begin(), v.end());
    return v;
}

int run_quiet(const RunConfig& c)
{
    std::ostringstream out;
    return run(c, out);
}

} // namespace

TEST_CASE("parse_config examples")
{
    const RunConfig t = parse({"thermo", "--a", "1", "--beta-range", "0.1:5:50"});
    CHECK(t.subcommand == Subcommand::thermo);
    CHECK(parse_range(t.text("beta-range"), "beta-range").size() == 50);

    const RunConfig g = parse({"gaussian", "--alpha", "1", "--a", "1", "--grid", "-6:6:-6:6:241:241"});
    CHECK(g.subcommand == Subcommand::gaussian);
    CHECK(g.grid == PhaseGrid{});
    CHECK(g.real("alpha") == 1.0);

    try {
        parse({"thermo", "--a", "1", "--beta-range", "5:6:2"});
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.guard() == "a*beta^2<24");
    }
}

TEST_CASE("parse_config rejects unknown keys with the key name")
{
    try {
        parse({"gaussian", "--bogus", "3"});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(e.key() == "bogus");
    }
    try {
        parse_config_text("command = evolve\norder = exact\nwobble = 1\n");
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(e.key() == "wobble");
    }
    CHECK_THROWS_AS(parse({"gaussian", "--alpha", "abc"}), UsageError);
    CHECK_THROWS_AS(parse({"nonsense"}), UsageError);
    CHECK_THROWS_AS(parse({"gaussian", "--grid", "1:2:3"}), UsageError);
    CHECK_THROWS_AS(parse_config_text("alpha = 1\n"), UsageError);
    CHECK_THROWS_AS(parse_config_text("command = gaussian\nalpha = 1\nalpha = 2\n"), UsageError);
    CHECK_THROWS_AS(parse_config_text("command = gaussian\nalpha\n"), UsageError);
}

TEST_CASE("parse_config delegates module guards")
{
    CHECK_THROWS_AS(parse({"gaussian", "--alpha", "5"}), AccuracyLoss);
    CHECK_THROWS_AS(parse({"gaussian", "--alpha", "-1"}), DomainError);
    CHECK_THROWS_AS(parse({"evolve", "--order", "exact", "--dt", "0.01"}), DomainError);
    CHECK_THROWS_AS(parse({"classical", "--a", "0"}), DomainError);
    CHECK_NOTHROW(parse({"evolve", "--order", "exact", "--dt", "0.001"}));
}

TEST_CASE("config file text and command-line overrides")
{
    const RunConfig c = parse_config_text("# gaussian run\ncommand = gaussian\n  alpha = 0.5   # narrow\na = 2\nseed = 7\n\n");
    CHECK(c.subcommand == Subcommand::gaussian);
    CHECK(c.real("alpha") == 0.5);
    CHECK(c.real("a") == 2.0);
    CHECK(c.seed == 7);

    const fs::path dir = scratch("cfg");
    const fs::path file = dir / "run.cfg";
    std::ofstream(file) << "command = gaussian\nalpha = 0.5\na = 2\n";
    const RunConfig o = parse({"gaussian", "--config", file.string(), "--alpha", "0.75"});
    CHECK(o.real("alpha") == 0.75);
    CHECK(o.real("a") == 2.0);
}

TEST_CASE("defaults and output directory from the environment")
{
    const RunConfig c = parse({"camouflage"});
    CHECK(c.real("nu1") == 1.0);
    CHECK(c.real("nu2") == 2.0);
    CHECK(c.real("zeta") == 0.0);
    CHECK_FALSE(c.reproducible);
    ::setenv(kOutputDirEnv, "/tmp/from_env", 1);
    CHECK(parse({"camouflage"}).output_dir == fs::path("/tmp/from_env"));
    CHECK(parse({"camouflage", "--output-dir", "here"}).output_dir == fs::path("here"));
    ::unsetenv(kOutputDirEnv);
}

TEST_CASE("property: parse_config(render(c)) == c")
{
    const std::vector<std::vector<std::string>> cases = {
        {"classical", "--a", "1.5", "--energies", "3,4.25", "--tau-end", "2"},
        {"thermo", "--a", "0.5,1,2,4", "--beta-range", "0.1:5:50", "--seed", "99"},
        {"thermo", "--field", "--beta", "2.5", "--grid", "-3:4:-2:5:31:41"},
        {"gaussian", "--alpha", "0.7071067811865476", "--a", "0.3333333333333333"},
        {"camouflage", "--nu1", "1.1", "--nu2", "0.9", "--zeta", "-0.3", "--detune", "1.1"},
        {"evolve", "--order", "alpha4", "--a", "0.9", "--alpha", "0.8", "--reproducible"},
        {"specfun-selftest", "--samples", "50"},
    };
    for (const auto& args : cases) {
        const RunConfig c = parse(args);
        const std::string text = render(c);
        CAPTURE(text);
        CHECK(parse_config_text(text) == c);
    }
}

TEST_CASE("grid, list and range helpers")
{
    const PhaseGrid g = parse_grid("-3:4:-2:5:31:41");
    CHECK(g.x_min == -3.0);
    CHECK(g.k_max == 5.0);
    CHECK(g.nk == 41);
    CHECK(parse_grid(format_grid(g)) == g);
    CHECK(parse_list("0.5, 1,2", "a") == std::vector<double>{0.5, 1.0, 2.0});
    const auto r = parse_range("0.1:5:50", "beta-range");
    CHECK(r.front() == 0.1);
    CHECK(r.back() == 5.0);
    CHECK(parse_range("2:2:1", "beta-range") == std::vector<double>{2.0});
    CHECK_THROWS_AS(parse_range("1:2", "beta-range"), UsageError);
    CHECK_THROWS_AS(parse_range("1:2:0", "beta-range"), UsageError);
    for (double v : {0.1, 1.0 / 3.0, 2.05, 1e-300, 6.0})
        CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(2.05) == "2.05");
}

TEST_CASE("run: classical portrait writes the eight level sets")
{
    const fs::path dir = scratch("classical");
    RunConfig c = parse({"classical", "--output-dir", dir.string()});
    REQUIRE(run_quiet(c) == 0);
    int level_sets = 0;
    for (const auto& f : listing(dir))
        level_sets += f.string().rfind("level_set_e", 0) == 0;
    CHECK(level_sets == 8);
    for (const char* e : {"6", "5", "4", "3", "2.5", "2.2", "2.1", "2.05"})
        CHECK(fs::exists(dir / ("level_set_e" + std::string(e) + ".csv")));
    const std::string head = slurp(dir / "level_set_e3.csv");
    CHECK(head.rfind("# lvwigner ", 0) == 0);
    CHECK(head.find("# config energies = 6,5,4,3,2.5,2.2,2.1,2.05") != std::string::npos);
    CHECK(head.find("# config grid = -6:6:-6:6:241:241") != std::string::npos);
    CHECK(head.find("# column H:") != std::string::npos);
    for (const auto& f : listing(dir))
        CHECK(f.extension() != ".tmp");
}

TEST_CASE("run: thermo scan writes one curve per anisotropy")
{
    const fs::path dir = scratch("thermo");
    REQUIRE(run_quiet(parse({"thermo", "--a", "0.5,1,2,4", "--beta-range", "0.1:5:50", "--output-dir", dir.string()})) == 0);
    for (const char* a : {"0.5", "1", "2", "4"}) {
        const fs::path f = dir / ("thermo_a" + std::string(a) + ".csv");
        REQUIRE(fs::exists(f));
        std::istringstream in(slurp(f));
        std::string line;
        int rows = 0;
        bool header = false;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#')
                continue;
            if (!header) {
                CHECK(line == "beta,Z0,ZST,E0,EST,C0,CST");
                header = true;
                continue;
            }
            ++rows;
        }
        CHECK(rows == 50);
    }
}

TEST_CASE("run: camouflage report is tuned")
{
    const fs::path dir = scratch("camouflage");
    REQUIRE(run_quiet(parse({"camouflage", "--output-dir", dir.string()})) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "camouflage.json"));
    CHECK(j["tuned"] == true);
    CHECK(j["max_divJ"].get<double>() <= 1e-12);
    REQUIRE(run_quiet(parse({"camouflage", "--detune", "1.1", "--output-dir", dir.string()})) == 0);
    const auto d = nlohmann::json::parse(slurp(dir / "camouflage.json"));
    CHECK(d["tuned"] == false);
    CHECK(d["max_divJ"].get<double>() > 1e-3);
}

TEST_CASE("run: evolve emits trajectory and stability report")
{
    const fs::path dir = scratch("evolve");
    REQUIRE(run_quiet(parse({"evolve", "--order", "alpha2", "--alpha", "0.8", "--tau-end", "5", "--dt", "0.01", "--output-dir", dir.string()})) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "evolve_alpha2_stability.json"));
    CHECK(j["equilibrium"]["y"].get<double>() == doctest::Approx(1.0 / (1.0 + 0.64 / 12.0)).epsilon(1e-9));
    CHECK(j["residual"].get<double>() <= 1e-10);
    CHECK(j["classification"] == "center-candidate");
    CHECK(slurp(dir / "evolve_alpha2.csv").find("tau,y,z,r\n") != std::string::npos);
}

TEST_CASE("run: gaussian and thermo field outputs")
{
    const fs::path dir = scratch("fields");
    REQUIRE(run_quiet(parse({"gaussian", "--grid", "-3:3:-3:3:25:25", "--output-dir", dir.string()})) == 0);
    CHECK(fs::exists(dir / "gaussian_field.csv"));
    CHECK(fs::exists(dir / "gaussian_topology.json"));
    REQUIRE(run_quiet(parse({"thermo", "--field", "--beta", "5", "--grid", "-3:3:-3:3:25:25", "--output-dir", dir.string()})) == 0);
    CHECK(fs::exists(dir / "thermo_field_a1.csv"));
    CHECK(fs::exists(dir / "thermo_topology_a1.json"));
}

TEST_CASE("property: reproducible runs are byte-identical")
{
    const std::vector<std::vector<std::string>> cases = {
        {"classical", "--energies", "3,2.5", "--tau-end", "1"},
        {"thermo", "--a", "1,2", "--beta-range", "0.5:2:4"},
        {"gaussian", "--grid", "-3:3:-3:3:21:21"},
        {"camouflage", "--zeta", "0.3"},
        {"evolve", "--order", "alpha4", "--alpha", "0.8", "--tau-end", "2", "--dt", "0.01"},
    };
    for (const auto& args : cases) {
        const fs::path d1 = scratch("det1"), d2 = scratch("det2");
        auto a1 = args, a2 = args;
        for (auto* a : {&a1, &a2})
            a->insert(a->end(), {"--reproducible", "--seed", "5"});
        a1.insert(a1.end(), {"--output-dir", d1.string()});
        a2.insert(a2.end(), {"--output-dir", d2.string()});
        REQUIRE(run_quiet(parse(a1)) == 0);
        REQUIRE(run_quiet(parse(a2)) == 0);
        const auto files = listing(d1);
        REQUIRE(files == listing(d2));
        REQUIRE_FALSE(files.empty());
        for (const auto& f : files) {
            std::string s1 = slurp(d1 / f), s2 = slurp(d2 / f);
            // The output directory is part of the recorded configuration.
            for (auto* s : {&s1, &s2}) {
                const std::string dir = s == &s1 ? d1.string() : d2.string();
                for (auto pos = s->find(dir); pos != std::string::npos; pos = s->find(dir))
                    s->replace(pos, dir.size(), "<out>");
            }
            CAPTURE(f);
            CHECK(s1 == s2);
            CHECK(s1.find("generated") == std::string::npos);
        }
    }
}

TEST_CASE("run: timestamp header present unless reproducible")
{
    const fs::path dir = scratch("stamp");
    REQUIRE(run_quiet(parse({"classical", "--energies", "3", "--output-dir", dir.string()})) == 0);
    CHECK(slurp(dir / "level_set_e3.csv").find("# generated ") != std::string::npos);
}

TEST_CASE("error reporting: machine-readable JSON and exit codes")
{
    auto capture = [](auto&& thrower) {
        std::ostringstream err;
        int status = -1;
        try {
            thrower();
        } catch (...) {
            status = report_error(err);
        }
        return std::make_pair(status, nlohmann::json::parse(err.str()));
    };
    auto [s1, j1] = capture([] { parse({"gaussian", "--bogus", "1"}); });
    CHECK(s1 == 2);
    CHECK(j1["error"] == "usage_error");
    CHECK(j1["key"] == "bogus");
    auto [s2, j2] = capture([] { parse({"thermo", "--a", "1", "--beta-range", "5:6:2"}); });
    CHECK(s2 == 3);
    CHECK(j2["error"] == "domain_error");
    CHECK(j2["guard"] == "a*beta^2<24");
    auto [s3, j3] = capture([] { parse({"gaussian", "--alpha", "5"}); });
    CHECK(s3 == 4);
    CHECK(j3["error"] == "accuracy_loss");
}

TEST_CASE("tool binary: exit status and error JSON")
{
    const char* tool = std::getenv("LVWIGNER_TOOL");
    if (!tool) {
        MESSAGE("LVWIGNER_TOOL not set; skipping binary checks");
        return;
    }
    const fs::path dir = scratch("tool");
    const std::string t = std::string("'") + tool + "'";
    auto status = [](int raw) { return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1; };
    CHECK(status(std::system((t + " --help > /dev/null").c_str())) == 0);
    CHECK(status(std::system((t + " thermo --bogus 1 2> " + (dir / "e1").string()).c_str())) == 2);
    CHECK(nlohmann::json::parse(slurp(dir / "e1"))["key"] == "bogus");
    CHECK(status(std::system((t + " thermo --a 1 --beta-range 5:6:2 2> " + (dir / "e2").string()).c_str())) == 3);
    CHECK(nlohmann::json::parse(slurp(dir / "e2"))["guard"] == "a*beta^2<24");
    CHECK(status(std::system((t + " specfun-selftest --samples 20 > " + (dir / "st").string()).c_str())) == 0);
    CHECK(slurp(dir / "st").find("FAIL") == std::string::npos);
    CHECK(status(std::system((t + " camouflage --output-dir " + (dir / "out").string() + " > /dev/null").c_str())) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "out" / "camouflage.json"))["tuned"] == true);
}
