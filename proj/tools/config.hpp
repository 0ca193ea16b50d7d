#pragma once

#include "lvwigner/phase_space.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace lvw::cli {

enum class Subcommand { classical, thermo, gaussian, camouflage, evolve, specfun_selftest };

std::string to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& s);

using ParamValue = std::variant<double, long, bool, std::string>;

enum class ParamKind { real, integer, flag, text };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    std::string default_value;
    std::string help;
};

// Subcommand-specific parameters with their defaults.
const std::vector<ParamSpec>& schema(Subcommand s);

struct RunConfig {
    Subcommand subcommand = Subcommand::classical;
    std::map<std::string, ParamValue> parameters;
    std::filesystem::path output_dir = ".";
    PhaseGrid grid;
    std::uint64_t seed = 12345;
    bool reproducible = false;

    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Environment variable consulted for the default output directory.
inline constexpr const char* kOutputDirEnv = "LVWIGNER_OUTPUT_DIR";

// argv form: <subcommand> [--key value ...] [--config file].  Values given on
// the command line override those read from the config file.
RunConfig parse_config(int argc, const char* const* argv);
// Config-file form: one `key = value` per line, `#` comments, and a
// `command = <subcommand>` entry.
RunConfig parse_config_text(const std::string& text);
std::string render(const RunConfig& c);

PhaseGrid parse_grid(const std::string& s);
std::string format_grid(const PhaseGrid& g);
std::vector<double> parse_list(const std::string& s, const std::string& key);
// lo:hi:n, n >= 1 points, inclusive endpoints.
std::vector<double> parse_range(const std::string& s, const std::string& key);

std::string format_number(double v);

// Thrown by parse_config for --help; carries the rendered usage text.
class HelpRequested : public std::exception {
public:
    explicit HelpRequested(std::string text) : text_(std::move(text)) {}
    const char* what() const noexcept override { return text_.c_str(); }

private:
    std::string text_;
};

} // namespace lvw::cli
