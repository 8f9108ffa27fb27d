#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace framegate::cli {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;  ///< verify-suite found a failing criterion
inline constexpr int exit_protocol = 2;      ///< protocol, numeric or transport failure
inline constexpr int exit_config = 3;        ///< bad flags, config or graph file

/// Flags every subcommand accepts.
struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    bool json = false;
    std::optional<std::string> listen;
    std::optional<std::string> connect;
    std::optional<double> timeout_seconds;
};

/// Config file merged with the flags; flags win.
struct Settings {
    Config config;
    std::uint64_t seed = 1;
    Mode mode = Mode::exact();
    std::string out;
    bool json = false;
    std::optional<std::string> listen;
    std::optional<std::string> connect;
    std::chrono::milliseconds timeout{30000};
};

Settings resolve(const CommonFlags& flags);

struct CommandResult {
    Report report;
    int exit_code = exit_ok;
};

CommandResult cmd_agree(const Settings& s);
CommandResult cmd_game(const Settings& s);
CommandResult cmd_graph(const Settings& s);
CommandResult cmd_lorentz(const Settings& s);
CommandResult cmd_sg(const Settings& s);
CommandResult cmd_verify_suite(const Settings& s);
/// Returns after one session. With `--listen stdio` stdout carries frames,
/// so the report goes only to --out.
CommandResult cmd_serve(const Settings& s, std::ostream& diagnostics);
CommandResult cmd_connect(const Settings& s);

/// Full command line: parses, runs, writes the report, maps errors to exit
/// codes. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& err);

}  // namespace framegate::cli
