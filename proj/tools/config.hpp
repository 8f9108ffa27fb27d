#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "framegate/messages.hpp"

namespace framegate::cli {

/// One `key = value` line of a config file.
struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// Line-oriented config: `[section]` headers, `key = value` lines, `#` or
/// `;` comments. Keys before any header belong to section "run". Every key
/// is checked against a fixed schema; unknown sections or keys, and repeats
/// of non-list keys, are ConfigError.
class Config {
  public:
    static Config parse(std::string_view text);
    static Config load(const std::string& path);

    [[nodiscard]] bool has(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::optional<std::string> text(std::string_view section, std::string_view key) const;
    [[nodiscard]] std::vector<ConfigEntry> all(std::string_view section, std::string_view key) const;

    [[nodiscard]] double number(std::string_view section, std::string_view key, double fallback) const;
    [[nodiscard]] std::uint64_t integer(std::string_view section, std::string_view key, std::uint64_t fallback) const;
    [[nodiscard]] bool flag(std::string_view section, std::string_view key, bool fallback) const;
    /// Whitespace-separated list of exactly `count` numbers.
    [[nodiscard]] std::optional<std::vector<double>> numbers(std::string_view section, std::string_view key,
                                                             std::size_t count) const;

    /// Command-line overrides replace whatever the file said.
    void set(const std::string& section, const std::string& key, std::string value);

  private:
    [[nodiscard]] const ConfigEntry* find(std::string_view section, std::string_view key) const;

    std::map<std::string, std::map<std::string, std::vector<ConfigEntry>>, std::less<>> sections_;
};

/// "exact" or "sampled:N"; the sampling seed comes from `seed`.
Mode parse_mode(std::string_view text, std::uint64_t seed);

/// Parses a whole number; ConfigError naming `what` otherwise.
std::uint64_t parse_u64(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
std::vector<double> parse_doubles(std::string_view text, std::string_view what);

}  // namespace framegate::cli
