#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "framegate/error.hpp"

namespace framegate::cli {
namespace {

struct KeySpec {
    std::string_view name;
    bool repeatable = false;
};

struct SectionSpec {
    std::string_view name;
    std::vector<KeySpec> keys;
};

const std::vector<SectionSpec>& schema()
{
    static const std::vector<SectionSpec> s{
        {"run", {{"scenario"}, {"seed"}, {"mode"}, {"output"}, {"json"}}},
        {"tolerance", {{"scale"}, {"fidelity_threshold"}, {"significance"}, {"type_tolerance"}}},
        {"agree", {{"planted"}, {"axis"}, {"angle"}, {"rapidity"}, {"scale"}, {"parity"}, {"drift"}}},
        {"game", {{"placement"}, {"correction"}, {"drift"}, {"abort_after"}, {"transcript"}}},
        {"graph", {{"file"}, {"pairs"}}},
        {"lorentz", {{"x"}, {"boost"}, {"rotation"}}},
        {"sg", {{"g"}, {"mass"}, {"observer", true}}},
        {"suite",
         {{"sampled_tolerance"}, {"sampled_copies"}, {"sampled_runs"}, {"sampled_pass_fraction"}, {"fuzz_frames"},
          {"two_process"}}},
        {"session", {{"family"}, {"drift"}, {"abort_after"}, {"placement"}, {"correction"}}},
    };
    return s;
}

[[noreturn]] void config_error(int line, const std::string& msg)
{
    fail(ErrorCode::ConfigError, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + msg);
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

const KeySpec* lookup(std::string_view section, std::string_view key, int line)
{
    const auto& sections = schema();
    const auto sec = std::find_if(sections.begin(), sections.end(), [&](const SectionSpec& s) { return s.name == section; });
    if (sec == sections.end()) {
        config_error(line, "unknown section [" + std::string(section) + "]");
    }
    const auto k = std::find_if(sec->keys.begin(), sec->keys.end(), [&](const KeySpec& s) { return s.name == key; });
    if (k == sec->keys.end()) {
        config_error(line, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
    }
    return &*k;
}

}  // namespace

Config Config::parse(std::string_view text)
{
    Config c;
    std::string section = "run";
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                config_error(line_no, "malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (std::none_of(schema().begin(), schema().end(), [&](const SectionSpec& s) { return s.name == section; })) {
                config_error(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            config_error(line_no, "expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            config_error(line_no, "empty key");
        }
        const KeySpec* spec = lookup(section, key, line_no);
        auto& slot = c.sections_[section][key];
        if (!slot.empty() && !spec->repeatable) {
            config_error(line_no, "key '" + key + "' repeated in [" + section + "]");
        }
        slot.push_back({value, line_no});
        if (end == text.size()) {
            break;
        }
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const ConfigEntry* Config::find(std::string_view section, std::string_view key) const
{
    const auto sec = sections_.find(section);
    if (sec == sections_.end()) {
        return nullptr;
    }
    const auto k = sec->second.find(std::string(key));
    if (k == sec->second.end() || k->second.empty()) {
        return nullptr;
    }
    return &k->second.back();
}

bool Config::has(std::string_view section, std::string_view key) const { return find(section, key) != nullptr; }

std::optional<std::string> Config::text(std::string_view section, std::string_view key) const
{
    const auto* e = find(section, key);
    return e != nullptr ? std::optional<std::string>(e->value) : std::nullopt;
}

std::vector<ConfigEntry> Config::all(std::string_view section, std::string_view key) const
{
    const auto sec = sections_.find(section);
    if (sec == sections_.end()) {
        return {};
    }
    const auto k = sec->second.find(std::string(key));
    return k == sec->second.end() ? std::vector<ConfigEntry>{} : k->second;
}

double Config::number(std::string_view section, std::string_view key, double fallback) const
{
    const auto* e = find(section, key);
    if (e == nullptr) {
        return fallback;
    }
    try {
        return parse_double(e->value, std::string(section) + "." + std::string(key));
    }
    catch (const Error& err) {
        config_error(e->line, err.what());
    }
}

std::uint64_t Config::integer(std::string_view section, std::string_view key, std::uint64_t fallback) const
{
    const auto* e = find(section, key);
    if (e == nullptr) {
        return fallback;
    }
    try {
        return parse_u64(e->value, std::string(section) + "." + std::string(key));
    }
    catch (const Error& err) {
        config_error(e->line, err.what());
    }
}

bool Config::flag(std::string_view section, std::string_view key, bool fallback) const
{
    const auto* e = find(section, key);
    if (e == nullptr) {
        return fallback;
    }
    if (e->value == "true" || e->value == "yes" || e->value == "on" || e->value == "1") {
        return true;
    }
    if (e->value == "false" || e->value == "no" || e->value == "off" || e->value == "0") {
        return false;
    }
    config_error(e->line, std::string(section) + "." + std::string(key) + " must be true or false");
}

std::optional<std::vector<double>> Config::numbers(std::string_view section, std::string_view key,
                                                   std::size_t count) const
{
    const auto* e = find(section, key);
    if (e == nullptr) {
        return std::nullopt;
    }
    std::vector<double> v;
    try {
        v = parse_doubles(e->value, std::string(section) + "." + std::string(key));
    }
    catch (const Error& err) {
        config_error(e->line, err.what());
    }
    if (v.size() != count) {
        config_error(e->line, std::string(section) + "." + std::string(key) + " needs " + std::to_string(count)
                                  + " numbers, got " + std::to_string(v.size()));
    }
    return v;
}

void Config::set(const std::string& section, const std::string& key, std::string value)
{
    (void)lookup(section, key, 0);
    sections_[section][key] = {{std::move(value), 0}};
}

std::uint64_t parse_u64(std::string_view text, std::string_view what)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        fail(ErrorCode::ConfigError, std::string(what) + ": '" + std::string(text) + "' is not a whole number");
    }
    return v;
}

double parse_double(std::string_view text, std::string_view what)
{
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        fail(ErrorCode::ConfigError, std::string(what) + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

std::vector<double> parse_doubles(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) {
            ++i;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != ',') {
            ++j;
        }
        if (j > i) {
            out.push_back(parse_double(text.substr(i, j - i), what));
        }
        i = j;
    }
    return out;
}

Mode parse_mode(std::string_view text, std::uint64_t seed)
{
    if (text == "exact") {
        return Mode::exact();
    }
    constexpr std::string_view prefix = "sampled:";
    if (text.starts_with(prefix)) {
        const auto n = parse_u64(text.substr(prefix.size()), "mode copy count");
        if (n == 0) {
            fail(ErrorCode::ConfigError, "sampled mode needs at least one copy");
        }
        return Mode::sampled(n, seed);
    }
    fail(ErrorCode::ConfigError, "mode '" + std::string(text) + "' is neither exact nor sampled:N");
}

}  // namespace framegate::cli
