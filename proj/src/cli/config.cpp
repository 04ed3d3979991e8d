#include "forge/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include <fmt/format.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/parallel.hpp"

namespace forge::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, std::string_view source) {
    const auto text = trim(value);
    T out{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError(fmt::format("{}: {} must be a number, got '{}'", source, key, value));
    return out;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value, std::string_view source) {
    if (trim(value).starts_with('-')) throw ConfigError(fmt::format("{}: {} must not be negative", source, key));
    return parse_number<T>(key, value, source);
}

bool parse_bool(std::string_view key, std::string_view value, std::string_view source) {
    std::string v = trim(value);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(fmt::format("{}: {} must be true or false, got '{}'", source, key, value));
}

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<std::string> optional_text(std::string_view value) {
    auto v = trim(value);
    if (v.empty()) return std::nullopt;
    return v;
}

// Value text after `=`: a quoted string, an array of quoted strings or a
// bare scalar, with any trailing comment removed.
std::string parse_value(std::string_view raw, std::string_view where) {
    const auto v = trim(raw);
    if (v.empty()) throw ConfigError(fmt::format("{}: missing value", where));
    const auto quoted = [&](std::string_view s, std::size_t& i) {
        const char q = s[i++];
        std::string out;
        for (; i < s.size() && s[i] != q; ++i) {
            if (q == '"' && s[i] == '\\' && i + 1 < s.size()) {
                ++i;
                out += s[i] == 'n' ? '\n' : s[i] == 't' ? '\t' : s[i];
            } else {
                out += s[i];
            }
        }
        if (i >= s.size()) throw ConfigError(fmt::format("{}: unterminated string", where));
        ++i;
        return out;
    };
    const auto rest_is_comment = [&](std::string_view s, std::size_t i) {
        const auto r = trim(s.substr(i));
        if (!r.empty() && r[0] != '#') throw ConfigError(fmt::format("{}: unexpected text '{}'", where, r));
    };
    if (v[0] == '"' || v[0] == '\'') {
        std::size_t i = 0;
        auto s = quoted(v, i);
        rest_is_comment(v, i);
        return s;
    }
    if (v[0] == '[') {
        std::vector<std::string> items;
        std::size_t i = 1;
        for (;;) {
            while (i < v.size() && (v[i] == ' ' || v[i] == '\t' || v[i] == ',')) ++i;
            if (i >= v.size()) throw ConfigError(fmt::format("{}: unterminated array", where));
            if (v[i] == ']') {
                ++i;
                break;
            }
            if (v[i] != '"' && v[i] != '\'') throw ConfigError(fmt::format("{}: arrays hold quoted strings only", where));
            items.push_back(quoted(v, i));
        }
        rest_is_comment(v, i);
        std::string joined;
        for (const auto& s : items) joined += (joined.empty() ? "" : ",") + s;
        return joined;
    }
    return trim(v.substr(0, v.find('#')));
}

}  // namespace

std::size_t RunConfig::effective_workers() const { return workers == 0 ? default_workers() : workers; }

void RunConfig::validate() const {
    const auto open_unit = [](std::string_view name, double v) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(fmt::format("{} must be in (0, 1), got {}", name, v));
    };
    open_unit("identify_threshold", identify_threshold);
    open_unit("replace_threshold", replace_threshold);
    if (max_retries < 0) throw ConfigError("max_retries must not be negative");
    if (errors_per_claim < 1) throw ConfigError("errors_per_claim must be at least 1");
    if (latex_timeout < 1) throw ConfigError("latex_timeout must be at least 1 second");
    if (data_root.empty()) throw ConfigError("data_root is empty");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "data_root",        "seed",           "workers",          "insertion_models",   "identification_models",
        "judge_model",      "identify_threshold", "replace_threshold", "max_retries",    "max_claims",
        "errors_per_claim", "latex_engine",   "latex_timeout",    "mock_script",        "sources_dir",
        "bootstrap_resamples", "bootstrap",   "compile_cache",    "stop_after",
    };
    return keys;
}

void set_key(RunConfig& c, std::string_view key, std::string_view value, std::string_view source) {
    if (key == "data_root") c.data_root = trim(value);
    else if (key == "seed") c.seed = parse_unsigned<std::uint64_t>(key, value, source);
    else if (key == "workers") c.workers = parse_unsigned<std::size_t>(key, value, source);
    else if (key == "insertion_models") c.insertion_models = parse_list(value);
    else if (key == "identification_models") c.identification_models = parse_list(value);
    else if (key == "judge_model") c.judge_model = optional_text(value);
    else if (key == "identify_threshold") c.identify_threshold = parse_number<double>(key, value, source);
    else if (key == "replace_threshold") c.replace_threshold = parse_number<double>(key, value, source);
    else if (key == "max_retries") c.max_retries = parse_number<int>(key, value, source);
    else if (key == "max_claims") c.max_claims = parse_unsigned<std::size_t>(key, value, source);
    else if (key == "errors_per_claim") c.errors_per_claim = parse_number<int>(key, value, source);
    else if (key == "latex_engine") c.latex_engine = trim(value);
    else if (key == "latex_timeout") c.latex_timeout = parse_number<int>(key, value, source);
    else if (key == "mock_script") c.mock_script = optional_text(value);
    else if (key == "sources_dir") c.sources_dir = optional_text(value);
    else if (key == "bootstrap_resamples") c.bootstrap_resamples = parse_unsigned<std::size_t>(key, value, source);
    else if (key == "bootstrap") c.bootstrap = parse_bool(key, value, source);
    else if (key == "compile_cache") c.compile_cache = parse_bool(key, value, source);
    else if (key == "stop_after") c.stop_after = optional_text(value);
    else throw ConfigError(fmt::format("{}: unknown setting '{}'", source, key));
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, std::string_view source) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        const auto where = fmt::format("{}:{}", source, line_no);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            if (line.back() != ']') throw ConfigError(fmt::format("{}: malformed section header", where));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("{}: expected key = value", where));
        const auto key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ConfigError(fmt::format("{}: empty key", where));
        out.emplace_back(key, parse_value(std::string_view(line).substr(eq + 1), where));
    }
    return out;
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
    RunConfig c;
    if (file) {
        if (!std::filesystem::exists(*file)) throw ConfigError("config file not found: " + file->string());
        for (const auto& [k, v] : parse_config_text(read_file(*file), file->string())) set_key(c, k, v, file->string());
    }
    for (const auto& key : config_keys()) {
        std::string name = "FORGE_" + key;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
        if (const auto v = env(name)) set_key(c, key, *v, name);
    }
    return c;
}

}  // namespace forge::cli
