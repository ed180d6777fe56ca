#include "pegrisk/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "pegrisk/error.hpp"
#include "text.hpp"

namespace pegrisk {

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string_view key = detail::trim(body.substr(0, eq));
        if (key.empty()) {
            throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.entries_[std::string(key)] = std::string(detail::trim(body.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
    return parse(in);
}

void KeyValueConfig::merge(const KeyValueConfig& overrides) {
    for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    const auto value = detail::parse_double(*raw);
    if (!value) throw Error(ErrorKind::Config, "config key '" + key + "': not a number: " + *raw);
    return value;
}

std::optional<long long> KeyValueConfig::get_int(const std::string& key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), out);
    if (ec != std::errc{} || ptr != raw->data() + raw->size()) {
        throw Error(ErrorKind::Config, "config key '" + key + "': not an integer: " + *raw);
    }
    return out;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    if (*raw == "true" || *raw == "1" || *raw == "yes" || *raw == "on") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no" || *raw == "off") return false;
    throw Error(ErrorKind::Config, "config key '" + key + "': not a boolean: " + *raw);
}

void KeyValueConfig::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

}  // namespace pegrisk
