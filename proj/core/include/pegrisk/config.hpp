#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace pegrisk {

/// Plain-text `key = value` settings. Lines starting with '#' and blank lines
/// are ignored; later duplicates overwrite earlier ones. Keys are kept sorted
/// so that writing a config back out is deterministic.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
    void merge(const KeyValueConfig& overrides);

    [[nodiscard]] bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
    [[nodiscard]] std::string get_or(const std::string& key, const std::string& fallback) const;

    // Typed accessors throw Error(ErrorKind::Config) when the value does not parse.
    [[nodiscard]] std::optional<double> get_double(const std::string& key) const;
    [[nodiscard]] std::optional<long long> get_int(const std::string& key) const;
    [[nodiscard]] std::optional<bool> get_bool(const std::string& key) const;

    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return entries_; }

    void write(std::ostream& out) const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace pegrisk
