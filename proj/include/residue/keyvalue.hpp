#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace residue {

/// Ordered `key=value` document. Blank lines and lines starting with '#' are
/// ignored on parse; insertion order is preserved on output.
class KeyValues {
public:
    void set(std::string key, std::string value);
    std::optional<std::string> find(std::string_view key) const;
    /// Throws Error(malformed) when the key is absent.
    const std::string& at(std::string_view key) const;
    bool contains(std::string_view key) const { return find(key).has_value(); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string str() const;
    static KeyValues parse(std::istream& in);
    static KeyValues parse(std::string_view text);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest round-trip text for a double: 17 significant digits, '.' separator.
std::string format_real(double v);
std::string format_reals(const std::vector<double>& v, char sep = ',');

double parse_real(std::string_view text);
std::uint64_t parse_uint(std::string_view text);
std::vector<double> parse_reals(std::string_view text, char sep = ',');
std::vector<std::uint64_t> parse_uints(std::string_view text, char sep = ',');

std::string read_file(const std::filesystem::path& path);
/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace residue
