#include "residue/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "residue/error.hpp"

namespace residue {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename F>
void for_each_field(std::string_view text, char sep, F&& f) {
    if (trim(text).empty()) return;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        f(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
}

}  // namespace

void KeyValues::set(std::string key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::find(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

const std::string& KeyValues::at(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw Error(errc::kMalformed, "missing key '" + std::string(key) + "'");
}

std::string KeyValues::str() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

KeyValues KeyValues::parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw Error(errc::kMalformed, "line " + std::to_string(lineno) + ": expected key=value");
        kv.set(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
    }
    return kv;
}

KeyValues KeyValues::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_reals(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_real(v[i]);
    }
    return out;
}

double parse_real(std::string_view text) {
    const auto t = trim(text);
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    if (t == "nan") return NAN;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw Error(errc::kMalformed, "not a real number: '" + std::string(t) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view text) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw Error(errc::kMalformed, "not a non-negative integer: '" + std::string(t) + "'");
    return v;
}

std::vector<double> parse_reals(std::string_view text, char sep) {
    std::vector<double> out;
    for_each_field(text, sep, [&](std::string_view f) { out.push_back(parse_real(f)); });
    return out;
}

std::vector<std::uint64_t> parse_uints(std::string_view text, char sep) {
    std::vector<std::uint64_t> out;
    for_each_field(text, sep, [&](std::string_view f) { out.push_back(parse_uint(f)); });
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::kIo, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(errc::kIo, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(errc::kIo, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(errc::kIo, "cannot rename to '" + path.string() + "': " + ec.message());
}

}  // namespace residue
