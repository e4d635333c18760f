#include "portalens/io/text.hpp"

#include "portalens/error.hpp"

#include <charconv>
#include <istream>

namespace portalens::text {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

namespace {

template <class T>
T convert(std::string_view s, const char* what) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != end)
        throw InputError(std::string("invalid ") + what + " '" + std::string(s) + "'");
    return v;
}

} // namespace

double to_real(std::string_view s) {
    // from_chars rejects a leading '+', which printf never produces anyway.
    return convert<double>(s, "number");
}
std::int64_t to_int(std::string_view s) { return convert<std::int64_t>(s, "integer"); }
std::uint64_t to_uint(std::string_view s) { return convert<std::uint64_t>(s, "id"); }

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) throw InputError("dangling escape");
        switch (s[i]) {
        case '\\': out += '\\'; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: throw InputError(std::string("unknown escape \\") + s[i]);
        }
    }
    return out;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

} // namespace portalens::text
