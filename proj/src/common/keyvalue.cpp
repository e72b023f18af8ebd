#include "pesym/common/keyvalue.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pesym {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(std::string_view s) {
    std::string text = trim(s);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size())
        throw FormatError("not a number: '" + text + "'");
    return v;
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string origin) {
    KeyValueFile f;
    f.origin_ = std::move(origin);
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(f.origin_ + ":" + std::to_string(number) + ": expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        // collapse internal whitespace so "param  alpha" == "param alpha"
        auto words = split_ws(key);
        key.clear();
        for (std::size_t i = 0; i < words.size(); ++i) key += (i ? " " : "") + words[i];
        if (key.empty()) throw FormatError(f.origin_ + ":" + std::to_string(number) + ": empty key");
        f.lines_.push_back({key, trim(std::string_view(line).substr(eq + 1)), number});
    }
    return f;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

bool KeyValueFile::has(std::string_view key) const {
    for (const auto& l : lines_)
        if (l.key == key) return true;
    return false;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
    std::optional<std::string> out;
    for (const auto& l : lines_)
        if (l.key == key) out = l.value;
    return out;
}

std::string KeyValueFile::require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw FormatError(origin_ + ": missing required field '" + std::string(key) + "'");
    return *v;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& l : lines_)
        if (l.key == key) out.push_back(l.value);
    return out;
}

std::vector<KeyValueFile::Line> KeyValueFile::with_prefix(std::string_view prefix) const {
    std::vector<Line> out;
    for (const auto& l : lines_)
        if (l.key.size() > prefix.size() && l.key.compare(0, prefix.size(), prefix) == 0 &&
            l.key[prefix.size()] == ' ')
            out.push_back(l);
    return out;
}

void KeyValueFile::fail(const Line& line, const std::string& message) const {
    throw FormatError(origin_ + ":" + std::to_string(line.number) + ": " + message);
}

}  // namespace pesym
