#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pesym {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plain-text `key = value` file. `#` starts a comment; keys may repeat.
class KeyValueFile {
public:
    struct Line {
        std::string key;
        std::string value;
        int number = 0;
    };

    static KeyValueFile parse(std::string_view text, std::string origin = "<string>");
    static KeyValueFile read(const std::filesystem::path& path);

    const std::vector<Line>& lines() const { return lines_; }
    const std::string& origin() const { return origin_; }

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    /// Throws FormatError naming the file when the key is absent.
    std::string require(std::string_view key) const;
    std::vector<std::string> get_all(std::string_view key) const;
    /// Every line whose key starts with `prefix` followed by a space, e.g. "param alpha".
    std::vector<Line> with_prefix(std::string_view prefix) const;

    [[noreturn]] void fail(const Line& line, const std::string& message) const;

private:
    std::string origin_;
    std::vector<Line> lines_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
double parse_double(std::string_view s);

}  // namespace pesym
