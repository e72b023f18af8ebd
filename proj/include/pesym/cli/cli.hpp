#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pesym::cli {

enum ExitCode : int { ExitPass = 0, ExitFailure = 1, ExitUsage = 2 };

/// Everything needed to reproduce one output: identical manifests give identical files.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;  ///< resolved, in resolution order
    std::optional<std::uint64_t> seed;
    std::string version;
    std::vector<std::pair<std::string, std::string>> digests;  ///< (label, sha256 hex)
    std::string timestamp;

    /// Fills version and timestamp.
    explicit RunManifest(std::string command);

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void add_digest(const std::filesystem::path& file, const std::string& label);

    /// One `# key: value` line per field.
    void write_header(std::ostream& out) const;
    nlohmann::json to_json() const;
};

/// Lowercase hex SHA-256 of a file's bytes; throws std::runtime_error when unreadable.
std::string sha256_file(const std::filesystem::path& file);
std::string sha256_bytes(const std::string& bytes);

/// UTC ISO-8601 time, taken from SOURCE_DATE_EPOCH when that is set.
std::string timestamp_utc();

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

/// Entry point shared by the executable and the tests: exit code per ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pesym::cli
