#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace routeplace {

inline constexpr const char *kToolVersion = "0.1.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path &path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

std::string sha256_hex(std::string_view bytes);

/// Keeps large temporaries on the heap instead of fresh mappings, which
/// otherwise dominate the cost of repeated network passes.
void tune_allocator();

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level from ROUTEPLACE_LOG (error, info or debug); info when unset.
LogLevel log_level();
void log(LogLevel level, std::string_view message);
inline void log_error(std::string_view m) { log(LogLevel::Error, m); }
inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_debug(std::string_view m) { log(LogLevel::Debug, m); }

/// Provenance record written next to every artifact as `<artifact>.manifest`.
struct RunManifest {
  std::string subcommand;
  std::string config;  // resolved key = value text
  std::string seed;    // empty for deterministic subcommands without a seed
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  double wall_seconds = 0.0;

  void add_input(const std::filesystem::path &path);
  void add_output(const std::filesystem::path &path, std::string_view content);
  std::string to_string() const;
};

std::filesystem::path manifest_path(const std::filesystem::path &artifact);

}  // namespace routeplace
