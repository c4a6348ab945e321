#include "routeplace/util.hpp"

#include <openssl/evp.h>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "routeplace/netlist.hpp"

namespace routeplace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 15]);
  }
  return out;
}

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

LogLevel log_level() {
  const char *env = std::getenv("ROUTEPLACE_LOG");
  if (env == nullptr) return LogLevel::Info;
  std::string_view v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static const char *names[] = {"error", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

void RunManifest::add_input(const std::filesystem::path &path) {
  inputs.emplace_back(path.string(), sha256_hex(read_file(path)));
}

void RunManifest::add_output(const std::filesystem::path &path, std::string_view content) {
  outputs.emplace_back(path.string(), sha256_hex(content));
}

std::string RunManifest::to_string() const {
  std::string out = "subcommand = " + subcommand + "\n";
  out += "tool_version = " + std::string(kToolVersion) + "\n";
  if (!seed.empty()) out += "seed = " + seed + "\n";
  for (const auto &[p, h] : inputs) out += "input = " + p + " sha256:" + h + "\n";
  for (const auto &[p, h] : outputs) out += "output = " + p + " sha256:" + h + "\n";
  out += "wall_seconds = " + format_double(wall_seconds) + "\n";
  out += "[config]\n" + config;
  return out;
}

std::filesystem::path manifest_path(const std::filesystem::path &artifact) {
  std::filesystem::path p = artifact;
  p += ".manifest";
  return p;
}

}  // namespace routeplace
