#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef OFFPROF_FIXTURE_DIR
#error "OFFPROF_FIXTURE_DIR must be defined by the build"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(OFFPROF_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Self-deleting scratch file for CLI round trips.
class TempFile {
 public:
  explicit TempFile(const std::string& name) : path_(scratch_dir() + "/" + name) {}
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }
  std::string read() const { return read_file(path_); }
  void write(const std::string& content) const {
    std::ofstream out(path_, std::ios::binary);
    out << content;
  }

 private:
  static std::string scratch_dir() {
    const char* tmp = std::getenv("TMPDIR");
    return tmp && *tmp ? tmp : "/tmp";
  }

  std::string path_;
};

}  // namespace testsupport
