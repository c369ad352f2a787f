#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace affect::testing {

inline std::filesystem::path data_dir() { return AFFECT_DATA_DIR; }

/// Fresh, empty directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("affect-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> sine(double freq, double amplitude, double seconds, double rate = 16000.0,
                                 double phase = 0.0) {
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase);
  }
  return out;
}

}  // namespace affect::testing
