#ifndef CROSSFIRE_TESTS_TEST_UTIL_H
#define CROSSFIRE_TESTS_TEST_UTIL_H

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "crossfire/rng.h"
#include "crossfire/tensor.h"

namespace crossfire::testing {

inline nn::Tensor RandomTensor(nn::Shape shape, Rng& rng, double lo = -1.0,
                               double hi = 1.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.Uniform(lo, hi);
  return t;
}

// Sum of elementwise products: a scalar loss whose gradient w.r.t. `y` is `r`.
inline double Dot(const nn::Tensor& y, const nn::Tensor& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("crossfire_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace crossfire::testing

#endif  // CROSSFIRE_TESTS_TEST_UTIL_H
