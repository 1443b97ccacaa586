#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vhed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using complexd = std::complex<double>;

// error taxonomy mirrors the CLI exit codes: usage=1, data=2, numerical=3
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : error {
  using error::error;
};
struct numerical_error : error {
  using error::error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw error(msg);
}
inline void require_data(bool cond, const std::string& msg) {
  if (!cond) throw data_error(msg);
}

// splitmix64: cheap, well-mixed derivation of per-task seeds from a master seed
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x51ed2701ULL));
}

constexpr double pi = 3.14159265358979323846;

}  // namespace vhed
