#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace torusnf {

using Complex = std::complex<double>;
using VecI = Eigen::VectorXi;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

/// Thrown when a pipeline stage detects a numerical inconsistency
/// that invalidates the run (as opposed to bad user input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Counter-based deterministic generator: value i of stream `seed` is a pure
/// function of (seed, i), so runs are reproducible regardless of call order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform() {  // in [0, 1)
    const std::uint64_t r = splitmix64(seed_ ^ splitmix64(counter_++));
    return static_cast<double>(r >> 11) * 0x1.0p-53;
  }

  double uniform_sym() { return 2.0 * uniform() - 1.0; }  // in (-1, 1)

  double normal() {
    // Box-Muller; consumes two uniforms.
    const double u1 = std::max(uniform(), 0x1.0p-60);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Complex cnormal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
  }

  std::uint64_t next_u64() { return splitmix64(seed_ ^ splitmix64(counter_++)); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a64_value(const T& v, std::uint64_t h = 0xcbf29ce484222325ull) {
  static_assert(std::is_trivially_copyable_v<T>);
  return fnv1a64(&v, sizeof(T), h);
}

}  // namespace torusnf
