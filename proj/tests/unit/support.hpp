#pragma once

// Generators and brute-force references shared by the unit tests. Nothing
// here calls into the library beyond the value types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "gsis/signal.hpp"

namespace gsis::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx unimodular() { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }
  cplx coefficient() { return std::polar(uniform(0.2, 1.0), uniform(0.0, 2.0 * std::numbers::pi)); }

  GaussianSignal signal(int k_min, int width, double lambda = 1.0, double beta = 1.0) {
    std::vector<cplx> c;
    for (int i = 0; i <= width; ++i) c.push_back(coefficient());
    return GaussianSignal(lambda, beta, k_min, std::move(c));
  }

  GaussianSignal real_signal(int k_min, int width, double lambda = 1.0, double beta = 1.0) {
    std::vector<cplx> c;
    for (int i = 0; i <= width; ++i) {
      const double v = uniform(0.2, 1.0);
      c.emplace_back(integer(0, 1) ? v : -v, 0.0);
    }
    return GaussianSignal(lambda, beta, k_min, std::move(c));
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double got, double want, double floor = 1e-300) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// max_i |a_i - b_i| / max_i |b_i|.
inline double seq_err(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  const double s = max_abs(b);
  return s > 0.0 ? m / s : m;
}

// f(x) in long double, term by term.
inline std::complex<long double> reference_value(const GaussianSignal& s, long double x) {
  std::complex<long double> acc{};
  for (int k = s.k_min(); k <= s.k_max(); ++k) {
    const long double d = x - static_cast<long double>(s.beta()) * k;
    const cplx c = s.coeff(k);
    acc += std::complex<long double>(c.real(), c.imag()) * std::exp(-static_cast<long double>(s.lambda()) * d * d);
  }
  return acc;
}

inline double reference_mod_sq(const GaussianSignal& s, double x) {
  return static_cast<double>(std::norm(reference_value(s, x)));
}

// A_m and B_m by the defining double sum over absolute indices, long double.
struct DirectSums {
  std::vector<double> A, B;
};

inline DirectSums direct_sums(const GaussianSignal& s) {
  const int k0 = s.k_min(), k1 = s.k_max();
  const long double lb2 = static_cast<long double>(s.lambda()) * s.beta() * s.beta();
  auto tilde = [&](int k) {
    const cplx c = s.coeff(k);
    return std::complex<long double>(c.real(), c.imag()) * std::exp(-lb2 * k * k);
  };
  DirectSums out;
  for (int m = 2 * k0; m <= 2 * k1; ++m) {
    std::complex<long double> a{}, b{};
    for (int j = k0; j <= k1; ++j) {
      const int i = m - j;
      if (i < k0 || i > k1) continue;
      const auto t = tilde(i) * std::conj(tilde(j));
      a += t;
      b += static_cast<long double>(i) * j * t;
    }
    out.A.push_back(static_cast<double>(a.real()));
    out.B.push_back(static_cast<double>(b.real()));
  }
  return out;
}

}  // namespace gsis::test
