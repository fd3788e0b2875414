#include "gsis/autocorr.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "gsis/error.hpp"
#include "summation.hpp"

namespace gsis {

namespace {

constexpr double kImagResidueTol = 1e-12;
constexpr double kModulusNegTol = 1e-12;
constexpr double kDExtractNegTol = 1e-10;

// Weighted Hermitian convolution sum_{i+j=m} w(i, j) t_i conj(t_j) over
// absolute indices k_min..k_min+n-1, checked for realness.
template <class Weight>
std::vector<double> hermitian_convolution(const std::vector<cplx>& t, int k_min, Weight weight) {
  const int n = static_cast<int>(t.size());
  std::vector<double> out(2 * n - 1);
  for (int s = 0; s < 2 * n - 1; ++s) {
    detail::CompensatedComplexSum sum;
    double scale = 0.0;
    for (int i = std::max(0, s - n + 1); i <= std::min(s, n - 1); ++i) {
      const double w = weight(k_min + i, k_min + s - i);
      const cplx term = w * t[i] * std::conj(t[s - i]);
      sum.add(term);
      scale += std::abs(term);
    }
    const cplx v = sum.value();
    if (std::abs(v.imag()) > kImagResidueTol * scale + 1e-300) {
      std::ostringstream os;
      os << "imaginary residue " << v.imag() << " at m=" << 2 * k_min + s << " (scale " << scale
         << ")";
      throw Error(ErrorKind::NonRealAutocorrelation, os.str());
    }
    out[s] = v.real();
  }
  return out;
}

struct ExpSum {
  double value = 0.0;
  double scale = 0.0;  // same sum with absolute values
};

// exp(-2 lambda x^2) sum_m w(m) X_m exp(2 lambda beta m x)
template <class Weight>
ExpSum exp_sum(const std::vector<double>& seq, int m_min, double lambda, double beta, double x,
               Weight weight) {
  detail::CompensatedSum sum;
  double scale = 0.0;
  for (std::size_t p = 0; p < seq.size(); ++p) {
    const int m = m_min + static_cast<int>(p);
    const double e = std::exp(2.0 * lambda * x * (beta * m - x));
    const double term = weight(m) * seq[p] * e;
    sum.add(term);
    scale += std::abs(term);
  }
  return {sum.value(), scale};
}

constexpr auto unit_weight = [](int) { return 1.0; };

double clamp_nonneg(double v, double scale, double tol, const char* what, double x) {
  if (v >= 0.0) return v;
  if (v >= -tol * scale) return 0.0;
  std::ostringstream os;
  os << what << " = " << v << " at x=" << x << " is negative beyond rounding (scale " << scale
     << ")";
  throw Error(ErrorKind::NegativeModulus, os.str());
}

}  // namespace

double AutocorrData::a(int m) const noexcept {
  const int p = m - m_min;
  if (p < 0 || p >= static_cast<int>(A.size())) return 0.0;
  return A[static_cast<std::size_t>(p)];
}

double AutocorrData::b(int m) const noexcept {
  const int p = m - m_min;
  if (p < 0 || p >= static_cast<int>(B.size())) return 0.0;
  return B[static_cast<std::size_t>(p)];
}

void AutocorrData::validate() const {
  if (!(lambda > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda and beta must be positive");
  }
  if (m_min % 2 != 0) throw Error(ErrorKind::InvalidArgument, "m_min must be even (2 K_-)");
  if (A.empty() || A.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "A must have odd length 2(K_+ - K_-) + 1");
  }
  if (!B.empty() && B.size() != A.size()) {
    throw Error(ErrorKind::InvalidArgument, "A and B lengths differ");
  }
  for (double v : A) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite A entry");
  }
  for (double v : B) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite B entry");
  }
  if (!(A.front() > 0.0)) {
    throw Error(ErrorKind::InvalidLeadingCoefficient, "A_{2K_-} must be strictly positive");
  }
}

std::vector<cplx> tilde_coeffs(const GaussianSignal& signal) {
  std::vector<cplx> t;
  t.reserve(signal.size());
  const double lb2 = signal.lambda() * signal.beta() * signal.beta();
  int k = signal.k_min();
  for (const cplx& c : signal.coeffs()) {
    t.push_back(c * std::exp(-lb2 * static_cast<double>(k) * k));
    ++k;
  }
  return t;
}

std::vector<double> autocorr_A(const GaussianSignal& signal) {
  if (signal.is_zero()) return {};
  return hermitian_convolution(tilde_coeffs(signal), signal.k_min(),
                               [](int, int) { return 1.0; });
}

std::vector<double> autocorr_B(const GaussianSignal& signal) {
  if (signal.is_zero()) return {};
  auto weighted = hermitian_convolution(tilde_coeffs(signal), signal.k_min(),
                                        [](int i, int j) { return static_cast<double>(i) * j; });
#ifndef NDEBUG
  // Second route: B is the A-sequence of omega, on omega's (possibly
  // trimmed) window.
  const GaussianSignal w = omega_signal(signal);
  if (!w.is_zero()) {
    const auto via_omega = autocorr_A(w);
    const int offset = 2 * (w.k_min() - signal.k_min());
    double scale = 0.0;
    for (double v : weighted) scale = std::max(scale, std::abs(v));
    for (std::size_t p = 0; p < weighted.size(); ++p) {
      const int q = static_cast<int>(p) - offset;
      const double other =
          (q >= 0 && q < static_cast<int>(via_omega.size())) ? via_omega[q] : 0.0;
      assert(std::abs(weighted[p] - other) <= 1e-10 * scale + 1e-300);
    }
  }
#endif
  return weighted;
}

AutocorrData autocorr(const GaussianSignal& signal) {
  if (signal.is_zero()) throw Error(ErrorKind::ZeroSignal, "autocorrelation of the zero signal");
  AutocorrData d;
  d.m_min = 2 * signal.k_min();
  d.A = autocorr_A(signal);
  d.B = autocorr_B(signal);
  d.lambda = signal.lambda();
  d.beta = signal.beta();
  return d;
}

std::vector<double> half_lattice_r(const AutocorrData& data) {
  std::vector<double> r(data.A.size());
  const double lb2 = data.lambda * data.beta * data.beta;
  for (std::size_t p = 0; p < r.size(); ++p) {
    const double m = data.m_min + static_cast<double>(p);
    r[p] = data.A[p] * std::exp(0.5 * lb2 * m * m);
  }
  return r;
}

std::vector<double> half_lattice_r(const GaussianSignal& signal) {
  if (signal.is_zero()) return {};
  AutocorrData d;
  d.m_min = 2 * signal.k_min();
  d.A = autocorr_A(signal);
  d.lambda = signal.lambda();
  d.beta = signal.beta();
  return half_lattice_r(d);
}

double modulus_sq_via_A(const AutocorrData& data, double x) {
  const ExpSum s = exp_sum(data.A, data.m_min, data.lambda, data.beta, x, unit_weight);
  return clamp_nonneg(s.value, s.scale, kModulusNegTol, "|f|^2", x);
}

double d_modulus_sq_via_B(const AutocorrData& data, double x) {
  const ExpSum s = exp_sum(data.B, data.m_min, data.lambda, data.beta, x, unit_weight);
  return clamp_nonneg(s.value, s.scale, kModulusNegTol, "|d|^2", x);
}

double derivative_modulus_sq_via_AB(const AutocorrData& data, double x) {
  const double f2 = modulus_sq_via_A(data, x);
  const double d2 = d_modulus_sq_via_B(data, x);
  const ExpSum mA = exp_sum(data.A, data.m_min, data.lambda, data.beta, x,
                            [](int m) { return static_cast<double>(m); });
  const double b = data.beta;
  const double v = x * x * f2 + b * b * d2 - b * x * mA.value;
  const double scale = x * x * f2 + b * b * d2 + std::abs(b * x) * mA.scale;
  const double l2 = 4.0 * data.lambda * data.lambda;
  return l2 * clamp_nonneg(v, scale, kDExtractNegTol, "|f'|^2/(4 lambda^2)", x);
}

double d_mag_sq_from_samples(const HermiteSample& sample, const AutocorrData& data) {
  const double g = sample.gamma;
  const double b = data.beta;
  const ExpSum mA = exp_sum(data.A, data.m_min, data.lambda, data.beta, g,
                            [](int m) { return static_cast<double>(m); });
  const double df2 = sample.mag_df * sample.mag_df / (4.0 * data.lambda * data.lambda);
  const double f2 = g * g * sample.mag_f * sample.mag_f;
  const double cross = b * g * mA.value;
  const double v = (df2 - f2 + cross) / (b * b);
  const double scale = (df2 + f2 + std::abs(b * g) * mA.scale) / (b * b);
  return clamp_nonneg(v, scale, kDExtractNegTol, "|d|^2", g);
}

}  // namespace gsis
