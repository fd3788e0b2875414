#pragma once

// Coefficient sequences of the modulus expansions
//
//   |f(x)|^2 = exp(-2 lambda x^2) sum_m A_m exp(2 lambda beta m x)
//   |d(x)|^2 = exp(-2 lambda x^2) sum_m B_m exp(2 lambda beta m x)
//
// with m = 2 K_- ... 2 K_+, c~_k = c_k exp(-lambda beta^2 k^2) and
// d = sum_k k c_k exp(-lambda (x - beta k)^2).

#include <vector>

#include "gsis/signal.hpp"

namespace gsis {

struct AutocorrData {
  int m_min = 0;          // 2 K_-
  std::vector<double> A;  // A[p] <-> m = m_min + p
  std::vector<double> B;  // same shape as A once filled
  double lambda = 1.0;
  double beta = 1.0;

  int k_min() const noexcept { return m_min / 2; }
  int k_max() const noexcept { return k_min() + width(); }
  // K_+ - K_-.
  int width() const noexcept { return A.empty() ? 0 : static_cast<int>(A.size() - 1) / 2; }
  int m_max() const noexcept { return m_min + static_cast<int>(A.size()) - 1; }
  bool has_B() const noexcept { return !B.empty(); }

  // Absolute-index accessors; zero outside the window.
  double a(int m) const noexcept;
  double b(int m) const noexcept;

  // Shape, finiteness and A_{2K_-} > 0. Throws InvalidArgument or
  // InvalidLeadingCoefficient.
  void validate() const;

  friend bool operator==(const AutocorrData&, const AutocorrData&) = default;
};

std::vector<cplx> tilde_coeffs(const GaussianSignal& signal);

// A_m = sum_j c~_{m-j} conj(c~_j). Throws NonRealAutocorrelation if the
// Hermitian sum is not real to 1e-12 relative.
std::vector<double> autocorr_A(const GaussianSignal& signal);
// B_m = sum_j (m-j) j c~_{m-j} conj(c~_j) with absolute indices.
std::vector<double> autocorr_B(const GaussianSignal& signal);
// Both sequences.
AutocorrData autocorr(const GaussianSignal& signal);

// r_m = A_m exp(lambda beta^2 m^2 / 2), so |f(x)|^2 = sum_m r_m exp(-2 lambda (x - beta m/2)^2).
std::vector<double> half_lattice_r(const GaussianSignal& signal);
std::vector<double> half_lattice_r(const AutocorrData& data);

// |f(x)|^2 from A. Throws NegativeModulus when the sum is negative beyond
// rounding; small negative residue is clamped to 0.
double modulus_sq_via_A(const AutocorrData& data, double x);
// |d(x)|^2 from B.
double d_modulus_sq_via_B(const AutocorrData& data, double x);
// |f'(x)|^2 from A and B alone.
double derivative_modulus_sq_via_AB(const AutocorrData& data, double x);

// |d(gamma)|^2 extracted from one phaseless Hermite sample and A:
//   [ |f'|^2/(4 lambda^2) - gamma^2 |f|^2
//     + beta gamma exp(-2 lambda gamma^2) sum_m m A_m exp(2 lambda beta m gamma) ] / beta^2
double d_mag_sq_from_samples(const HermiteSample& sample, const AutocorrData& data);

}  // namespace gsis
