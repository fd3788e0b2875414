#pragma once

// Exponential-node moment systems
//
//   values_n = sum_{m=m_min}^{m_max} X_m u_n^m,   u_n = exp(2 lambda beta gamma_n),
//
// which recover A from exp(2 lambda gamma^2)|f(gamma)|^2 and B from
// exp(2 lambda gamma^2)|d(gamma)|^2. After factoring out u_n^{m_min} this is a
// polynomial interpolation (Vandermonde) problem in the positive nodes u_n.

#include <span>
#include <vector>

#include "gsis/autocorr.hpp"
#include "gsis/signal.hpp"

namespace gsis {

struct MomentProblem {
  std::vector<double> gammas;
  std::vector<double> values;  // exp(2 lambda gamma^2) |.|^2 at each gamma
  int m_min = 0;
  int m_max = 0;
  double lambda = 1.0;
  double beta = 1.0;

  int unknowns() const noexcept { return m_max - m_min + 1; }
};

struct MomentSolution {
  std::vector<double> coeffs;  // X_{m_min} ... X_{m_max}
  double condition = 1.0;      // see condition_report
  // max_n |sum_m X_m u_n^{m-m_min} - values_n u_n^{-m_min}| relative to the
  // largest right-hand side.
  double residual = 0.0;
};

// Square systems use Bjorck-Pereyra on the sorted nodes; oversampled systems
// use an equilibrated column-pivoted QR least-squares solve.
// Throws DuplicateNodes, RankDeficient, InsufficientSamples, InvalidArgument.
MomentSolution solve_moments(const MomentProblem& problem);

// 1-norm condition number of the row-scaled Vandermonde matrix
// [u_n^j / max_j u_n^j], j = 0 .. m_count-1, on the centred nodes
// u_n = exp(2 lambda beta (gamma_n - gamma_mid)) that solve_moments factors,
// gamma_mid being the midpoint of the node range. For square systems the inverse is
// formed from Lagrange basis coefficients (exact up to rounding); for
// oversampled systems this falls back to the 2-norm ratio of singular values,
// which saturates near 1/eps.
double condition_report(std::span<const double> gammas, double lambda, double beta, int m_count);

// CLI warning threshold for condition_report.
inline constexpr double kConditionWarning = 1e12;

struct MomentRecovery {
  AutocorrData data;
  double condition = 1.0;
  double residual = 0.0;
};

// A_m, m = 2 k_min .. 2 k_max, from exp(2 lambda gamma^2) |f(gamma)|^2.
MomentRecovery recover_A(const SampleSet& samples, int k_min, int k_max, double lambda,
                         double beta);

// B_m from |d(gamma)|^2 extracted with d_mag_sq_from_samples. The result
// carries data_A's A together with the new B.
MomentRecovery recover_B(const SampleSet& samples, const AutocorrData& data_A, int k_min,
                         int k_max);

}  // namespace gsis
