#pragma once

// Damped least-squares polish of the coefficients against (A, B).
//
// Residuals are taken on the half-lattice scale r_m = A_m exp(lambda beta^2 m^2 / 2)
// (and the same weights on the relative E sequence), where exact data of
// O(1) coefficients are O(1) at every order. The recursion is accurate near
// the end it starts from and loses about eps * exp(lambda beta^2 s^2 / 2) at
// order s, so seeds are taken from both ends and from merges of the two.

#include <vector>

#include "gsis/autocorr.hpp"
#include "gsis/signal.hpp"

namespace gsis {

// max |model - data| over the r-scaled A and E sequences, relative to the
// largest r-scaled data entry. c holds c_{K_-} .. c_{K_+}.
double scaled_residual(const AutocorrData& data, const std::vector<cplx>& c);

struct PolishResult {
  std::vector<cplx> coeffs;
  double residual = 0.0;  // scaled_residual of coeffs
  int iterations = 0;
};

// Levenberg-Marquardt on (Re c_{K_-}, Re c_k, Im c_k for k > K_-); the
// leading coefficient is rotated to be real before starting.
PolishResult polish(const AutocorrData& data, std::vector<cplx> seed, int max_iterations = 200);

// Same, with every coefficient held real (imaginary parts of the seed dropped).
PolishResult polish_real(const AutocorrData& data, std::vector<cplx> seed,
                         int max_iterations = 200);

// Candidate starting points: the bottom-up recursion, the recursion run on
// the reversed sequence, and their phase-aligned merges at every split.
// Negative discriminants are clamped; seeds that fail are skipped.
std::vector<std::vector<cplx>> recursion_seeds(const AutocorrData& data, double tol_imag);

// Polishes every seed and keeps the lowest residual.
PolishResult polish_best(const AutocorrData& data, double tol_imag);

}  // namespace gsis
