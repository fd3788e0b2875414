#pragma once

// Brute-force cross-checks for the production pipeline. Nothing in the
// library proper calls into this header.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gsis/signal.hpp"

namespace gsis::oracle {

struct DenseGridFit {
  std::vector<double> grid;
  std::vector<double> values;     // |f|^2 on the grid
  std::vector<double> recovered;  // A_{2K_-} .. A_{2K_+}
  double residual = 0.0;          // max fit residual relative to max value
};

// Least-squares fit of |f(x)|^2 on a dense grid in the Gaussian half-lattice
// basis exp(-2 lambda (x - beta m / 2)^2), converted back to A_m.
// Requires grid_size >= 4 (2N + 1). Throws RankDeficient, InvalidArgument.
DenseGridFit fit_dense(const GaussianSignal& signal, int grid_size);
std::vector<double> fit_A_dense(const GaussianSignal& signal, int grid_size);

struct StepCheckEntry {
  std::string formula;
  int k_min = 0;
  int trial = 0;
  double expected = 0.0;
  double got = 0.0;
};

struct FormulaTally {
  std::string formula;
  // true for a form transcribed verbatim from the source derivation that is
  // kept only to show where it disagrees with direct expansion.
  bool as_printed = false;
  int checks = 0;
  int failures = 0;
};

struct StepCheckReport {
  std::vector<StepCheckEntry> failures;
  std::vector<FormulaTally> tallies;

  int failures_where(bool as_printed) const;
  const FormulaTally* tally(const std::string& formula) const;
};

// Draws random complex c~ on [k_min, k_max] (k_max - k_min <= 4), expands A
// and B by direct double sums and checks every recursion step against the
// known truth to 1e-10. Trials cycle through a generic draw and draws with the
// first one or two coefficients after the leading one forced real.
StepCheckReport symbolic_step_check(int k_min, int k_max, int trials, std::uint64_t seed = 1);

struct TwoTermSet {
  std::vector<std::array<cplx, 2>> members;  // (c~_0, c~_1), c~_0 > 0
  bool degenerate_support = false;           // c~_1 = 0 contradicts the window
};

// Closed-form solution set of the two-coefficient problem. Throws
// InconsistentData when no member exists.
TwoTermSet exhaustive_two_term(const std::array<double, 3>& A, const std::array<double, 3>& B,
                               int k_min = 0);

}  // namespace gsis::oracle
