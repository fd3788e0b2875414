#pragma once

#include <optional>
#include <vector>

#include "gsis/autocorr.hpp"
#include "gsis/recursion.hpp"
#include "gsis/signal.hpp"

namespace gsis {

// Im^2 > tol^2 |c~_p|^2 marks the first complex coefficient. Roundoff leaves a
// spurious imaginary part near sqrt(eps) |c~_p| on a real coefficient, so the
// default sits well above that.
inline constexpr double kDefaultTolImag = 1e-6;
// Relative residual beyond which data are not an autocorrelation pair.
inline constexpr double kInconsistentResidual = 1e-3;
// Relative size of a negative discriminant still treated as rounding.
inline constexpr double kDiscriminantClamp = 1e-10;

struct RecoveryResult {
  GaussianSignal signal = GaussianSignal::zero(1.0, 1.0);  // canonical representative
  std::optional<int> pivot_index; // absolute index of the first complex coefficient
  std::vector<StepRecord> branch_trace;
  double max_residual = 0.0;
  double condition_A = 1.0;
  double condition_B = 1.0;

  friend bool operator==(const RecoveryResult&, const RecoveryResult&) = default;
};

// Recursive recovery of c~_{K_-} .. c~_{K_+} from (A, B), returned as c_k.
// Throws InvalidLeadingCoefficient, NegativeDiscriminant, InconsistentData.
RecoveryResult recover_coefficients(const AutocorrData& data, int k_min, int k_max,
                                    double tol_imag = kDefaultTolImag);

struct ReconstructOptions {
  double tol_imag = kDefaultTolImag;
  // Polish the recursion output by damped least squares against (A, B) and
  // keep it when the scaled residual drops.
  bool refine = true;
};

// Samples -> A -> B -> coefficients.
RecoveryResult reconstruct(const SampleSet& samples, int k_min, int k_max, double lambda,
                           double beta, const ReconstructOptions& options = {});

// max_m max(|A_m(result) - A_m|, |B_m(result) - B_m|) / ||A||_inf.
double verify_against_data(const RecoveryResult& result, const AutocorrData& data);

}  // namespace gsis
