#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsis/recover.hpp"
#include "gsis/signal.hpp"

namespace gsis::tools {

// SplitMix64 finalizer applied to a combination of the inputs; used to give
// every trial and every noise draw an independent, reproducible seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// Random coefficients with |c_k| in [0.2, 1] and uniform phase.
GaussianSignal synth_signal(std::uint64_t seed, int k_min, int k_max, double lambda, double beta);

// Default-window grid with ceil(oversample (2N + 1)) points.
std::vector<double> experiment_grid(int k_min, int k_max, double beta, double oversample);

// Additive Gaussian noise on both magnitudes, clamped at 0.
SampleSet add_noise(SampleSet samples, double sigma, std::uint64_t seed);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  int n_min = 1;
  int n_max = 6;
  int k_min = 0;
  double lambda = 1.0;
  double beta = 1.0;
  std::vector<double> noise_levels{0.0};
  double tol_imag = kDefaultTolImag;
  double oversample = 1.0;
  bool refine = true;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;  // throws Error(InvalidArgument)
};

struct TrialRow {
  int trial = 0;
  int n = 0;
  double noise_sigma = 0.0;
  double distance = 0.0;
  double residual = 0.0;
  double condition_A = 0.0;
  double condition_B = 0.0;
  std::string branch;  // a, b, real, or error
};

// Rows ordered by (N, noise level, trial) regardless of thread count.
std::vector<TrialRow> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "trial,N,noise_sigma,distance,residual,condition_A,condition_B,branch";

std::string render_csv(const std::vector<TrialRow>& rows);

// "a" when the pivot is the coefficient right after the leading one, "b" for
// a later pivot, "real" without one.
std::string branch_label(const RecoveryResult& result);

}  // namespace gsis::tools
