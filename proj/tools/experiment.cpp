#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "gsis/equiv.hpp"
#include "gsis/error.hpp"

namespace gsis::tools {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

GaussianSignal synth_signal(std::uint64_t seed, int k_min, int k_max, double lambda, double beta) {
  if (k_min > k_max) throw Error(ErrorKind::InvalidArgument, "k_min > k_max");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> c;
  for (int k = k_min; k <= k_max; ++k) {
    const double r = mod(rng);
    c.push_back(std::polar(r, phase(rng)));
  }
  return GaussianSignal(lambda, beta, k_min, std::move(c));
}

std::vector<double> experiment_grid(int k_min, int k_max, double beta, double oversample) {
  if (!(oversample >= 1.0)) throw Error(ErrorKind::InvalidArgument, "oversample must be >= 1");
  const double base = 2.0 * (k_max - k_min) + 1.0;
  const auto count = static_cast<std::size_t>(std::ceil(oversample * base - 1e-9));
  return sampling_grid(k_min, k_max, beta, count);
}

SampleSet add_noise(SampleSet samples, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : samples.points) {
    p.mag_f = std::max(0.0, p.mag_f + noise(rng));
    p.mag_df = std::max(0.0, p.mag_df + noise(rng));
  }
  return samples;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
  if (n_min < 0 || n_max < n_min) throw Error(ErrorKind::InvalidArgument, "invalid N range");
  if (!(lambda > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda and beta must be positive");
  }
  if (noise_levels.empty()) throw Error(ErrorKind::InvalidArgument, "no noise levels");
  for (double s : noise_levels) {
    if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise_sigma must be >= 0");
  }
  if (!(tol_imag > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_imag must be positive");
  if (!(oversample >= 1.0)) throw Error(ErrorKind::InvalidArgument, "oversample must be >= 1");
}

std::string branch_label(const RecoveryResult& result) {
  if (!result.pivot_index) return "real";
  return *result.pivot_index == result.signal.k_min() + 1 ? "a" : "b";
}

std::vector<TrialRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  struct Job {
    int n;
    std::size_t noise_index;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n = config.n_min; n <= config.n_max; ++n) {
    for (std::size_t s = 0; s < config.noise_levels.size(); ++s) {
      for (int t = 0; t < config.trials; ++t) jobs.push_back({n, s, t});
    }
  }

  std::vector<TrialRow> rows(jobs.size());
  auto run_one = [&](const Job& job) {
    const double sigma = config.noise_levels[job.noise_index];
    TrialRow row;
    row.trial = job.trial;
    row.n = job.n;
    row.noise_sigma = sigma;
    const int k_max = config.k_min + job.n;
    const auto n64 = static_cast<std::uint64_t>(job.n);
    const auto t64 = static_cast<std::uint64_t>(job.trial);
    const GaussianSignal truth =
        synth_signal(mix_seed(config.seed, n64, t64), config.k_min, k_max, config.lambda, config.beta);
    try {
      SampleSet samples = hermite_samples(
          truth, experiment_grid(config.k_min, k_max, config.beta, config.oversample));
      samples = add_noise(std::move(samples), sigma, mix_seed(config.seed, n64, t64, job.noise_index + 1));
      ReconstructOptions opt;
      opt.tol_imag = config.tol_imag;
      opt.refine = config.refine;
      const RecoveryResult r =
          reconstruct(samples, config.k_min, k_max, config.lambda, config.beta, opt);
      row.distance = equivalence_distance(truth, r.signal).distance;
      row.residual = r.max_residual;
      row.condition_A = r.condition_A;
      row.condition_B = r.condition_B;
      row.branch = branch_label(r);
    } catch (const Error&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.distance = row.residual = row.condition_A = row.condition_B = nan;
      row.branch = "error";
    }
    return row;
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = run_one(jobs[i]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return rows;
}

std::string render_csv(const std::vector<TrialRow>& rows) {
  std::string out = kCsvHeader;
  out += "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + "," + std::to_string(r.n) + ",";
    append_number(out, r.noise_sigma);
    for (double v : {r.distance, r.residual, r.condition_A, r.condition_B}) {
      out += ",";
      append_number(out, v);
    }
    out += "," + r.branch + "\n";
  }
  return out;
}

}  // namespace gsis::tools
