// gsis: phase retrieval of Gaussian shift-invariant signals from phaseless
// Hermite samples.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "experiment.hpp"
#include "gsis/equiv.hpp"
#include "gsis/error.hpp"
#include "gsis/expsolve.hpp"
#include "gsis/io.hpp"
#include "gsis/oracle.hpp"
#include "gsis/recover.hpp"

namespace {

using namespace gsis;

struct Globals {
  std::uint64_t seed = 1;
  double lambda = 1.0;
  double beta = 1.0;
  int k_min = 0;
  std::optional<int> k_max;
  double tol_imag = kDefaultTolImag;
  double oversample = 1.0;
  bool strict = false;
  std::string out;
};

enum Exit { kOk = 0, kFailure = 1, kDataError = 2, kIllConditioned = 3 };

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    io::write_file(g.out, text);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) {
      throw Error(ErrorKind::Parse, "cannot parse number list entry \"" + item + "\"");
    }
    out.push_back(v);
  }
  return out;
}

GaussianSignal load_signal(const std::string& path) {
  const io::Json j = io::parse(io::read_file(path));
  if (j.is_object() && j.contains("signal")) return io::recovery_from_json(j).signal;
  return io::signal_from_json(j);
}

int cmd_synth(const Globals& g, int width) {
  const int k_max = g.k_max.value_or(g.k_min + width);
  const GaussianSignal s = tools::synth_signal(g.seed, g.k_min, k_max, g.lambda, g.beta);
  emit(g, io::dump(io::to_json(s)));
  return kOk;
}

int cmd_sample(const Globals& g, const std::string& signal_path, const std::string& gammas,
               double noise) {
  const GaussianSignal s = load_signal(signal_path);
  if (s.is_zero()) throw Error(ErrorKind::ZeroSignal, "cannot sample the zero signal");
  const std::vector<double> grid =
      gammas.empty() ? tools::experiment_grid(s.k_min(), s.k_max(), s.beta(), g.oversample)
                     : parse_list(gammas);
  SampleSet samples = hermite_samples(s, grid);
  if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise must be >= 0");
  samples = tools::add_noise(std::move(samples), noise, tools::mix_seed(g.seed, 0x5a4d));
  emit(g, io::dump(io::to_json(samples)));
  return kOk;
}

int cmd_reconstruct(const Globals& g, const std::string& samples_path, bool no_refine) {
  const SampleSet samples = io::samples_from_json(io::parse(io::read_file(samples_path)));
  const int k_max =
      g.k_max.value_or(g.k_min + (static_cast<int>(samples.size()) - 1) / 2);
  const int required = 2 * (k_max - g.k_min) + 1;
  if (k_max < g.k_min) throw Error(ErrorKind::InvalidArgument, "kmax < kmin");
  if (static_cast<int>(samples.size()) < required) {
    std::cerr << "gsis: window [" << g.k_min << ", " << k_max << "] requires at least " << required
              << " samples, got " << samples.size() << "\n";
    return kDataError;
  }

  std::vector<double> gammas;
  for (const auto& p : samples.points) gammas.push_back(p.gamma);
  const double condition = condition_report(gammas, g.lambda, g.beta, required);
  if (condition > kConditionWarning) {
    std::cerr << "gsis: warning: condition estimate " << format_double(condition)
              << " exceeds " << format_double(kConditionWarning)
              << "; double precision cannot be trusted at this size\n";
    if (g.strict) return kIllConditioned;
  }

  ReconstructOptions opt;
  opt.tol_imag = g.tol_imag;
  opt.refine = !no_refine;
  const RecoveryResult r = reconstruct(samples, g.k_min, k_max, g.lambda, g.beta, opt);
  emit(g, io::dump(io::to_json(r)));
  return kOk;
}

int cmd_verify(const Globals& g, const std::string& a, const std::string& b, double threshold) {
  const EquivalenceReport rep = equivalence_distance(load_signal(a), load_signal(b));
  emit(g, io::dump(io::to_json(rep)));
  return rep.distance <= threshold ? kOk : kFailure;
}

int cmd_experiment(const Globals& g, tools::ExperimentConfig cfg, const std::string& noise) {
  cfg.seed = g.seed;
  cfg.k_min = g.k_min;
  cfg.lambda = g.lambda;
  cfg.beta = g.beta;
  cfg.tol_imag = g.tol_imag;
  cfg.oversample = g.oversample;
  if (!noise.empty()) cfg.noise_levels = parse_list(noise);
  emit(g, tools::render_csv(tools::run_experiment(cfg)));
  return kOk;
}

int cmd_oracle_check(const Globals& g, int trials) {
  io::Json failures = io::Json::array();
  io::Json tallies = io::Json::array();
  int rederived_failures = 0;
  int variant_failures = 0;
  for (int k_min : {-2, 0, 3}) {
    for (int width = 1; width <= 4; ++width) {
      const auto rep = oracle::symbolic_step_check(k_min, k_min + width, trials, g.seed);
      rederived_failures += rep.failures_where(false);
      for (const auto& f : rep.failures) {
        failures.push_back(io::Json{{"formula", f.formula},
                                    {"k_min", f.k_min},
                                    {"trial", f.trial},
                                    {"expected", f.expected},
                                    {"got", f.got}});
      }
      for (const auto& t : rep.tallies) {
        if (t.as_printed && t.formula == "first-imag-part/squared-B") variant_failures += t.failures;
        tallies.push_back(io::Json{{"formula", t.formula},
                                   {"as_printed", t.as_printed},
                                   {"k_min", k_min},
                                   {"width", width},
                                   {"checks", t.checks},
                                   {"failures", t.failures}});
      }
    }
  }
  emit(g, io::dump(io::Json{{"summary",
                             {{"rederived_failures", rederived_failures},
                              {"squared_B_variant_failures", variant_failures}}},
                            {"tallies", tallies},
                            {"failures", failures}}));
  return rederived_failures == 0 && variant_failures > 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval of Gaussian shift-invariant signals from phaseless Hermite samples"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::optional<int> k_max;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--lambda", g.lambda, "Gaussian width parameter")->check(CLI::PositiveNumber);
  app.add_option("--beta", g.beta, "lattice step")->check(CLI::PositiveNumber);
  app.add_option("--kmin", g.k_min, "first lattice index of the support window");
  app.add_option("--kmax", k_max, "last lattice index (defaults from the input)");
  app.add_option("--tol-imag", g.tol_imag, "relative threshold for a nonzero imaginary part")
      ->check(CLI::PositiveNumber);
  app.add_option("--oversample", g.oversample, "sample count factor over 2N+1")
      ->check(CLI::Range(1.0, 1e6));
  app.add_flag("--strict", g.strict, "exit 3 when the moment system is ill conditioned");
  app.add_option("--out", g.out, "write output to FILE instead of standard output");

  auto* synth = app.add_subcommand("synth", "random signal as JSON");
  int width = 1;
  synth->add_option("-n,--width", width, "K_+ - K_- when --kmax is not given")
      ->check(CLI::NonNegativeNumber);

  auto* sample = app.add_subcommand("sample", "phaseless Hermite samples of a signal");
  std::string signal_path, gammas;
  double noise = 0.0;
  sample->add_option("signal", signal_path, "signal JSON")->required();
  sample->add_option("--gammas", gammas, "comma-separated sample points");
  sample->add_option("--noise", noise, "standard deviation of additive magnitude noise");

  auto* rec = app.add_subcommand("reconstruct", "recover a signal from samples");
  std::string samples_path;
  bool no_refine = false;
  rec->add_option("samples", samples_path, "sample set JSON")->required();
  rec->add_flag("--no-refine", no_refine, "skip the least-squares polish");

  auto* verify = app.add_subcommand("verify", "distance between two signals modulo phase and conjugation");
  std::string file_a, file_b;
  double threshold = 1e-6;
  verify->add_option("first", file_a, "signal or reconstruction JSON")->required();
  verify->add_option("second", file_b, "signal or reconstruction JSON")->required();
  verify->add_option("--threshold", threshold, "largest distance that counts as equivalent");

  auto* exp = app.add_subcommand("experiment", "batch round trips as CSV");
  tools::ExperimentConfig cfg;
  std::string noise_list;
  exp->add_option("--trials", cfg.trials, "trials per (N, noise) pair")->check(CLI::PositiveNumber);
  exp->add_option("--n-min", cfg.n_min, "smallest K_+ - K_-");
  exp->add_option("--n-max", cfg.n_max, "largest K_+ - K_-");
  exp->add_option("--noise", noise_list, "comma-separated noise levels");
  exp->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
  exp->add_flag("--no-refine", [&cfg](std::int64_t) { cfg.refine = false; },
                "skip the least-squares polish");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "check every recursion step against direct expansion");
  int oracle_trials = 1000;
  oracle_cmd->add_option("--trials", oracle_trials, "trials per window")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  g.k_max = k_max;

  try {
    if (*synth) return cmd_synth(g, width);
    if (*sample) return cmd_sample(g, signal_path, gammas, noise);
    if (*rec) return cmd_reconstruct(g, samples_path, no_refine);
    if (*verify) return cmd_verify(g, file_a, file_b, threshold);
    if (*exp) return cmd_experiment(g, cfg, noise_list);
    if (*oracle_cmd) return cmd_oracle_check(g, oracle_trials);
  } catch (const Error& e) {
    std::cerr << "gsis: " << e.what() << "\n";
    const bool data_error =
        e.kind() == ErrorKind::InconsistentData || e.kind() == ErrorKind::NegativeModulus ||
        e.kind() == ErrorKind::InsufficientSamples;
    return *rec && data_error ? kDataError : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "gsis: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
