// Command line front end: pilots, run, roc, rrmse, se.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hetnet/amp_core.hpp"
#include "hetnet/harness.hpp"
#include "hetnet/pilotgen.hpp"

namespace {

using namespace hetnet;

struct SpecArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<int> workers;
};

void add_spec_options(CLI::App* cmd, SpecArgs& a) {
  cmd->add_option("-c,--config", a.config, "key = value experiment file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", a.overrides, "override a config key, e.g. --set base.L=128 (repeatable)");
  cmd->add_option("--trials", a.trials, "Monte Carlo trials per sweep point");
  cmd->add_option("--seed", a.seed, "base seed (beats HETNET_AMP_SEED)");
  cmd->add_option("-o,--output", a.output, "output directory");
  cmd->add_option("--workers", a.workers, "worker threads (0 = all cores)");
}

// File values, then --set overrides, then HETNET_AMP_SEED, then dedicated flags.
ExperimentSpec build_spec(const SpecArgs& a) {
  KeyValues kv = a.config.empty() ? KeyValues{} : read_key_values(a.config);
  for (const auto& o : a.overrides) apply_override(kv, o);
  if (auto env = seed_from_env()) kv["base.seed"] = std::to_string(*env);
  if (a.seed) kv["base.seed"] = std::to_string(*a.seed);
  if (a.trials) kv["trials"] = std::to_string(*a.trials);
  if (a.output) kv["output_path"] = *a.output;
  if (a.workers) kv["workers"] = std::to_string(*a.workers);
  return spec_from_key_values(kv);
}

std::vector<PointResult> load_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scores file " + path);
  return read_scores_csv(in);
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

void print_pilot_summary(const PilotSet& set, std::optional<CollisionBound> bound) {
  const int N = set.devices();
  double norm_dev = 0.0;
  double leak = 0.0;
  for (int n = 0; n < N; ++n) {
    norm_dev = std::max(norm_dev, std::abs(set.mtc_pilots.col(n).norm() - 1.0));
    leak = std::max(leak, std::abs(set.embb_pilot.dot(set.mtc_pilots.col(n))));
  }
  const CMatrix gram = set.mtc_pilots.adjoint() * set.mtc_pilots;
  double off_sum = 0.0;
  double off_max = 0.0;
  long identical = 0;
  long orthogonal = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double g = std::abs(gram(i, j));
      off_sum += g * g;
      off_max = std::max(off_max, g);
      if (g > 1.0 - 1e-9) ++identical;
      if (g < 1e-12) ++orthogonal;
    }
  }
  const double pairs = N > 1 ? 0.5 * N * (N - 1) : 1.0;
  std::cout << "strategy: " << to_string(set.strategy) << "\n"
            << "L: " << set.length() << "\n"
            << "N: " << N << "\n";
  if (set.embb_basis_index) std::cout << "embb_basis_index: " << *set.embb_basis_index << "\n";
  if (bound) std::cout << "subset_size_z: " << bound->z << "\n" << "combinations: " << format_number(bound->combinations) << "\n";
  std::cout << "max_norm_deviation: " << format_number(norm_dev) << "\n"
            << "max_embb_leakage: " << format_number(leak) << "\n"
            << "gram_offdiag_mean_sq: " << format_number(off_sum / pairs) << "\n"
            << "gram_offdiag_max: " << format_number(off_max) << "\n"
            << "orthogonal_pairs: " << orthogonal << "\n"
            << "identical_pairs: " << identical << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint activity detection and channel estimation of MTC devices sharing a resource with an eMBB user"};
  app.require_subcommand(1);

  // pilots
  auto* pilots_cmd = app.add_subcommand("pilots", "generate one pilot set and print Gram-matrix statistics");
  std::string strategy_name = "ProposedI";
  int L = 64, N = 200, embb_index = 0;
  double xi = 1e-3;
  std::uint64_t pilot_seed = 1;
  pilots_cmd->add_option("--strategy", strategy_name, "ProposedI, ProposedII or Bernoulli");
  pilots_cmd->add_option("--L", L, "pilot length");
  pilots_cmd->add_option("--N", N, "number of MTC devices");
  pilots_cmd->add_option("--xi", xi, "collision probability bound (ProposedI)");
  pilots_cmd->add_option("--embb-index", embb_index, "basis column reserved for the eMBB user");
  pilots_cmd->add_option("--seed", pilot_seed, "seed of the pilot stream");

  // run
  SpecArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "execute an experiment and write roc.csv, rrmse.csv, scores.csv");
  add_spec_options(run_cmd, run_args);

  // roc / rrmse
  std::string scores_path, out_path;
  int roc_points = 200;
  double pmd_target = 0.2;
  auto* roc_cmd = app.add_subcommand("roc", "re-derive the ROC CSV from a stored scores.csv");
  roc_cmd->add_option("--scores", scores_path, "scores.csv written by run")->required()->check(CLI::ExistingFile);
  roc_cmd->add_option("-o,--out", out_path, "output CSV (default stdout)");
  roc_cmd->add_option("--points", roc_points, "threshold grid size");
  auto* rrmse_cmd = app.add_subcommand("rrmse", "re-derive the RRMSE CSV from a stored scores.csv");
  rrmse_cmd->add_option("--scores", scores_path, "scores.csv written by run")->required()->check(CLI::ExistingFile);
  rrmse_cmd->add_option("-o,--out", out_path, "output CSV (default stdout)");
  rrmse_cmd->add_option("--pmd-target", pmd_target, "operating point: largest threshold with PMD <= target");

  // se
  SpecArgs se_args;
  int se_samples = 100000, se_steps = 50;
  double se_tol = 1e-6;
  auto* se_cmd = app.add_subcommand("se", "iterate the scalar state evolution and print the tau2 trajectory");
  add_spec_options(se_cmd, se_args);
  se_cmd->add_option("--samples", se_samples, "Monte Carlo draws for the expectation");
  se_cmd->add_option("--steps", se_steps, "maximum number of steps");
  se_cmd->add_option("--tol", se_tol, "stop when |tau2_{t+1} - tau2_t| < tol");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pilots_cmd) {
      const PilotStrategy strategy = parse_strategy(strategy_name);
      Rng rng = seed_stream(pilot_seed, 0, StreamTag::Pilots);
      std::optional<CollisionBound> bound;
      if (strategy == PilotStrategy::ProposedI) bound = min_subset_size(L, xi);
      const PilotSet set = generate_pilots(strategy, orthogonal_basis(L), embb_index, N, xi, rng);
      print_pilot_summary(set, bound);
    } else if (*run_cmd) {
      const ExperimentSpec spec = build_spec(run_args);
      const ExperimentFiles files = run_experiment(spec);
      std::cout << "wrote " << files.roc.string() << "\n" << "wrote " << files.rrmse.string() << "\n";
      if (!files.scores.empty()) std::cout << "wrote " << files.scores.string() << "\n";
    } else if (*roc_cmd) {
      const auto results = load_scores(scores_path);
      emit(out_path, [&](std::ostream& os) { write_roc_csv(os, results, roc_points); });
    } else if (*rrmse_cmd) {
      const auto results = load_scores(scores_path);
      emit(out_path, [&](std::ostream& os) { write_rrmse_csv(os, results, pmd_target); });
    } else if (*se_cmd) {
      const ExperimentSpec spec = build_spec(se_args);
      for (const SweepPoint& p : expand_sweep(spec)) {
        const SeProblem problem = se_problem(p.cfg);
        const StateEvolutionSampler sampler(se_samples, problem, seed_stream(p.cfg.seed, 0, StreamTag::SeSampler));
        const auto traj = state_evolution_trajectory(problem.initial_tau2(), problem, sampler, se_steps, se_tol);
        std::cout << "# L=" << p.cfg.L << " M=" << p.cfg.M << " N=" << p.cfg.N << " eps=" << format_number(p.cfg.eps)
                  << " noise_var=" << format_number(problem.noise_var) << "\n"
                  << "t,tau2\n";
        for (std::size_t t = 0; t < traj.size(); ++t) std::cout << t << ',' << format_number(traj[t]) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
