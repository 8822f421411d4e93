#include "hetnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "hetnet/embb_sic.hpp"

namespace hetnet {

TrialRecord run_trial(const SweepPoint& point, const PilotBasis& basis, const TrialOptions& options, int trial) {
  const SystemConfig& cfg = point.cfg;
  const auto t = static_cast<std::uint64_t>(trial);

  Rng pilot_rng = seed_stream(options.seed, options.fixed_pilots ? 0 : t, StreamTag::Pilots);
  const PilotSet pilots = generate_pilots(point.strategy, basis, options.embb_index, cfg.N, cfg.xi, pilot_rng);

  BinaryVector alpha;
  if (options.force_active.empty()) {
    Rng activity_rng = seed_stream(options.seed, t, StreamTag::Activity);
    alpha = sample_activity(cfg.N, cfg.eps, activity_rng);
  } else {
    alpha.assign(cfg.N, 0);
    for (int n : options.force_active) alpha.at(n) = 1;
  }
  Rng channel_rng = seed_stream(options.seed, t, StreamTag::Channels);
  const Channels channels = sample_channels(cfg, channel_rng);
  Rng noise_rng = seed_stream(options.seed, t, StreamTag::Noise);
  const CMatrix noise = sample_noise(cfg.L, cfg.M, cfg.sigma2, noise_rng);

  const ScenarioRealization scenario = synthesize(pilots, alpha, channels, noise, cfg);
  const CMatrix y = normalize(scenario.Y, cfg);
  const double noise_var = cfg.noise_var();

  const EmbbEstimate est = point.csi == CsiMode::Perfect
                               ? perfect_estimate(scenario.h_e)
                               : mmse_estimate(correlate(y, pilots.embb_pilot), cfg.beta_e, noise_var);
  const CleanedSignal cleaned = sic(y, pilots.embb_pilot, est, noise_var);

  AmpOptions amp;
  amp.mode = options.amp_mode;
  amp.delta = cfg.delta;
  amp.max_iters = cfg.max_iters;
  amp.tau2_schedule = options.tau2_schedule;
  const AmpOutcome outcome = amp_run(cleaned, pilots.mtc_pilots, cfg.path_losses(), cfg.eps, amp);

  TrialRecord rec;
  rec.scores.assign(outcome.scores.data(), outcome.scores.data() + outcome.scores.size());
  rec.truth = alpha;
  rec.mtc_error.resize(cfg.N);
  rec.mtc_energy.resize(cfg.N);
  for (int n = 0; n < cfg.N; ++n) {
    rec.mtc_error[n] = (outcome.state.x_hat.row(n) - scenario.X.row(n)).squaredNorm();
    rec.mtc_energy[n] = scenario.X.row(n).squaredNorm();
  }
  rec.embb_error = (est.h_hat - scenario.h_e).squaredNorm();
  rec.embb_energy = scenario.h_e.squaredNorm();
  rec.iterations = outcome.state.iter;
  rec.converged = outcome.state.converged;
  return rec;
}

std::vector<TrialScores> PointResult::trial_scores() const {
  std::vector<TrialScores> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back({t.scores, t.truth});
  return out;
}

RrmseSummary rrmse_at_pmd(const PointResult& result, double pmd_target) {
  RrmseSummary s;
  const auto scores = result.trial_scores();
  s.threshold = threshold_for_pmd(scores, pmd_target);
  for (const auto& t : result.trials) {
    s.embb.add(t.embb_error, t.embb_energy);
    for (std::size_t n = 0; n < t.scores.size(); ++n)
      if (t.truth[n] != 0 && t.scores[n] >= s.threshold) s.mtc.add(t.mtc_error[n], t.mtc_energy[n]);
  }
  s.embb.trials = s.mtc.trials = result.trials.size();
  return s;
}

PointResult run_point(const SweepPoint& point, const ExperimentSpec& spec) {
  point.cfg.validate();
  const PilotBasis basis = orthogonal_basis(point.cfg.L);

  TrialOptions options;
  options.seed = point.cfg.seed;
  options.fixed_pilots = spec.fixed_pilots;
  options.embb_index = spec.embb_index;
  options.amp_mode = spec.amp_mode;
  options.force_active = spec.force_active;
  if (spec.amp_mode == StateMode::Analytic) {
    // The eMBB residual variance c_e is the same in every trial, so one schedule serves the point.
    const double nv = point.cfg.noise_var();
    const double ce = point.csi == CsiMode::Perfect ? 0.0 : point.cfg.beta_e * nv / (point.cfg.beta_e + nv);
    const SeProblem problem = se_problem(point.cfg, nv + ce / point.cfg.L);
    const StateEvolutionSampler sampler(spec.se_samples, problem, seed_stream(point.cfg.seed, 0, StreamTag::SeSampler));
    options.tau2_schedule =
        state_evolution_trajectory(problem.initial_tau2(), problem, sampler, point.cfg.max_iters, 0.0);
  }

  PointResult result;
  result.point = point;
  result.trials.resize(spec.trials);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::clamp(spec.workers > 0 ? spec.workers : static_cast<int>(hw), 1, spec.trials);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int k = next++; k < spec.trials; k = next++) {
      try {
        result.trials[k] = run_trial(point, basis, options, k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = spec.trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::vector<PointResult> run_campaign(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<PointResult> results;
  for (const SweepPoint& p : expand_sweep(spec)) {
    try {
      results.push_back(run_point(p, spec));
    } catch (const InfeasibleCollisionBound& e) {
      throw InfeasibleCollisionBound("sweep point " + p.label() + ": " + e.what());
    }
  }
  return results;
}

ExperimentFiles run_experiment(const ExperimentSpec& spec) {
  const auto results = run_campaign(spec);
  const std::filesystem::path dir(spec.output_path);
  std::filesystem::create_directories(dir);

  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };

  ExperimentFiles files{dir / "roc.csv", dir / "rrmse.csv", {}};
  {
    auto out = open(files.roc);
    write_roc_csv(out, results, spec.roc_points);
  }
  {
    auto out = open(files.rrmse);
    write_rrmse_csv(out, results, spec.pmd_target);
  }
  if (spec.write_scores) {
    files.scores = dir / "scores.csv";
    auto out = open(files.scores);
    write_scores_csv(out, results);
  }
  return files;
}

}  // namespace hetnet
