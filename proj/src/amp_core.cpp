#include "hetnet/amp_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hetnet {

void DenoiserParams::validate() const {
  if (!(tau2 > 0.0)) throw std::invalid_argument("denoiser state tau2 must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("denoiser prior eps must lie in (0, 1)");
  if (!(beta > 0.0)) throw std::invalid_argument("denoiser path loss beta must be > 0");
  if (M < 1) throw std::invalid_argument("denoiser dimension M must be >= 1");
}

namespace {

// No validation: the state evolution also calls this with eps = 0, where the
// log prior odds are +inf and the gain correctly collapses to zero.
Shrinkage shrinkage_unchecked(double r, double beta, double eps, double tau2, int M) {
  const double linear = beta / (beta + tau2);
  // 1/tau2 - 1/(beta+tau2) written without cancellation.
  const double slope = beta / (tau2 * (beta + tau2));
  const double log_odds = std::log1p(-eps) - std::log(eps) + M * std::log1p(beta / tau2) - slope * r;

  // active = 1 / (1 + exp(log_odds)), inactive = 1 - active.
  double active;
  double inactive;
  if (log_odds > 0.0) {
    const double e = std::exp(-log_odds);
    active = e / (1.0 + e);
    inactive = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(log_odds);
    active = 1.0 / (1.0 + e);
    inactive = e / (1.0 + e);
  }

  Shrinkage s;
  s.gain = linear * active;
  // g'(r) = linear * slope * active * inactive.
  s.trace = s.gain + linear * slope * active * inactive * r / M;
  return s;
}

void check_input(const CVector& x, const DenoiserParams& p) {
  p.validate();
  if (x.size() != p.M)
    throw DimensionMismatch("denoiser input has length " + std::to_string(x.size()) + ", expected M = " +
                            std::to_string(p.M));
  if (!x.allFinite()) throw std::domain_error("denoiser input contains non-finite entries");
}

}  // namespace

Shrinkage shrinkage(double squared_norm, const DenoiserParams& p) {
  p.validate();
  return shrinkage_unchecked(squared_norm, p.beta, p.eps, p.tau2, p.M);
}

CVector denoise(const CVector& x, const DenoiserParams& p) {
  check_input(x, p);
  return shrinkage_unchecked(x.squaredNorm(), p.beta, p.eps, p.tau2, p.M).gain * x;
}

double denoise_jacobian_trace(const CVector& x, const DenoiserParams& p) {
  check_input(x, p);
  return shrinkage_unchecked(x.squaredNorm(), p.beta, p.eps, p.tau2, p.M).trace;
}

// ---------------------------------------------------------------------------
// State evolution

double SeProblem::mean_beta() const {
  if (betas.empty()) throw std::invalid_argument("state evolution needs at least one path loss");
  return std::accumulate(betas.begin(), betas.end(), 0.0) / static_cast<double>(betas.size());
}

double SeProblem::initial_tau2() const {
  return noise_var + static_cast<double>(N) / L * eps * mean_beta();
}

SeProblem se_problem(const SystemConfig& cfg) { return se_problem(cfg, cfg.noise_var()); }

SeProblem se_problem(const SystemConfig& cfg, double noise_var) {
  SeProblem p;
  p.noise_var = noise_var;
  p.N = cfg.N;
  p.L = cfg.L;
  p.M = cfg.M;
  p.eps = cfg.eps;
  p.betas = cfg.path_losses();
  return p;
}

StateEvolutionSampler::StateEvolutionSampler(int num_samples, const SeProblem& problem, Rng rng)
    : num_samples_(num_samples), M_(problem.M), eps_(problem.eps) {
  if (num_samples < 1) throw std::invalid_argument("state evolution needs at least one sample");
  if (problem.M < 1) throw std::invalid_argument("state evolution needs M >= 1");
  if (!(problem.eps >= 0.0 && problem.eps < 1.0))
    throw std::invalid_argument("state evolution prior eps must lie in [0, 1)");
  if (problem.betas.empty()) throw std::invalid_argument("state evolution needs at least one path loss");

  const bool homogeneous = std::all_of(problem.betas.begin(), problem.betas.end(),
                                       [&](double b) { return b == problem.betas.front(); });
  sample_beta_.resize(num_samples);
  active_.resize(num_samples);
  signal_ = CMatrix::Zero(M_, num_samples);
  noise_.resize(M_, num_samples);
  for (int k = 0; k < num_samples; ++k) {
    sample_beta_[k] =
        homogeneous ? problem.betas.front() : problem.betas[rng.uniform_index(problem.betas.size())];
    active_[k] = rng.bernoulli(problem.eps) ? 1 : 0;
    if (active_[k] != 0)
      for (int m = 0; m < M_; ++m) signal_(m, k) = rng.complex_normal(sample_beta_[k]);
    for (int m = 0; m < M_; ++m) noise_(m, k) = rng.complex_normal(1.0);
  }
}

double StateEvolutionSampler::mse_per_entry(double tau2) const {
  if (!(tau2 > 0.0)) throw std::invalid_argument("state evolution tau2 must be > 0");
  const double tau = std::sqrt(tau2);
  double total = 0.0;
  CVector observed(M_);
  for (int k = 0; k < num_samples_; ++k) {
    observed = signal_.col(k) + tau * noise_.col(k);
    const double g = shrinkage_unchecked(observed.squaredNorm(), sample_beta_[k], eps_, tau2, M_).gain;
    total += (g * observed - signal_.col(k)).squaredNorm();
  }
  return total / (static_cast<double>(num_samples_) * M_);
}

double state_evolution_step(double tau2, const SeProblem& problem, const StateEvolutionSampler& sampler) {
  const double mse = sampler.mse_per_entry(std::max(tau2, kTau2Floor));
  const double next = problem.noise_var + static_cast<double>(problem.N) / problem.L * mse;
  return std::max(next, kTau2Floor);
}

std::vector<double> state_evolution_trajectory(double tau2_0, const SeProblem& problem,
                                               const StateEvolutionSampler& sampler, int max_steps,
                                               double tol) {
  std::vector<double> traj{std::max(tau2_0, kTau2Floor)};
  for (int t = 0; t < max_steps; ++t) {
    const double next = state_evolution_step(traj.back(), problem, sampler);
    const double change = std::abs(next - traj.back());
    traj.push_back(next);
    if (change < tol) break;
  }
  return traj;
}

// ---------------------------------------------------------------------------
// AMP

AmpOutcome amp_run(const CleanedSignal& cleaned, const CMatrix& pilots, const std::vector<double>& betas,
                   double eps, const AmpOptions& options) {
  const CMatrix& y = cleaned.y_breve;
  const auto L = pilots.rows();
  const auto N = pilots.cols();
  const auto M = y.cols();
  if (y.rows() != L) throw DimensionMismatch("cleaned signal and pilot matrix disagree on L");
  if (static_cast<Eigen::Index>(betas.size()) != N) throw DimensionMismatch("need one path loss per device");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("activity prior eps must lie in (0, 1)");
  if (options.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (options.mode == StateMode::Analytic && options.tau2_schedule.empty())
    throw std::invalid_argument("analytic state mode needs a tau2 schedule");

  const CMatrix pilots_h = pilots.adjoint();
  const double load = static_cast<double>(N) / static_cast<double>(L);

  AmpState st;
  st.x_hat = CMatrix::Zero(N, M);
  st.residual = y;
  CMatrix pseudo(N, M);
  CMatrix next_residual(L, M);

  for (int t = 0; t < options.max_iters; ++t) {
    if (options.mode == StateMode::Empirical) {
      st.tau2 = st.residual.squaredNorm() / static_cast<double>(L * M);
    } else {
      const auto idx = std::min<std::size_t>(t, options.tau2_schedule.size() - 1);
      st.tau2 = options.tau2_schedule[idx];
    }
    st.tau2 = std::max(st.tau2, kTau2Floor);

    pseudo.noalias() = pilots_h * st.residual;
    pseudo += st.x_hat;

    double trace_sum = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
      const Shrinkage s =
          shrinkage_unchecked(pseudo.row(n).squaredNorm(), betas[n], eps, st.tau2, static_cast<int>(M));
      st.x_hat.row(n) = s.gain * pseudo.row(n);
      trace_sum += s.trace;
    }
    const double onsager = load * trace_sum / static_cast<double>(N);

    next_residual = y;
    next_residual.noalias() -= pilots * st.x_hat;
    next_residual += onsager * st.residual;

    st.residual_delta = (next_residual - st.residual).norm();
    st.residual.swap(next_residual);
    st.iter = t + 1;
    if (!std::isfinite(st.residual_delta)) break;
    if (st.residual_delta < options.delta) {
      st.converged = true;
      break;
    }
  }

  AmpOutcome out;
  out.scores = st.x_hat.rowwise().norm();
  out.state = std::move(st);
  return out;
}

AmpOutcome amp_run(const CleanedSignal& cleaned, const PilotSet& pilots, const SystemConfig& cfg,
                   StateMode mode, const StateEvolutionSampler* sampler) {
  AmpOptions options;
  options.mode = mode;
  options.delta = cfg.delta;
  options.max_iters = cfg.max_iters;
  if (mode == StateMode::Analytic) {
    if (sampler == nullptr) throw std::invalid_argument("analytic state mode needs a state evolution sampler");
    const SeProblem problem = se_problem(cfg, cleaned.noise_var);
    options.tau2_schedule = state_evolution_trajectory(problem.initial_tau2(), problem, *sampler, cfg.max_iters, 0.0);
  }
  return amp_run(cleaned, pilots.mtc_pilots, cfg.path_losses(), cfg.eps, options);
}

BinaryVector detect(const RVector& scores, double zeta) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("detection threshold must be >= 0");
  BinaryVector d(scores.size());
  for (Eigen::Index n = 0; n < scores.size(); ++n) d[n] = scores(n) >= zeta ? 1 : 0;
  return d;
}

DetectionResult detect(const AmpOutcome& outcome, double zeta) {
  DetectionResult r;
  r.scores = outcome.scores;
  r.decisions = detect(outcome.scores, zeta);
  r.x_hat = outcome.state.x_hat;
  r.iters_used = outcome.state.iter;
  r.converged = outcome.state.converged;
  return r;
}

}  // namespace hetnet
