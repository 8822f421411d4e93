#pragma once

#include <vector>

#include "hetnet/embb_sic.hpp"
#include "hetnet/pilotgen.hpp"
#include "hetnet/rng.hpp"
#include "hetnet/sysmodel.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Lower bound applied to the AMP state so noiseless problems never divide by zero.
inline constexpr double kTau2Floor = 1e-15;

// Parameters of the MMSE vector denoiser for one device, with state Sigma = tau2 * I.
struct DenoiserParams {
  double beta = 1.0;  // path loss of the device
  double eps = 0.05;  // activity prior
  double tau2 = 1.0;  // effective noise variance per entry
  int M = 1;          // vector dimension

  void validate() const;
};

// eta(x) = g(|x|^2) x with
//   g(r) = [beta/(beta+tau2)] / (1 + ((1-eps)/eps) (1+beta/tau2)^M exp(-(1/tau2 - 1/(beta+tau2)) r)).
// g is the linear shrinkage times the posterior activity probability; both
// are evaluated in the log domain.
CVector denoise(const CVector& x, const DenoiserParams& p);

// (1/M) tr(d eta / dx) with the Wirtinger derivative, which for this
// radial denoiser equals (1/2M) times the real divergence over Re/Im parts:
//   g(r) + g'(r) r / M.
double denoise_jacobian_trace(const CVector& x, const DenoiserParams& p);

// Gain g(r) and normalised Jacobian trace evaluated together from r = |x|^2.
struct Shrinkage {
  double gain = 0.0;
  double trace = 0.0;
};
Shrinkage shrinkage(double squared_norm, const DenoiserParams& p);

// Scalar state evolution problem:
//   tau2' = noise_var + (N/L) (1/M) E|eta(x + sqrt(tau2) s) - x|^2,
//   x ~ (1-eps) delta_0 + eps CN(0, beta I), s ~ CN(0, I).
struct SeProblem {
  double noise_var = 0.0;
  int N = 0;
  int L = 0;
  int M = 0;
  double eps = 0.0;
  std::vector<double> betas;  // path-loss distribution the expectation averages over

  double mean_beta() const;
  // Start of the recursion: the zero estimate has per-entry MSE eps * mean(beta).
  double initial_tau2() const;
};

SeProblem se_problem(const SystemConfig& cfg);
// Same as above but with an explicit noise floor, e.g. a CleanedSignal's.
SeProblem se_problem(const SystemConfig& cfg, double noise_var);

// Monte Carlo estimator of the expectation in the state evolution. The draws
// (x, s) are made once at construction and reused for every tau2, so the
// estimated map tau2 -> MSE is a deterministic function.
class StateEvolutionSampler {
 public:
  StateEvolutionSampler(int num_samples, const SeProblem& problem, Rng rng);

  int num_samples() const { return num_samples_; }

  // (1/M) E|eta(x + sqrt(tau2) s) - x|^2 over the stored draws.
  double mse_per_entry(double tau2) const;

 private:
  int num_samples_;
  int M_;
  double eps_;
  std::vector<double> sample_beta_;  // beta of the device each sample represents
  BinaryVector active_;
  CMatrix signal_;  // M x num_samples, zero columns for inactive samples
  CMatrix noise_;   // M x num_samples
};

double state_evolution_step(double tau2, const SeProblem& problem, const StateEvolutionSampler& sampler);

// tau2_0, tau2_1, ... until |tau2_{t+1} - tau2_t| < tol or max_steps steps.
std::vector<double> state_evolution_trajectory(double tau2_0, const SeProblem& problem,
                                               const StateEvolutionSampler& sampler, int max_steps,
                                               double tol);

enum class StateMode { Empirical, Analytic };

struct AmpOptions {
  StateMode mode = StateMode::Empirical;
  double delta = 1e-4;
  int max_iters = 50;
  // Analytic mode: tau2 used at iteration t is schedule[min(t, size-1)].
  std::vector<double> tau2_schedule;
};

struct AmpState {
  CMatrix x_hat;     // N x M
  CMatrix residual;  // L x M
  double tau2 = 0.0;
  int iter = 0;
  double residual_delta = 0.0;  // |R^{t+1} - R^t|_F of the last iteration
  bool converged = false;
};

struct AmpOutcome {
  AmpState state;
  RVector scores;  // |x_hat_n|_2
};

struct DetectionResult {
  RVector scores;
  BinaryVector decisions;
  CMatrix x_hat;
  int iters_used = 0;
  bool converged = false;
};

// MMV-AMP on Y_breve = A X + W_eq:
//   x_hat^{t+1} = eta_n(A^H R^t + x_hat^t)         (row-wise)
//   R^{t+1}     = Y_breve - A x_hat^{t+1} + (N/L) <eta'> R^t
// with <eta'> the device average of the normalised Jacobian trace. Stops when
// |R^{t+1} - R^t|_F < delta or after max_iters; non-convergence is reported in
// the state, not thrown.
AmpOutcome amp_run(const CleanedSignal& cleaned, const CMatrix& pilots, const std::vector<double>& betas,
                   double eps, const AmpOptions& options);

// Convenience wrapper that takes delta, max_iters and path losses from cfg. In
// Analytic mode the tau2 schedule is the state evolution started from
// cleaned.noise_var + (N/L) eps mean(beta), evaluated with the sampler.
AmpOutcome amp_run(const CleanedSignal& cleaned, const PilotSet& pilots, const SystemConfig& cfg,
                   StateMode mode, const StateEvolutionSampler* sampler = nullptr);

// decision_n = 1 iff scores_n >= zeta.
BinaryVector detect(const RVector& scores, double zeta);

DetectionResult detect(const AmpOutcome& outcome, double zeta);

}  // namespace hetnet
