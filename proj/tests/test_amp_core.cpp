#include <cmath>
#include <random>

#include "doctest.h"
#include "hetnet/amp_core.hpp"
#include "oracles.hpp"

using namespace hetnet;

namespace {

CVector random_cvector(int M, double var, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * var));
  CVector x(M);
  for (int m = 0; m < M; ++m) x(m) = Complex(g(gen), g(gen));
  return x;
}

// (1/2M) sum_k d Re(eta_k)/d Re(x_k) + d Im(eta_k)/d Im(x_k), five-point stencil.
double fd_normalised_divergence(const CVector& x, const DenoiserParams& p, double h) {
  double div = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    for (Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
      auto f = [&](double s) {
        CVector y = x;
        y(k) += s * dir;
        const Complex v = denoise(y, p)(k);
        return dir.real() != 0.0 ? v.real() : v.imag();
      };
      div += (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
    }
  }
  return div / (2.0 * x.size());
}

// Noiseless K=1 problem with orthonormal MTC pilots taken from a Hadamard basis.
struct OrthoProblem {
  CMatrix A;
  CMatrix X;
  CleanedSignal cleaned;
};

OrthoProblem ortho_problem(int L, int N, int M, int active, std::uint64_t seed) {
  const PilotBasis basis = orthogonal_basis(L);
  OrthoProblem p;
  p.A = basis.V.middleCols(1, N);
  p.X = CMatrix::Zero(N, M);
  Rng rng(seed);
  for (int m = 0; m < M; ++m) p.X(active, m) = rng.complex_normal(1.0);
  p.cleaned.y_breve = p.A * p.X;
  p.cleaned.noise_var = 0.0;
  return p;
}

}  // namespace

TEST_CASE("denoiser closed-form values") {
  const DenoiserParams p{1.0, 0.5, 1.0, 1};
  const CVector x = CVector::Constant(1, Complex(1.0, 0.0));
  const Complex v = denoise(x, p)(0);
  CHECK(v.real() == doctest::Approx(0.5 / (1.0 + 2.0 * std::exp(-0.5))).epsilon(1e-14));
  CHECK(v.real() == doctest::Approx(0.22593).epsilon(1e-4));
  CHECK(v.imag() == 0.0);

  for (int M : {1, 4, 20}) {
    const DenoiserParams q{2.0, 0.05, 0.3, M};
    CHECK(denoise(CVector::Zero(M), q).norm() == 0.0);
  }
}

TEST_CASE("denoiser linear asymptote") {
  for (int M : {1, 5, 20}) {
    for (double tau2 : {1e-3, 0.1, 2.0}) {
      const DenoiserParams p{1.5, 0.05, tau2, M};
      std::mt19937_64 gen(M);
      CVector x = random_cvector(M, 1.0, gen);
      x *= std::sqrt(1e3 * M * (p.beta + tau2)) / x.norm();
      const CVector lin = p.beta / (p.beta + tau2) * x;
      CHECK((denoise(x, p) - lin).norm() <= 1e-6 * lin.norm());
      CHECK(denoise_jacobian_trace(x, p) == doctest::Approx(p.beta / (p.beta + tau2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("denoiser shrinks and preserves direction") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const int M = 1 + static_cast<int>(u(gen) * 24);
    const DenoiserParams p{std::pow(10.0, -1 + 2 * u(gen)), 0.01 + 0.9 * u(gen), std::pow(10.0, -3 + 3 * u(gen)), M};
    const CVector x = random_cvector(M, std::pow(10.0, -2 + 4 * u(gen)), gen);
    const CVector y = denoise(x, p);
    REQUIRE(y.norm() <= p.beta / (p.beta + p.tau2) * x.norm() * (1 + 1e-15));
    // y = c x with c real and >= 0.
    const Complex c = x.dot(y) / x.squaredNorm();
    REQUIRE(c.real() >= 0.0);
    REQUIRE((y - c.real() * x).norm() <= 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("Jacobian trace matches central finite differences") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int Ms[] = {1, 2, 4, 8, 20};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int M = Ms[k % 5];
    const DenoiserParams p{std::pow(10.0, -1 + 2 * u(gen)), 0.01 + 0.5 * u(gen), std::pow(10.0, -2 + 2 * u(gen)), M};
    // Alternate between inactive-like and active-like inputs so the sigmoid
    // transition region is covered.
    const double var = (k % 2 == 0) ? p.tau2 * (1.0 + 2 * u(gen)) : p.beta + p.tau2;
    const CVector x = random_cvector(M, var, gen);
    const double h = 1e-4 * std::sqrt(p.tau2);
    const double fd = fd_normalised_divergence(x, p, h);
    const double analytic = denoise_jacobian_trace(x, p);
    const double rel = std::abs(fd - analytic) / std::abs(analytic);
    worst = std::max(worst, rel);
    CAPTURE(k);
    CHECK(rel <= 1e-5);
  }
  MESSAGE("worst relative deviation " << worst);
}

TEST_CASE("Jacobian trace at the origin") {
  for (int M : {1, 4}) {
    const DenoiserParams p{1.0, 0.1, 0.5, M};
    const double expected = (1.0 / 1.5) / (1.0 + 9.0 * std::pow(3.0, M));
    const CVector zero = CVector::Zero(M);
    CHECK(denoise_jacobian_trace(zero, p) == doctest::Approx(expected).epsilon(1e-12));
    // Central differences with step 1e-5.
    CHECK(fd_normalised_divergence(zero, p, 1e-5) == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("scalar denoiser is the posterior mean") {
  for (double beta : {0.5, 1.0, 3.0}) {
    for (double tau2 : {0.05, 0.3, 1.0}) {
      for (double eps : {0.05, 0.3}) {
        const DenoiserParams p{beta, eps, tau2, 1};
        for (Complex x : {Complex(0.0, 0.0), Complex(0.2, -0.1), Complex(0.6, 0.5), Complex(-1.2, 0.3), Complex(2.5, -1.0)}) {
          CAPTURE(beta);
          CAPTURE(tau2);
          CAPTURE(eps);
          CAPTURE(x);
          const Complex got = denoise(CVector::Constant(1, x), p)(0);
          CHECK(std::abs(got - oracle::posterior_mean_quadrature(x, beta, eps, tau2)) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("scalar denoiser against a Monte Carlo posterior mean") {
  const DenoiserParams p{1.0, 0.1, 0.4, 1};
  std::uint64_t seed = 1;
  for (Complex x : {Complex(0.0, 0.0), Complex(0.3, 0.2), Complex(0.8, -0.4), Complex(-1.5, 0.5), Complex(0.0, 2.2)}) {
    CAPTURE(x);
    const Complex mc = oracle::posterior_mean_mc(x, p.beta, p.eps, p.tau2, 1000000, seed++);
    CHECK(std::abs(denoise(CVector::Constant(1, x), p)(0) - mc) <= 1e-3);
  }
}

TEST_CASE("denoiser input validation") {
  const CVector x = CVector::Ones(2);
  CHECK_THROWS_AS(denoise(x, DenoiserParams{1.0, 0.05, 0.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(denoise(x, DenoiserParams{1.0, 0.05, -1.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(denoise(x, DenoiserParams{1.0, 1.0, 1.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(denoise(x, DenoiserParams{0.0, 0.05, 1.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(denoise(x, DenoiserParams{1.0, 0.05, 1.0, 3}), DimensionMismatch);
  CVector bad = x;
  bad(1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(denoise(bad, DenoiserParams{1.0, 0.05, 1.0, 2}), std::domain_error);
  CHECK_THROWS_AS(denoise_jacobian_trace(bad, DenoiserParams{1.0, 0.05, 1.0, 2}), std::domain_error);
  // Extreme states stay finite.
  const DenoiserParams tiny{1.0, 0.05, 1e-15, 20};
  const CVector x20 = CVector::Constant(20, Complex(1e-9, 0.0));
  CHECK(std::isfinite(denoise(x20, tiny).norm()));
  CHECK(std::isfinite(denoise_jacobian_trace(x20, tiny)));
}

TEST_CASE("state evolution degenerate priors") {
  SystemConfig cfg;
  SeProblem p = se_problem(cfg);
  p.eps = 1e-12;
  const StateEvolutionSampler s(20000, p, Rng(3));
  const auto traj = state_evolution_trajectory(p.initial_tau2(), p, s, 50, 1e-12);
  CHECK(traj.back() == doctest::Approx(cfg.noise_var()).epsilon(1e-6));

  SeProblem q = p;
  q.noise_var = 0.0;
  q.eps = 0.0;
  const StateEvolutionSampler s0(1000, q, Rng(4));
  CHECK(state_evolution_step(0.7, q, s0) == kTau2Floor);
  const auto t0 = state_evolution_trajectory(0.7, q, s0, 5, 0.0);
  CHECK(t0.back() == kTau2Floor);

  CHECK_THROWS_AS(StateEvolutionSampler(0, p, Rng(1)), std::invalid_argument);
}

TEST_CASE("state evolution from the standard configuration") {
  SystemConfig cfg;  // N=200, L=64, M=20, eps=0.05, 20 dB at L=64
  const SeProblem p = se_problem(cfg);
  CHECK(p.initial_tau2() == doctest::Approx(cfg.noise_var() + 200.0 / 64.0 * 0.05));
  const StateEvolutionSampler s(100000, p, seed_stream(cfg.seed, 0, StreamTag::SeSampler));
  const auto traj = state_evolution_trajectory(p.initial_tau2(), p, s, 50, 1e-6);
  for (std::size_t t = 1; t < traj.size(); ++t) CHECK(traj[t] <= traj[t - 1]);
  REQUIRE(traj.size() >= 2);
  CHECK(std::abs(traj.back() - traj[traj.size() - 2]) < 1e-6);
  CHECK(traj.size() <= 51);
  CHECK(traj.back() >= cfg.noise_var());
  MESSAGE("fixed point tau2 = " << traj.back() << " after " << traj.size() - 1 << " steps");
}

TEST_CASE("heterogeneous path losses in the sampler") {
  SeProblem p;
  p.noise_var = 0.01;
  p.N = 100;
  p.L = 50;
  p.M = 2;
  p.eps = 0.5;
  p.betas = {1.0, 4.0};
  CHECK(p.mean_beta() == doctest::Approx(2.5));
  const StateEvolutionSampler s(200000, p, Rng(9));
  // At a huge tau2 the denoiser returns ~0, so the MSE is eps * mean(beta).
  CHECK(s.mse_per_entry(1e8) == doctest::Approx(0.5 * 2.5).epsilon(0.02));
}

TEST_CASE("AMP recovers a single active device with orthogonal pilots") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int active = static_cast<int>(seed % 4);
    const OrthoProblem p = ortho_problem(8, 4, 6, active, seed);
    AmpOptions opt;
    const AmpOutcome out = amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.25, opt);
    CHECK(out.state.converged);
    const double rel = (out.state.x_hat.row(active) - p.X.row(active)).norm() / p.X.row(active).norm();
    CHECK(rel <= 1e-4);
    for (int n = 0; n < 4; ++n)
      if (n != active) CHECK(out.scores(n) <= 1e-6);
  }
}

TEST_CASE("AMP with nothing to detect exits after one iteration") {
  const OrthoProblem p = ortho_problem(8, 4, 3, 0, 1);
  CleanedSignal idle{CMatrix::Zero(8, 3), 0.0};
  const AmpOutcome out = amp_run(idle, p.A, std::vector<double>(4, 1.0), 0.1, AmpOptions{});
  CHECK(out.state.iter == 1);
  CHECK(out.state.converged);
  CHECK(out.state.x_hat.norm() == 0.0);
  CHECK(out.state.x_hat.rows() == 4);
  CHECK(out.state.residual.rows() == 8);
}

TEST_CASE("AMP decisions are invariant to a consistent rescaling") {
  // Y -> cY, beta -> c^2 beta, zeta -> c zeta; tau2 follows through the
  // empirical state and the absolute stopping tolerance scales with c.
  SystemConfig cfg;
  cfg.N = 60;
  cfg.L = 32;
  cfg.M = 4;
  cfg.eps = 0.1;
  Rng pr(1), ar(2), cr(3), nr(4);
  const PilotSet pilots = gen_bernoulli(cfg.L, cfg.N, pr);
  const auto alpha = sample_activity(cfg.N, cfg.eps, ar);
  const auto s = synthesize(pilots, alpha, sample_channels(cfg, cr), sample_noise(cfg.L, cfg.M, cfg.sigma2, nr), cfg);
  const CleanedSignal base{normalize(s.Y, cfg) - pilots.embb_pilot * s.h_e.transpose(), cfg.noise_var()};
  const double c = 3.0;
  const CleanedSignal scaled{c * base.y_breve, c * c * base.noise_var};
  AmpOptions scaled_opt;
  scaled_opt.delta = c * AmpOptions{}.delta;
  const AmpOutcome a = amp_run(base, pilots.mtc_pilots, std::vector<double>(cfg.N, 1.0), cfg.eps, AmpOptions{});
  const AmpOutcome b = amp_run(scaled, pilots.mtc_pilots, std::vector<double>(cfg.N, c * c), cfg.eps, scaled_opt);
  CHECK(a.state.iter == b.state.iter);
  for (double zeta : {0.1, 0.5, 1.0, 2.0}) CHECK(detect(a.scores, zeta) == detect(b.scores, c * zeta));
  CHECK((b.scores - c * a.scores).norm() <= 1e-9 * (1.0 + a.scores.norm()));
}

TEST_CASE("AMP analytic state mode and argument checks") {
  const OrthoProblem p = ortho_problem(8, 4, 2, 1, 5);
  AmpOptions opt;
  opt.mode = StateMode::Analytic;
  CHECK_THROWS_AS(amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.25, opt), std::invalid_argument);
  opt.tau2_schedule = {0.5, 0.1, 0.01, 1e-6, 1e-10};
  const AmpOutcome out = amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.25, opt);
  CHECK(out.state.tau2 == doctest::Approx(1e-10));
  CHECK(out.scores(1) > 0.5 * p.X.row(1).norm());

  CHECK_THROWS_AS(amp_run(p.cleaned, p.A, std::vector<double>(3, 1.0), 0.25, AmpOptions{}), DimensionMismatch);
  CHECK_THROWS_AS(amp_run(p.cleaned, p.A.topRows(7), std::vector<double>(4, 1.0), 0.25, AmpOptions{}), DimensionMismatch);
  CHECK_THROWS_AS(amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.0, AmpOptions{}), std::invalid_argument);
  AmpOptions zero_iters;
  zero_iters.max_iters = 0;
  CHECK_THROWS_AS(amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.25, zero_iters), std::invalid_argument);
}

TEST_CASE("AMP reports non-convergence instead of throwing") {
  const OrthoProblem p = ortho_problem(8, 4, 2, 1, 6);
  AmpOptions opt;
  opt.max_iters = 1;
  opt.delta = 1e-300;
  const AmpOutcome out = amp_run(p.cleaned, p.A, std::vector<double>(4, 1.0), 0.25, opt);
  CHECK(out.state.iter == 1);
  CHECK_FALSE(out.state.converged);
}

TEST_CASE("detect") {
  RVector s(2);
  s << 0.5, 0.1;
  CHECK(detect(s, 0.3) == BinaryVector{1, 0});
  CHECK(detect(s, 0.0) == BinaryVector{1, 1});
  CHECK(detect(s, 0.6) == BinaryVector{0, 0});
  CHECK(detect(s, 0.5) == BinaryVector{1, 0});
  CHECK_THROWS_AS(detect(s, -0.1), std::invalid_argument);

  AmpOutcome out;
  out.scores = s;
  out.state.iter = 7;
  const DetectionResult r = detect(out, 0.3);
  CHECK(r.iters_used == 7);
  CHECK(r.decisions == BinaryVector{1, 0});
}
