#include "hetnet/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hetnet {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid system config: " + what);
}

}  // namespace

void SystemConfig::validate() const {
  require(M >= 1, "M must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(L >= 2, "L must be >= 2");
  require(L < T, "pilot length L must be shorter than the coherence length T");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  require(rho_u > 0.0, "rho_u must be > 0");
  require(sigma2 >= 0.0 && std::isfinite(sigma2), "sigma2 must be finite and >= 0");
  require(beta_e > 0.0, "beta_e must be > 0");
  require(beta_default > 0.0, "beta_default must be > 0");
  require(beta.empty() || static_cast<int>(beta.size()) == N, "beta must be empty or have N entries");
  require(std::all_of(beta.begin(), beta.end(), [](double b) { return b > 0.0; }),
          "every path loss beta_n must be > 0");
  require(xi > 0.0 && xi < 1.0, "xi must lie in (0, 1)");
  require(delta > 0.0, "delta must be > 0");
  require(max_iters >= 1, "max_iters must be >= 1");
}

std::vector<double> SystemConfig::path_losses() const {
  if (!beta.empty()) return beta;
  return std::vector<double>(N, beta_default);
}

double SystemConfig::mean_beta() const {
  if (beta.empty()) return beta_default;
  return std::accumulate(beta.begin(), beta.end(), 0.0) / static_cast<double>(beta.size());
}

double SystemConfig::amplitude() const { return std::sqrt(L * rho_u); }

double SystemConfig::noise_var() const { return sigma2 / (L * rho_u); }

double sigma2_from_snr_db(double snr_db, int reference_L, double rho_u) {
  return reference_L * rho_u / std::pow(10.0, snr_db / 10.0);
}

int ScenarioRealization::active_count() const {
  return static_cast<int>(std::count(alpha.begin(), alpha.end(), std::uint8_t{1}));
}

BinaryVector sample_activity(int N, double eps, Rng& rng) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("activity probability must lie in (0, 1)");
  BinaryVector alpha(N);
  for (auto& a : alpha) a = rng.bernoulli(eps) ? 1 : 0;
  return alpha;
}

Channels sample_channels(const SystemConfig& cfg, Rng& rng) {
  Channels ch;
  ch.h_e.resize(cfg.M);
  for (int m = 0; m < cfg.M; ++m) ch.h_e(m) = rng.complex_normal(cfg.beta_e);
  ch.H.resize(cfg.N, cfg.M);
  for (int n = 0; n < cfg.N; ++n) {
    const double b = cfg.beta_of(n);
    for (int m = 0; m < cfg.M; ++m) ch.H(n, m) = rng.complex_normal(b);
  }
  return ch;
}

CMatrix sample_noise(int L, int M, double sigma2, Rng& rng) {
  CMatrix W(L, M);
  // Column-major fill so that each column w_m is one contiguous draw.
  for (int m = 0; m < M; ++m)
    for (int l = 0; l < L; ++l) W(l, m) = rng.complex_normal(sigma2);
  return W;
}

ScenarioRealization synthesize(const PilotSet& pilots, const BinaryVector& alpha,
                               const Channels& channels, const CMatrix& noise,
                               const SystemConfig& cfg) {
  const int L = pilots.length();
  const int N = pilots.devices();
  const auto M = channels.h_e.size();
  if (pilots.embb_pilot.size() != L) throw DimensionMismatch("eMBB pilot length differs from A's row count");
  if (static_cast<int>(alpha.size()) != N) throw DimensionMismatch("activity vector length differs from N");
  if (channels.H.rows() != N || channels.H.cols() != M)
    throw DimensionMismatch("MTC channel matrix must be N x M");
  if (noise.rows() != L || noise.cols() != M) throw DimensionMismatch("noise matrix must be L x M");
  if (L != cfg.L) throw DimensionMismatch("pilot length differs from cfg.L");

  ScenarioRealization s;
  s.alpha = alpha;
  s.h_e = channels.h_e;
  s.H = channels.H;
  s.X = CMatrix::Zero(N, M);
  for (int n = 0; n < N; ++n)
    if (alpha[n] != 0) s.X.row(n) = channels.H.row(n);
  s.W = noise;
  s.Y = cfg.amplitude() * (pilots.embb_pilot * s.h_e.transpose() + pilots.mtc_pilots * s.X) + noise;
  return s;
}

CMatrix normalize(const CMatrix& Y, const SystemConfig& cfg) { return Y / cfg.amplitude(); }

}  // namespace hetnet
