#pragma once

#include <cstdint>
#include <vector>

#include "hetnet/pilotgen.hpp"
#include "hetnet/rng.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Scalar parameters of one uplink scenario. Powers are linear.
struct SystemConfig {
  int M = 20;     // receive antennas
  int N = 200;    // MTC devices
  int L = 64;     // pilot length
  int T = 1024;   // coherence length in symbols; only L < T is checked
  double eps = 0.05;
  double rho_u = 1.0;
  double sigma2 = 0.64;  // 20 dB pilot SNR at L = 64, rho_u = 1
  double beta_e = 1.0;
  // Per-device path loss. Empty means every device uses beta_default.
  std::vector<double> beta;
  double beta_default = 1.0;
  double xi = 1e-3;
  double delta = 1e-4;
  int max_iters = 50;
  std::uint64_t seed = 20211;

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  double beta_of(int n) const { return beta.empty() ? beta_default : beta[n]; }
  std::vector<double> path_losses() const;
  double mean_beta() const;

  // sqrt(L rho_u): transmit amplitude applied to unit-norm pilots.
  double amplitude() const;
  // sigma^2 / (L rho_u): noise variance after dividing Y by amplitude().
  double noise_var() const;

  double expected_active() const { return eps * N; }
};

// Noise power giving the requested pilot SNR L * rho_u / sigma^2 at pilot
// length reference_L. Keeping sigma^2 fixed while L varies lets longer pilots
// collect more energy.
double sigma2_from_snr_db(double snr_db, int reference_L, double rho_u);

struct Channels {
  CVector h_e;  // length M
  CMatrix H;    // N x M, row n = h_n^T
};

struct ScenarioRealization {
  BinaryVector alpha;  // activity, length N
  CVector h_e;
  CMatrix H;
  CMatrix X;  // N x M, row n = alpha_n h_n^T
  CMatrix W;  // L x M noise
  CMatrix Y;  // L x M composite received signal

  int active_count() const;
};

BinaryVector sample_activity(int N, double eps, Rng& rng);

Channels sample_channels(const SystemConfig& cfg, Rng& rng);

// L x M matrix of i.i.d. CN(0, sigma2) entries.
CMatrix sample_noise(int L, int M, double sigma2, Rng& rng);

// Y = sqrt(L rho_u) (a_e h_e^T + A X) + W.
ScenarioRealization synthesize(const PilotSet& pilots, const BinaryVector& alpha,
                               const Channels& channels, const CMatrix& noise,
                               const SystemConfig& cfg);

// Y / sqrt(L rho_u); the result has noise variance cfg.noise_var().
CMatrix normalize(const CMatrix& Y, const SystemConfig& cfg);

}  // namespace hetnet
