#pragma once

#include "hetnet/types.hpp"

namespace hetnet {

// All functions here work on the normalised model
//   Y' = a_e h_e^T + A X + W',  W' ~ CN(0, noise_var),  noise_var = sigma^2 / (L rho_u).

struct EmbbEstimate {
  CVector h_hat;
  double error_var = 0.0;  // c_e: per-antenna variance of h_e - h_hat
  double psi = 0.0;        // 1 / (beta_e + noise_var); h_hat = beta_e * psi * y
};

struct CleanedSignal {
  CMatrix y_breve;         // Y' - a_e h_hat^T
  double noise_var = 0.0;  // white approximation of W_eq per entry
};

// y = Y'^T conj(a_e), one entry per antenna.
CVector correlate(const CMatrix& y_normalized, const CVector& embb_pilot);

// Linear MMSE estimate of h_e ~ CN(0, beta_e I) from y = h_e + CN(0, noise_var I).
EmbbEstimate mmse_estimate(const CVector& y, double beta_e, double noise_var);

// Genie estimate h_hat = h_e with zero error, for the perfect-CSI comparison.
EmbbEstimate perfect_estimate(const CVector& h_e);

// Removes a_e h_hat^T. The residual eMBB error a_e (h_e - h_hat)^T carries
// energy M c_e spread over L M entries, so the reported per-entry noise is
// noise_var + c_e / L.
CleanedSignal sic(const CMatrix& y_normalized, const CVector& embb_pilot, const EmbbEstimate& est,
                  double noise_var);

}  // namespace hetnet
