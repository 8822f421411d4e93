#include "hetnet/embb_sic.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnet {

CVector correlate(const CMatrix& y_normalized, const CVector& embb_pilot) {
  if (y_normalized.rows() != embb_pilot.size())
    throw DimensionMismatch("received matrix has " + std::to_string(y_normalized.rows()) +
                            " rows but the eMBB pilot has length " + std::to_string(embb_pilot.size()));
  return y_normalized.transpose() * embb_pilot.conjugate();
}

EmbbEstimate mmse_estimate(const CVector& y, double beta_e, double noise_var) {
  if (!(noise_var >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
  if (!(beta_e > 0.0)) throw std::invalid_argument("eMBB path loss must be > 0");
  EmbbEstimate est;
  est.psi = 1.0 / (beta_e + noise_var);
  est.h_hat = (beta_e * est.psi) * y;
  est.error_var = beta_e * noise_var * est.psi;
  return est;
}

EmbbEstimate perfect_estimate(const CVector& h_e) {
  EmbbEstimate est;
  est.h_hat = h_e;
  est.error_var = 0.0;
  est.psi = 0.0;
  return est;
}

CleanedSignal sic(const CMatrix& y_normalized, const CVector& embb_pilot, const EmbbEstimate& est,
                  double noise_var) {
  if (y_normalized.rows() != embb_pilot.size())
    throw DimensionMismatch("eMBB pilot length differs from the received matrix row count");
  if (y_normalized.cols() != est.h_hat.size())
    throw DimensionMismatch("eMBB estimate length differs from the antenna count");
  CleanedSignal out;
  out.y_breve = y_normalized - embb_pilot * est.h_hat.transpose();
  out.noise_var = noise_var + est.error_var / static_cast<double>(y_normalized.rows());
  return out;
}

}  // namespace hetnet
