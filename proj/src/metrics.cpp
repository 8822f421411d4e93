#include "hetnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hetnet {

DetectionCounts& DetectionCounts::operator+=(const DetectionCounts& o) {
  missed += o.missed;
  active += o.active;
  false_alarms += o.false_alarms;
  inactive += o.inactive;
  return *this;
}

std::optional<double> DetectionCounts::pmd() const {
  if (active == 0) return std::nullopt;
  return static_cast<double>(missed) / static_cast<double>(active);
}

std::optional<double> DetectionCounts::pfa() const {
  if (inactive == 0) return std::nullopt;
  return static_cast<double>(false_alarms) / static_cast<double>(inactive);
}

DetectionCounts count_detections(const BinaryVector& decisions, const BinaryVector& truth) {
  if (decisions.size() != truth.size())
    throw DimensionMismatch("decisions and truth must have the same length");
  DetectionCounts c;
  for (std::size_t n = 0; n < truth.size(); ++n) {
    if (truth[n] != 0) {
      ++c.active;
      if (decisions[n] == 0) ++c.missed;
    } else {
      ++c.inactive;
      if (decisions[n] != 0) ++c.false_alarms;
    }
  }
  return c;
}

ErrorRates pmd_pfa(const BinaryVector& decisions, const BinaryVector& truth) {
  const DetectionCounts c = count_detections(decisions, truth);
  return {c.pmd(), c.pfa()};
}

namespace {

void check_trials(std::span<const TrialScores> trials) {
  if (trials.empty()) throw std::invalid_argument("ROC needs at least one trial");
  for (const auto& t : trials)
    if (t.scores.size() != t.truth.size()) throw DimensionMismatch("scores and truth must have the same length");
}

// Pooled scores split by truth, each sorted ascending.
struct SortedScores {
  std::vector<double> active;
  std::vector<double> inactive;
};

SortedScores split_sorted(std::span<const TrialScores> trials) {
  SortedScores s;
  for (const auto& t : trials)
    for (std::size_t n = 0; n < t.scores.size(); ++n)
      (t.truth[n] != 0 ? s.active : s.inactive).push_back(t.scores[n]);
  std::sort(s.active.begin(), s.active.end());
  std::sort(s.inactive.begin(), s.inactive.end());
  return s;
}

// Number of entries strictly below zeta in an ascending vector.
std::size_t count_below(const std::vector<double>& sorted, double zeta) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), zeta) - sorted.begin());
}

}  // namespace

std::vector<double> default_thresholds(std::span<const TrialScores> trials, std::size_t count) {
  check_trials(trials);
  if (count < 2) throw std::invalid_argument("threshold grid needs at least two points");
  double sum = 0.0;
  double max = 0.0;
  std::size_t n = 0;
  for (const auto& t : trials) {
    for (double s : t.scores) {
      sum += s;
      max = std::max(max, s);
      ++n;
    }
  }
  const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
  double lo = 1e-3 * mean;
  double hi = 2.0 * max;
  // All-zero scores: any positive grid separates nothing, keep it well formed.
  if (!(lo > 0.0) || !(hi > lo)) {
    lo = 1e-6;
    hi = 1.0;
  }
  std::vector<double> grid(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo * std::exp(step * static_cast<double>(k));
  grid.back() = hi;
  return grid;
}

RocCurve roc_sweep(std::span<const TrialScores> trials, std::vector<double> thresholds) {
  check_trials(trials);
  if (thresholds.empty()) thresholds = default_thresholds(trials);
  std::sort(thresholds.begin(), thresholds.end());

  const SortedScores s = split_sorted(trials);
  RocCurve curve;
  curve.trials = trials.size();
  curve.thresholds = thresholds;
  curve.pfa.reserve(thresholds.size());
  curve.pmd.reserve(thresholds.size());
  for (double zeta : thresholds) {
    const std::size_t missed = count_below(s.active, zeta);
    const std::size_t alarms = s.inactive.size() - count_below(s.inactive, zeta);
    // No active (inactive) device anywhere: report the rate as 0, nothing can be missed (alarmed).
    curve.pmd.push_back(s.active.empty() ? 0.0 : static_cast<double>(missed) / s.active.size());
    curve.pfa.push_back(s.inactive.empty() ? 0.0 : static_cast<double>(alarms) / s.inactive.size());
  }
  return curve;
}

double roc_auc(std::span<const TrialScores> trials) {
  check_trials(trials);
  const SortedScores s = split_sorted(trials);
  if (s.active.empty() || s.inactive.empty())
    throw UndefinedMetric("AUC needs both active and inactive devices");
  // P(score_active > score_inactive) + 0.5 P(equal), by merging the sorted lists.
  double wins = 0.0;
  std::size_t below = 0;  // inactive scores strictly below the current active score
  std::size_t upto = 0;   // inactive scores <= the current active score
  for (double a : s.active) {
    while (below < s.inactive.size() && s.inactive[below] < a) ++below;
    upto = std::max(upto, below);
    while (upto < s.inactive.size() && s.inactive[upto] <= a) ++upto;
    wins += static_cast<double>(below) + 0.5 * static_cast<double>(upto - below);
  }
  return wins / (static_cast<double>(s.active.size()) * static_cast<double>(s.inactive.size()));
}

double pmd_at_pfa(const RocCurve& curve, double target_pfa) {
  if (curve.pfa.empty()) throw std::invalid_argument("empty ROC curve");
  // Points ordered by increasing PFA (decreasing threshold), with the forced
  // endpoints (pfa 0, pmd 1) and (pfa 1, pmd 0) appended.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.pfa.size() + 2);
  pts.emplace_back(0.0, 1.0);
  for (std::size_t k = curve.pfa.size(); k-- > 0;) pts.emplace_back(curve.pfa[k], curve.pmd[k]);
  pts.emplace_back(1.0, 0.0);
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  for (std::size_t k = 1; k < pts.size(); ++k) {
    const auto [x0, y0] = pts[k - 1];
    const auto [x1, y1] = pts[k];
    if (target_pfa <= x1) {
      if (x1 == x0) return std::min(y0, y1);
      const double w = (target_pfa - x0) / (x1 - x0);
      return y0 + w * (y1 - y0);
    }
  }
  return pts.back().second;
}

double threshold_for_pmd(std::span<const TrialScores> trials, double pmd_max) {
  check_trials(trials);
  if (!(pmd_max >= 0.0 && pmd_max <= 1.0)) throw std::invalid_argument("PMD target must lie in [0, 1]");
  const SortedScores s = split_sorted(trials);
  if (s.active.empty()) throw UndefinedMetric("no active devices to calibrate the threshold on");
  // PMD(zeta) = #(active < zeta) / A. With zeta = k-th smallest active score at most k are missed.
  const auto allowed = static_cast<std::size_t>(std::floor(pmd_max * static_cast<double>(s.active.size()) + 1e-9));
  if (allowed >= s.active.size()) return std::numeric_limits<double>::infinity();
  return s.active[allowed];
}

EnergyRatio& EnergyRatio::operator+=(const EnergyRatio& o) {
  error += o.error;
  reference += o.reference;
  trials += o.trials;
  return *this;
}

void EnergyRatio::add(double error_energy, double reference_energy) {
  error += error_energy;
  reference += reference_energy;
}

double EnergyRatio::percent() const {
  if (!(reference > 0.0)) throw UndefinedMetric("RRMSE undefined: reference energy is zero");
  return 100.0 * std::sqrt(error / reference);
}

EnergyRatio rrmse_energies(const CMatrix& estimates, const CMatrix& truths, const BinaryVector& mask) {
  if (estimates.rows() != truths.rows() || estimates.cols() != truths.cols())
    throw DimensionMismatch("estimates and truths must have the same shape");
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != truths.rows())
    throw DimensionMismatch("mask length must equal the number of rows");
  EnergyRatio e;
  e.trials = 1;
  for (Eigen::Index r = 0; r < truths.rows(); ++r) {
    if (!mask.empty() && mask[r] == 0) continue;
    e.add((estimates.row(r) - truths.row(r)).squaredNorm(), truths.row(r).squaredNorm());
  }
  return e;
}

double rrmse(const CMatrix& estimates, const CMatrix& truths, const BinaryVector& mask) {
  return rrmse_energies(estimates, truths, mask).percent();
}

}  // namespace hetnet
