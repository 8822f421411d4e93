#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetnet/types.hpp"

namespace hetnet {

class UndefinedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw detection counts; these, not ratios, are what gets pooled across trials.
struct DetectionCounts {
  std::size_t missed = 0;
  std::size_t active = 0;
  std::size_t false_alarms = 0;
  std::size_t inactive = 0;

  DetectionCounts& operator+=(const DetectionCounts& o);

  // nullopt when the denominator is zero.
  std::optional<double> pmd() const;
  std::optional<double> pfa() const;
};

DetectionCounts count_detections(const BinaryVector& decisions, const BinaryVector& truth);

struct ErrorRates {
  std::optional<double> pmd;
  std::optional<double> pfa;
};

ErrorRates pmd_pfa(const BinaryVector& decisions, const BinaryVector& truth);

// Scores and activity truth of one trial.
struct TrialScores {
  std::vector<double> scores;
  BinaryVector truth;
};

struct RocCurve {
  std::vector<double> thresholds;  // ascending
  std::vector<double> pfa;
  std::vector<double> pmd;
  std::size_t trials = 0;
};

// count points log-spaced from 1e-3 * mean score to 2 * max score, pooled over trials.
std::vector<double> default_thresholds(std::span<const TrialScores> trials, std::size_t count = 200);

// Pooled-count PMD/PFA at each threshold. An empty threshold list selects
// default_thresholds. Thresholds are sorted ascending in the result.
RocCurve roc_sweep(std::span<const TrialScores> trials, std::vector<double> thresholds = {});

// Area under the detection-probability vs PFA curve over every possible
// threshold (Mann-Whitney statistic, ties count one half).
double roc_auc(std::span<const TrialScores> trials);

// PMD at the requested PFA, linearly interpolated along the curve.
double pmd_at_pfa(const RocCurve& curve, double target_pfa);

// Largest threshold whose pooled PMD does not exceed pmd_max.
double threshold_for_pmd(std::span<const TrialScores> trials, double pmd_max);

// Pooled squared-error and reference energies for RRMSE.
struct EnergyRatio {
  double error = 0.0;
  double reference = 0.0;
  std::size_t trials = 0;

  EnergyRatio& operator+=(const EnergyRatio& o);
  void add(double error_energy, double reference_energy);

  // 100 sqrt(error / reference); throws UndefinedMetric when reference is 0.
  double percent() const;
};

// 100 sqrt(sum |est_n - truth_n|^2 / sum |truth_n|^2) over rows with mask_n set.
// An empty mask selects every row.
double rrmse(const CMatrix& estimates, const CMatrix& truths, const BinaryVector& mask = {});

EnergyRatio rrmse_energies(const CMatrix& estimates, const CMatrix& truths, const BinaryVector& mask = {});

}  // namespace hetnet
