#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/amp_core.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/pilotgen.hpp"
#include "hetnet/sysmodel.hpp"

namespace hetnet {

enum class CsiMode { Perfect, Imperfect };

std::string_view to_string(CsiMode mode);
CsiMode parse_csi_mode(std::string_view name);

// Parameter grid; an empty axis keeps the base value.
struct SweepGrid {
  std::vector<int> L;
  std::vector<int> M;
  std::vector<double> eps;
};

struct ExperimentSpec {
  SystemConfig base;
  std::vector<PilotStrategy> strategy{PilotStrategy::ProposedI};
  SweepGrid sweep;
  int trials = 100;
  std::vector<CsiMode> csi_mode{CsiMode::Imperfect};
  std::string output_path = "results";

  int roc_points = 200;
  double pmd_target = 0.2;  // operating point for the RRMSE report
  bool fixed_pilots = false;
  bool write_scores = true;
  int workers = 0;  // 0: one per hardware thread
  int embb_index = 0;
  StateMode amp_mode = StateMode::Empirical;
  int se_samples = 10000;  // state evolution draws for amp_mode = Analytic
  // Device indices forced active in every trial instead of drawing activity.
  std::vector<int> force_active;

  void validate() const;
};

// One `key = value` per line; `#` starts a comment. Lists are comma separated.
// Keys mirror ExperimentSpec: trials, strategy, csi_mode, output_path, ...,
// base.<SystemConfig field>, sweep.L / sweep.M / sweep.eps.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

// Parses "key=value" and stores it, replacing any earlier value.
void apply_override(KeyValues& kv, std::string_view assignment);

// Unknown keys and malformed values throw std::invalid_argument naming the key.
ExperimentSpec spec_from_key_values(const KeyValues& kv);

// Value of HETNET_AMP_SEED, if set.
std::optional<std::uint64_t> seed_from_env();

struct SweepPoint {
  PilotStrategy strategy = PilotStrategy::ProposedI;
  CsiMode csi = CsiMode::Imperfect;
  SystemConfig cfg;

  std::string label() const;
};

// Order: strategy, csi_mode, L, M, eps (last varies fastest).
std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec);

// Everything kept from one trial.
struct TrialRecord {
  std::vector<double> scores;       // per device
  BinaryVector truth;               // per device
  std::vector<double> mtc_error;    // |x_hat_n - x_n|^2
  std::vector<double> mtc_energy;   // |x_n|^2
  double embb_error = 0.0;          // |h_hat_e - h_e|^2
  double embb_energy = 0.0;         // |h_e|^2
  int iterations = 0;
  bool converged = false;
};

struct TrialOptions {
  std::uint64_t seed = 0;
  bool fixed_pilots = false;
  int embb_index = 0;
  StateMode amp_mode = StateMode::Empirical;
  std::vector<double> tau2_schedule;  // required when amp_mode == Analytic
  std::vector<int> force_active;
};

// pilots -> activity/channels/noise -> synthesis -> normalisation ->
// eMBB estimate + SIC (genie for Perfect CSI) -> AMP.
TrialRecord run_trial(const SweepPoint& point, const PilotBasis& basis, const TrialOptions& options, int trial);

struct PointResult {
  SweepPoint point;
  std::vector<TrialRecord> trials;

  std::vector<TrialScores> trial_scores() const;
};

struct RrmseSummary {
  double threshold = 0.0;
  EnergyRatio embb;
  EnergyRatio mtc;
};

// Picks the largest threshold with pooled PMD <= pmd_target; MTC error is then
// pooled over devices that are truly active and detected at that threshold.
RrmseSummary rrmse_at_pmd(const PointResult& result, double pmd_target);

// Runs every trial of one point; trials are spread over `workers` threads and
// collected by index, so the result does not depend on the worker count.
PointResult run_point(const SweepPoint& point, const ExperimentSpec& spec);

std::vector<PointResult> run_campaign(const ExperimentSpec& spec);

// CSV output (9 significant digits, header row first).
void write_roc_csv(std::ostream& out, const std::vector<PointResult>& results, int roc_points);
void write_rrmse_csv(std::ostream& out, const std::vector<PointResult>& results, double pmd_target);
void write_scores_csv(std::ostream& out, const std::vector<PointResult>& results);
// Inverse of write_scores_csv; configs only carry the keyed fields (strategy, csi, L, M, eps).
std::vector<PointResult> read_scores_csv(std::istream& in);

struct ExperimentFiles {
  std::filesystem::path roc;
  std::filesystem::path rrmse;
  std::filesystem::path scores;  // empty unless spec.write_scores
};

// Runs the campaign and writes roc.csv, rrmse.csv (and scores.csv) under spec.output_path.
ExperimentFiles run_experiment(const ExperimentSpec& spec);

std::string format_number(double value);

}  // namespace hetnet
