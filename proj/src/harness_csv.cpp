#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "hetnet/harness.hpp"

namespace hetnet {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

void write_point_key(std::ostream& out, const SweepPoint& p) {
  out << to_string(p.strategy) << ',' << to_string(p.csi) << ',' << p.cfg.L << ',' << p.cfg.M << ','
      << format_number(p.cfg.eps);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "' in scores CSV");
  return v;
}

}  // namespace

void write_roc_csv(std::ostream& out, const std::vector<PointResult>& results, int roc_points) {
  out << "strategy,csi_mode,L,M,eps,zeta,pfa,pmd,trials\n";
  for (const auto& r : results) {
    const auto scores = r.trial_scores();
    const RocCurve curve = roc_sweep(scores, default_thresholds(scores, static_cast<std::size_t>(roc_points)));
    for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
      write_point_key(out, r.point);
      out << ',' << format_number(curve.thresholds[k]) << ',' << format_number(curve.pfa[k]) << ','
          << format_number(curve.pmd[k]) << ',' << curve.trials << '\n';
    }
  }
}

void write_rrmse_csv(std::ostream& out, const std::vector<PointResult>& results, double pmd_target) {
  out << "strategy,L,target,rrmse_pct,trials\n";
  auto pct = [](const EnergyRatio& e) { return e.reference > 0.0 ? e.percent() : std::nan(""); };
  for (const auto& r : results) {
    double embb = std::nan("");
    double mtc = std::nan("");
    try {
      const RrmseSummary s = rrmse_at_pmd(r, pmd_target);
      embb = pct(s.embb);
      mtc = pct(s.mtc);
    } catch (const UndefinedMetric&) {
      // No active device in any trial: the operating point does not exist.
      EnergyRatio e;
      for (const auto& t : r.trials) e.add(t.embb_error, t.embb_energy);
      embb = pct(e);
    }
    const auto strategy = to_string(r.point.strategy);
    out << strategy << ',' << r.point.cfg.L << ",embb," << format_number(embb) << ',' << r.trials.size() << '\n';
    out << strategy << ',' << r.point.cfg.L << ",mtc," << format_number(mtc) << ',' << r.trials.size() << '\n';
  }
}

void write_scores_csv(std::ostream& out, const std::vector<PointResult>& results) {
  out << "strategy,csi_mode,L,M,eps,trial,target,device,active,score,err_energy,truth_energy\n";
  for (const auto& r : results) {
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
      const TrialRecord& rec = r.trials[t];
      write_point_key(out, r.point);
      out << ',' << t << ",embb,0,1,0," << format_number(rec.embb_error) << ',' << format_number(rec.embb_energy)
          << '\n';
      for (std::size_t n = 0; n < rec.scores.size(); ++n) {
        write_point_key(out, r.point);
        out << ',' << t << ",mtc," << n << ',' << static_cast<int>(rec.truth[n]) << ','
            << format_number(rec.scores[n]) << ',' << format_number(rec.mtc_error[n]) << ','
            << format_number(rec.mtc_energy[n]) << '\n';
      }
    }
  }
}

std::vector<PointResult> read_scores_csv(std::istream& in) {
  static const std::string header = "strategy,csi_mode,L,M,eps,trial,target,device,active,score,err_energy,truth_energy";
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("scores CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::invalid_argument("scores CSV header mismatch; expected: " + header);

  std::vector<PointResult> results;
  std::map<std::tuple<std::string, std::string, int, int, std::string>, std::size_t> index;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 12)
      throw std::invalid_argument("scores CSV line " + std::to_string(lineno) + ": expected 12 columns");
    try {
      const auto key = std::make_tuple(c[0], c[1], std::stoi(c[2]), std::stoi(c[3]), c[4]);
      auto [it, inserted] = index.try_emplace(key, results.size());
      if (inserted) {
        PointResult r;
        r.point.strategy = parse_strategy(c[0]);
        r.point.csi = parse_csi_mode(c[1]);
        r.point.cfg.L = std::stoi(c[2]);
        r.point.cfg.M = std::stoi(c[3]);
        r.point.cfg.eps = parse_double(c[4]);
        results.push_back(std::move(r));
      }
      PointResult& r = results[it->second];
      const auto trial = static_cast<std::size_t>(std::stoul(c[5]));
      if (trial >= r.trials.size()) r.trials.resize(trial + 1);
      TrialRecord& rec = r.trials[trial];
      if (c[6] == "embb") {
        rec.embb_error = parse_double(c[10]);
        rec.embb_energy = parse_double(c[11]);
      } else if (c[6] == "mtc") {
        const auto n = static_cast<std::size_t>(std::stoul(c[7]));
        if (n >= rec.scores.size()) {
          rec.scores.resize(n + 1, 0.0);
          rec.truth.resize(n + 1, 0);
          rec.mtc_error.resize(n + 1, 0.0);
          rec.mtc_energy.resize(n + 1, 0.0);
        }
        rec.truth[n] = c[8] == "1" ? 1 : 0;
        rec.scores[n] = parse_double(c[9]);
        rec.mtc_error[n] = parse_double(c[10]);
        rec.mtc_energy[n] = parse_double(c[11]);
      } else {
        throw std::invalid_argument("unknown target '" + c[6] + "'");
      }
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("scores CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (results.empty()) throw std::invalid_argument("scores CSV has no data rows");
  for (auto& r : results) r.point.cfg.N = r.trials.empty() ? 0 : static_cast<int>(r.trials.front().scores.size());
  return results;
}

}  // namespace hetnet
