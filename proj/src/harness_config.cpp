#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hetnet/harness.hpp"

namespace hetnet {

std::string_view to_string(CsiMode mode) {
  return mode == CsiMode::Perfect ? "Perfect" : "Imperfect";
}

CsiMode parse_csi_mode(std::string_view name) {
  if (name == "Perfect") return CsiMode::Perfect;
  if (name == "Imperfect") return CsiMode::Imperfect;
  throw std::invalid_argument("unknown csi_mode '" + std::string(name) + "' (expected Perfect or Imperfect)");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, std::string_view expected) {
  throw std::invalid_argument("config key '" + key + "': cannot parse '" + std::string(value) + "' as " +
                              std::string(expected));
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) bad_value(key, text, "a number");
  return value;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "a boolean");
}

StateMode parse_state_mode(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text == "EmpiricalState") return StateMode::Empirical;
  if (text == "AnalyticState") return StateMode::Analytic;
  bad_value(key, text, "EmpiricalState or AnalyticState");
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(trim(view.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_key_values(in);
}

void apply_override(KeyValues& kv, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument("override '" + std::string(assignment) + "' is not of the form key=value");
  const auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw std::invalid_argument("override '" + std::string(assignment) + "' has an empty key");
  kv[std::string(key)] = std::string(trim(assignment.substr(eq + 1)));
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("HETNET_AMP_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  return parse_number<std::uint64_t>("HETNET_AMP_SEED", raw);
}

ExperimentSpec spec_from_key_values(const KeyValues& kv) {
  ExperimentSpec spec;
  SystemConfig& b = spec.base;
  std::optional<double> snr_db;
  int snr_ref_L = 64;
  bool sigma2_given = false;

  for (const auto& [key, value] : kv) {
    if (key == "trials") spec.trials = parse_number<int>(key, value);
    else if (key == "strategy") {
      spec.strategy.clear();
      for (const auto& s : split_list(value)) spec.strategy.push_back(parse_strategy(s));
    } else if (key == "csi_mode") {
      spec.csi_mode.clear();
      for (const auto& s : split_list(value)) spec.csi_mode.push_back(parse_csi_mode(s));
    } else if (key == "output_path") spec.output_path = std::string(trim(value));
    else if (key == "roc_points") spec.roc_points = parse_number<int>(key, value);
    else if (key == "pmd_target") spec.pmd_target = parse_number<double>(key, value);
    else if (key == "fixed_pilots") spec.fixed_pilots = parse_bool(key, value);
    else if (key == "write_scores") spec.write_scores = parse_bool(key, value);
    else if (key == "workers") spec.workers = parse_number<int>(key, value);
    else if (key == "embb_index") spec.embb_index = parse_number<int>(key, value);
    else if (key == "amp_mode") spec.amp_mode = parse_state_mode(key, value);
    else if (key == "se_samples") spec.se_samples = parse_number<int>(key, value);
    else if (key == "force_active") spec.force_active = parse_number_list<int>(key, value);
    else if (key == "base.M") b.M = parse_number<int>(key, value);
    else if (key == "base.N") b.N = parse_number<int>(key, value);
    else if (key == "base.L") b.L = parse_number<int>(key, value);
    else if (key == "base.T") b.T = parse_number<int>(key, value);
    else if (key == "base.eps") b.eps = parse_number<double>(key, value);
    else if (key == "base.rho_u") b.rho_u = parse_number<double>(key, value);
    else if (key == "base.sigma2") {
      b.sigma2 = parse_number<double>(key, value);
      sigma2_given = true;
    } else if (key == "base.snr_db") snr_db = parse_number<double>(key, value);
    else if (key == "base.snr_ref_L") snr_ref_L = parse_number<int>(key, value);
    else if (key == "base.beta_e") b.beta_e = parse_number<double>(key, value);
    else if (key == "base.beta") {
      const auto betas = parse_number_list<double>(key, value);
      if (betas.size() == 1) {
        b.beta_default = betas.front();
        b.beta.clear();
      } else {
        b.beta = betas;
      }
    } else if (key == "base.xi") b.xi = parse_number<double>(key, value);
    else if (key == "base.delta") b.delta = parse_number<double>(key, value);
    else if (key == "base.max_iters") b.max_iters = parse_number<int>(key, value);
    else if (key == "base.seed") b.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "sweep.L") spec.sweep.L = parse_number_list<int>(key, value);
    else if (key == "sweep.M") spec.sweep.M = parse_number_list<int>(key, value);
    else if (key == "sweep.eps") spec.sweep.eps = parse_number_list<double>(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  if (snr_db) {
    if (sigma2_given) throw std::invalid_argument("config sets both base.sigma2 and base.snr_db");
    if (snr_ref_L < 1) throw std::invalid_argument("base.snr_ref_L must be >= 1");
    b.sigma2 = sigma2_from_snr_db(*snr_db, snr_ref_L, b.rho_u);
  }
  spec.validate();
  return spec;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (strategy.empty()) throw std::invalid_argument("at least one pilot strategy is required");
  if (csi_mode.empty()) throw std::invalid_argument("at least one csi_mode is required");
  if (roc_points < 2) throw std::invalid_argument("roc_points must be >= 2");
  if (!(pmd_target >= 0.0 && pmd_target <= 1.0)) throw std::invalid_argument("pmd_target must lie in [0, 1]");
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (se_samples < 1) throw std::invalid_argument("se_samples must be >= 1");
  if (output_path.empty()) throw std::invalid_argument("output_path must not be empty");
  for (const SweepPoint& p : expand_sweep(*this)) {
    try {
      p.cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("sweep point " + p.label() + ": " + e.what());
    }
    if (embb_index < 0 || embb_index >= p.cfg.L)
      throw std::invalid_argument("sweep point " + p.label() + ": embb_index outside [0, L)");
    for (int n : force_active)
      if (n < 0 || n >= p.cfg.N) throw std::invalid_argument("force_active index " + std::to_string(n) + " outside [0, N)");
  }
}

std::string SweepPoint::label() const {
  std::ostringstream s;
  s << to_string(strategy) << "/" << to_string(csi) << " L=" << cfg.L << " M=" << cfg.M << " eps=" << cfg.eps;
  return s.str();
}

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec) {
  const std::vector<int> Ls = spec.sweep.L.empty() ? std::vector<int>{spec.base.L} : spec.sweep.L;
  const std::vector<int> Ms = spec.sweep.M.empty() ? std::vector<int>{spec.base.M} : spec.sweep.M;
  const std::vector<double> epss = spec.sweep.eps.empty() ? std::vector<double>{spec.base.eps} : spec.sweep.eps;

  std::vector<SweepPoint> points;
  for (PilotStrategy strategy : spec.strategy)
    for (CsiMode csi : spec.csi_mode)
      for (int L : Ls)
        for (int M : Ms)
          for (double eps : epss) {
            SweepPoint p{strategy, csi, spec.base};
            p.cfg.L = L;
            p.cfg.M = M;
            p.cfg.eps = eps;
            points.push_back(std::move(p));
          }
  return points;
}

}  // namespace hetnet
