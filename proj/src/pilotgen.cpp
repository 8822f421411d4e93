#include "hetnet/pilotgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hetnet {

std::string_view to_string(PilotStrategy strategy) {
  switch (strategy) {
    case PilotStrategy::ProposedI: return "ProposedI";
    case PilotStrategy::ProposedII: return "ProposedII";
    case PilotStrategy::Bernoulli: return "Bernoulli";
  }
  return "unknown";
}

PilotStrategy parse_strategy(std::string_view name) {
  if (name == "ProposedI") return PilotStrategy::ProposedI;
  if (name == "ProposedII") return PilotStrategy::ProposedII;
  if (name == "Bernoulli") return PilotStrategy::Bernoulli;
  throw std::invalid_argument("unknown pilot strategy '" + std::string(name) +
                              "' (expected ProposedI, ProposedII or Bernoulli)");
}

PilotBasis orthogonal_basis(int L) {
  if (L < 2) throw std::invalid_argument("pilot length must be at least 2, got " + std::to_string(L));

  PilotBasis basis;
  basis.V.resize(L, L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  if (std::has_single_bit(static_cast<unsigned>(L))) {
    // Sylvester construction: H[j][k] = (-1)^popcount(j & k).
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k)
        basis.V(j, k) = (std::popcount(static_cast<unsigned>(j & k)) % 2 == 0) ? scale : -scale;
  } else {
    for (int j = 0; j < L; ++j) {
      for (int k = 0; k < L; ++k) {
        // Reduce j*k mod L first so the phase stays accurate for large L.
        const double phase = -2.0 * std::numbers::pi * static_cast<double>((j * k) % L) / L;
        basis.V(j, k) = std::polar(scale, phase);
      }
    }
  }
  return basis;
}

CollisionBound min_subset_size(int L, double xi) {
  if (L < 3) throw std::invalid_argument("collision bound needs L >= 3, got " + std::to_string(L));
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("collision threshold xi must lie in (0, 1)");

  const int n = L - 1;
  const double needed = 1.0 / xi;
  // C(n, z) grows until z = floor(n/2), so only that half needs scanning.
  double c = 1.0;
  for (int z = 1; z <= n / 2 || z == 1; ++z) {
    c = c * static_cast<double>(n - z + 1) / static_cast<double>(z);
    if (c >= needed) return CollisionBound{L, xi, z, c};
  }
  std::ostringstream msg;
  msg << "no subset size satisfies 1/C(" << n << ", z) <= " << xi << " for L = " << L
      << "; the largest achievable C(" << n << ", z) is " << c;
  throw InfeasibleCollisionBound(msg.str());
}

namespace {

void check_basis_args(const PilotBasis& basis, int embb_index, int N) {
  const int L = basis.length();
  if (L < 2) throw std::invalid_argument("pilot basis must have L >= 2");
  if (embb_index < 0 || embb_index >= L)
    throw std::invalid_argument("eMBB basis index " + std::to_string(embb_index) +
                                " outside [0, " + std::to_string(L) + ")");
  if (N < 1) throw std::invalid_argument("need at least one MTC device");
}

std::vector<int> non_embb_columns(int L, int embb_index) {
  std::vector<int> cols;
  cols.reserve(L - 1);
  for (int j = 0; j < L; ++j)
    if (j != embb_index) cols.push_back(j);
  return cols;
}

// Combines basis columns with the given weights, normalises the result in
// place and rescales the weights to match.
CVector combine(const PilotBasis& basis, const std::vector<int>& cols, CVector& weights) {
  CVector pilot = CVector::Zero(basis.length());
  for (std::size_t k = 0; k < cols.size(); ++k) pilot += weights(k) * basis.V.col(cols[k]);
  const double norm = pilot.norm();
  pilot /= norm;
  weights /= norm;
  return pilot;
}

PilotSet make_set(PilotStrategy strategy, const PilotBasis& basis, int embb_index, int N) {
  PilotSet set;
  set.strategy = strategy;
  set.embb_basis_index = embb_index;
  set.embb_pilot = basis.V.col(embb_index);
  set.mtc_pilots.resize(basis.length(), N);
  set.subsets.reserve(N);
  set.weights.reserve(N);
  return set;
}

}  // namespace

PilotSet gen_pilot_I(const PilotBasis& basis, int embb_index, int N, double xi, Rng& rng) {
  check_basis_args(basis, embb_index, N);
  const int L = basis.length();
  const int z = min_subset_size(L, xi).z;

  PilotSet set = make_set(PilotStrategy::ProposedI, basis, embb_index, N);
  std::vector<int> pool = non_embb_columns(L, embb_index);
  for (int n = 0; n < N; ++n) {
    // Partial Fisher-Yates: the first z entries become a uniform z-subset.
    for (int k = 0; k < z; ++k) {
      const auto pick = k + static_cast<int>(rng.uniform_index(pool.size() - k));
      std::swap(pool[k], pool[pick]);
    }
    std::vector<int> subset(pool.begin(), pool.begin() + z);
    std::sort(subset.begin(), subset.end());

    CVector w(z);
    for (int k = 0; k < z; ++k) w(k) = rng.complex_normal(1.0);
    set.mtc_pilots.col(n) = combine(basis, subset, w);
    set.subsets.push_back(std::move(subset));
    set.weights.push_back(std::move(w));
  }
  return set;
}

PilotSet gen_pilot_II(const PilotBasis& basis, int embb_index, int N, Rng& rng) {
  check_basis_args(basis, embb_index, N);
  const int L = basis.length();

  PilotSet set = make_set(PilotStrategy::ProposedII, basis, embb_index, N);
  const std::vector<int> cols = non_embb_columns(L, embb_index);
  for (int n = 0; n < N; ++n) {
    CVector w(L - 1);
    for (int k = 0; k < L - 1; ++k) w(k) = rng.sign();
    set.mtc_pilots.col(n) = combine(basis, cols, w);
    set.subsets.push_back(cols);
    set.weights.push_back(std::move(w));
  }
  return set;
}

PilotSet gen_bernoulli(int L, int N, Rng& rng) {
  if (L < 1 || N < 1) throw std::invalid_argument("Bernoulli pilots need L >= 1 and N >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));

  PilotSet set;
  set.strategy = PilotStrategy::Bernoulli;
  set.embb_pilot.resize(L);
  for (int l = 0; l < L; ++l) set.embb_pilot(l) = rng.sign() * scale;
  set.mtc_pilots.resize(L, N);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < L; ++l) set.mtc_pilots(l, n) = rng.sign() * scale;
  return set;
}

PilotSet generate_pilots(PilotStrategy strategy, const PilotBasis& basis, int embb_index, int N,
                         double xi, Rng& rng) {
  switch (strategy) {
    case PilotStrategy::ProposedI: return gen_pilot_I(basis, embb_index, N, xi, rng);
    case PilotStrategy::ProposedII: return gen_pilot_II(basis, embb_index, N, rng);
    case PilotStrategy::Bernoulli: return gen_bernoulli(basis.length(), N, rng);
  }
  throw std::invalid_argument("unknown pilot strategy");
}

}  // namespace hetnet
