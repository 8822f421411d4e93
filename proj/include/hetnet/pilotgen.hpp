#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/rng.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

enum class PilotStrategy { ProposedI, ProposedII, Bernoulli };

std::string_view to_string(PilotStrategy strategy);
PilotStrategy parse_strategy(std::string_view name);

// L orthonormal length-L sequences, one per column.
struct PilotBasis {
  CMatrix V;

  int length() const { return static_cast<int>(V.rows()); }
};

struct CollisionBound {
  int L = 0;
  double xi = 0.0;
  int z = 0;
  double combinations = 0.0;  // C(L-1, z)
};

class InfeasibleCollisionBound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PilotSet {
  CVector embb_pilot;  // a_e, length L
  CMatrix mtc_pilots;  // A, L x N; column n is device n's pilot
  PilotStrategy strategy = PilotStrategy::Bernoulli;
  // Basis column given to the eMBB user; empty for Bernoulli pilots.
  std::optional<int> embb_basis_index;
  // Per-device basis columns combined into the pilot (ProposedI and ProposedII).
  std::vector<std::vector<int>> subsets;
  // Per-device combination weights after normalisation, aligned with subsets.
  std::vector<CVector> weights;

  int length() const { return static_cast<int>(mtc_pilots.rows()); }
  int devices() const { return static_cast<int>(mtc_pilots.cols()); }
};

// Sylvester-Hadamard / sqrt(L) when L is a power of two, unitary DFT otherwise.
PilotBasis orthogonal_basis(int L);

// Smallest z with 1 / C(L-1, z) <= xi. Throws InfeasibleCollisionBound when
// even the central binomial coefficient C(L-1, floor((L-1)/2)) is below 1/xi.
CollisionBound min_subset_size(int L, double xi);

// Each device combines a uniformly random z-subset of the non-eMBB columns
// with i.i.d. CN(0, 1) weights, normalised to unit norm.
PilotSet gen_pilot_I(const PilotBasis& basis, int embb_index, int N, double xi, Rng& rng);

// Each device combines all L-1 non-eMBB columns with weights +-1/sqrt(L-1),
// signs drawn independently per device.
PilotSet gen_pilot_II(const PilotBasis& basis, int embb_index, int N, Rng& rng);

// Entries of a_e and A i.i.d. uniform on {+1/sqrt(L), -1/sqrt(L)}.
PilotSet gen_bernoulli(int L, int N, Rng& rng);

// Dispatches on strategy; xi is ignored unless strategy == ProposedI.
PilotSet generate_pilots(PilotStrategy strategy, const PilotBasis& basis, int embb_index, int N,
                         double xi, Rng& rng);

}  // namespace hetnet
