#include <cstdio>

#include "doctest.h"
#include "hetnet/harness.hpp"

using namespace hetnet;

// Golden convergence statistics for the default scenario (L=64, N=200, M=20,
// eps=0.05, 20 dB), 200 seeded trials per strategy with imperfect CSI.
TEST_CASE("AMP converges within max_iters on the default scenario") {
  ExperimentSpec spec;
  spec.trials = 200;
  spec.workers = 0;
  for (auto strategy : {PilotStrategy::ProposedI, PilotStrategy::ProposedII, PilotStrategy::Bernoulli}) {
    SweepPoint point;
    point.strategy = strategy;
    point.csi = CsiMode::Imperfect;
    point.cfg = spec.base;
    const PointResult r = run_point(point, spec);
    int converged = 0;
    long iters = 0;
    for (const auto& t : r.trials) {
      converged += t.converged;
      iters += t.iterations;
    }
    const double rate = double(converged) / r.trials.size();
    std::printf("%-10s converged %d/%zu, mean iterations %.2f\n", std::string(to_string(strategy)).c_str(),
                converged, r.trials.size(), double(iters) / r.trials.size());
    CAPTURE(to_string(strategy));
    CHECK(rate >= 0.95);
  }
}
