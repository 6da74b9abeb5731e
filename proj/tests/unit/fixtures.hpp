#pragma once

#include <string>

#include "edcps/sim.hpp"

namespace fixtures {

// Four-infeed system with hvdc4 blocking at 8 s. Matches the bundled
// scenario2_subcase3 file except where overridden by the caller.
inline edcps::MidcScenario four_infeed(edcps::CoordinatorMode mode, double t_end = 60.0) {
  using namespace edcps;
  const double powers[] = {660.0, 630.0, 650.0, 540.0};
  const double k_gov[] = {14.0, 11.5, 13.5, 12.0};
  MidcScenario sc;
  sc.sim.t_end = t_end;
  for (int i = 0; i < 4; ++i) {
    LineConfig l;
    l.name = "hvdc" + std::to_string(i + 1);
    l.converter.p_rated = 800.0;
    l.converter.i_rated = 800.0 / 600.0;
    l.converter = calibrate_transformer_ratios(l.converter, 600.0, powers[i] / 600.0, deg_to_rad(15.0));
    l.droop.p_nominal = powers[i] / 1000.0;
    l.droop.p_ceiling = 0.88;
    l.sending.s_base = 2000.0;
    l.sending.k_gov = k_gov[i];
    sc.lines.push_back(l);
  }
  sc.receiving.s_base = 6000.0;
  sc.receiving.inertia_h = 6.0;
  sc.receiving.k_gov = 4.0;
  sc.coordinator.mode = mode;
  sc.events.push_back({8.0, BlockFault{3}});
  return sc;
}

}  // namespace fixtures
