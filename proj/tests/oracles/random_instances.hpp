#pragma once

#include <random>

#include "edcps/coordinator.hpp"

namespace oracle {

// Random 2-3 line instances. Loss sizes range from easily absorbed to
// large enough that headroom caps and shedding come into play.
inline edcps::OptimizationInput random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lines(2, 3);
  std::uniform_real_distribution<double> stiffness(2.0, 40.0);
  std::uniform_real_distribution<double> rated(0.5, 1.0);
  std::uniform_real_distribution<double> loading(0.4, 1.0);
  std::uniform_real_distribution<double> loss(0.02, 0.9);
  std::bernoulli_distribution stiff_receiver(0.85);

  edcps::OptimizationInput in;
  const int m = lines(rng);
  for (int i = 0; i < m; ++i) {
    in.k_g_send.push_back(stiffness(rng));
    in.p_dc_rated.push_back(rated(rng));
    in.p_dc_current.push_back(loading(rng) * in.p_dc_rated.back());
    in.k_max.push_back(1.1);
  }
  in.k_g_recv = stiff_receiver(rng) ? stiffness(rng) : 0.0;
  in.p_loss = loss(rng);
  in.omega_bounds.assign(m + 1, edcps::FrequencyBand{});
  return in;
}

}  // namespace oracle
