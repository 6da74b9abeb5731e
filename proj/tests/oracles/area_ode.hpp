#pragma once

// Adaptive Dormand-Prince integration of one area under a constant power
// imbalance, and the closed-form response of a governor-free area.

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "edcps/grid.hpp"

namespace oracle {

using AreaState = std::array<double, 2>;  // omega (rad/s), p_gov (p.u.)

// Integrates the library's area derivatives with a tight adaptive scheme.
inline AreaState integrate_area(const edcps::SubsystemParams& p, double p_net, double t_end,
                                AreaState x0) {
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const AreaState& x, AreaState& dx, double) {
    const auto d = edcps::subsystem_derivatives({x[0], x[1], 0.0}, p_net, p);
    dx = {d.d_omega, d.d_p_gov};
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<AreaState>());
  odeint::integrate_adaptive(stepper, rhs, x0, 0.0, t_end, 1e-3);
  return x0;
}

// Per-unit deviation of an area with damping only:
//   dw(t) = p/D * (1 - exp(-D t / 2H))
inline double damping_only_deviation(double p_net, double damping, double inertia, double t) {
  return p_net / damping * (1.0 - std::exp(-damping * t / (2.0 * inertia)));
}

}  // namespace oracle
