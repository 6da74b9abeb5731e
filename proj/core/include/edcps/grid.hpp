#pragma once

#include "edcps/units.hpp"

namespace edcps {

/// Center-of-inertia model of one synchronous area: swing equation plus a
/// first-order governor. Gains are per-unit on the area's own base s_base.
struct SubsystemParams {
  double inertia_h = 4.0;   // s
  double damping_d = 1.0;   // p.u. power / p.u. frequency
  double k_gov = 0.0;       // p.u. power / p.u. frequency
  double t_gov = 5.0;       // s
  double omega_nominal = kDefaultNominalOmega;
  double omega_min = hz_to_rad(kDefaultNominalHz - 0.5);
  double omega_max = hz_to_rad(kDefaultNominalHz + 0.5);
  double s_base = kDefaultPowerBase;  // MVA

  void validate() const;

  /// Steady-state MW-per-frequency slope (governor plus load damping),
  /// expressed in p.u. of power_base.
  double stiffness_on(double power_base) const {
    return (k_gov + damping_d) * s_base / power_base;
  }

  bool operator==(const SubsystemParams&) const = default;
};

struct SubsystemState {
  double omega = kDefaultNominalOmega;  // rad/s
  double p_gov = 0.0;                   // governor increment, p.u. of s_base
  double p_shed = 0.0;                  // cumulative load shed, p.u. of system base

  bool operator==(const SubsystemState&) const = default;
};

struct SubsystemDerivatives {
  double d_omega = 0.0;  // rad/s^2
  double d_p_gov = 0.0;  // p.u./s
};

/// p_net is the electrical injection imbalance in p.u. of params.s_base
/// (positive = surplus). With dw the per-unit deviation (omega - omega_N)/omega_N:
///   d(dw)/dt   = (p_net + p_gov - D dw) / (2H)
///   d(p_gov)/dt = (-K_gov dw - p_gov) / t_gov
SubsystemDerivatives subsystem_derivatives(const SubsystemState& state, double p_net,
                                           const SubsystemParams& params);

/// Equilibrium angular frequency under a constant deficit (p.u. of s_base):
/// omega_N * (1 - p_deficit / (K_gov + D)). Throws kZeroStiffness when
/// K_gov + D = 0 and the deficit is nonzero.
double steady_state_frequency(double p_deficit, const SubsystemParams& params);

}  // namespace edcps
