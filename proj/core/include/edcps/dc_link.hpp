#pragma once

#include "edcps/units.hpp"

namespace edcps {

/// Fixed electrical parameters of one monopolar LCC-HVDC link with a
/// constant-current rectifier and a constant-extinction-angle inverter.
///
/// Units: reactances and resistance in ohms, voltages in kV, currents in kA,
/// powers in MW (kV * kA = MW), angles in radians, time in seconds.
struct ConverterParams {
  int n_poles = 1;
  int n_bridges = 2;  // six-pulse bridges per pole; 2 is a 12-pulse pole
  double x_c_rect = 15.0;
  double x_c_inv = 15.0;
  double r_dc = 5.0;
  double k_t_rect = 1.0;
  double k_t_inv = 1.0;
  double v_ac_rect = 500.0;
  double v_ac_inv = 500.0;
  double gamma_ref = deg_to_rad(17.0);
  double alpha_min = deg_to_rad(5.0);
  double alpha_max = deg_to_rad(60.0);
  double p_rated = 660.0;
  double i_rated = 1.1;
  double v_rated = 600.0;
  double k_max = 1.1;
  double t_dc = 0.1;
  /// Measured DC voltage below voltage_floor * v_rated cannot be used to
  /// convert a power order into a current order.
  double voltage_floor = 0.1;

  /// Throws Error(kInvalidArgument) naming the first violated invariant.
  void validate() const;

  /// Ideal no-load DC voltage of the rectifier bridge set, kV.
  double ideal_voltage_rect() const;
  /// Ideal no-load DC voltage of the inverter bridge set, kV.
  double ideal_voltage_inv() const;
  /// Largest admissible DC current, kA.
  double max_current() const { return k_max * i_rated; }

  bool operator==(const ConverterParams&) const = default;
};

/// Instantaneous quasi-steady operating point of one link.
struct DcLinkState {
  double v_d_rect = 0.0;  // kV
  double v_d_inv = 0.0;   // kV
  double i_d = 0.0;       // kA
  double alpha = 0.0;     // rad
  double p_rect = 0.0;    // MW
  double p_inv = 0.0;     // MW
  double p_order = 0.0;   // p.u.
  double i_order = 0.0;   // kA
  double p_dc = 0.0;      // p.u., output of the power-order lag
  bool blocked = false;

  bool operator==(const DcLinkState&) const = default;
};

/// Pole-control conversion of a power set-point into a current set-point,
/// I = P * base / (n_poles * U_d), clamped to [0, k_max * i_rated].
/// Throws kVoltageFloor when u_d is at or below voltage_floor * v_rated.
double power_to_current_order(double p_order, double u_d, double power_base,
                              const ConverterParams& params);

/// Solves the link at I_d = i_order with gamma held at gamma_ref. The
/// inverter voltage follows from the extinction-angle equation, the
/// rectifier voltage adds the line drop and the firing angle is recovered
/// from the rectifier equation.
///
/// p_order and p_dc of the returned state are left at zero; the caller owns
/// the per-unit bookkeeping.
///
/// Throws kInvalidArgument for i_order outside (0, k_max * i_rated],
/// kCosineDomain when the firing-angle cosine leaves [-1, 1] and
/// kAlphaOutOfRange when the angle leaves [alpha_min, alpha_max].
DcLinkState solve_steady_state(double i_order, const ConverterParams& params);

/// Same relations as solve_steady_state evaluated at any i_d >= 0 without
/// the firing-angle range check. Used for the zero-current limit and for
/// reporting.
DcLinkState evaluate_operating_point(double i_d, const ConverterParams& params);

/// One classical RK4 step of dP/dt = (P_order - P) / t_dc with P_order held.
/// Requires 0 < dt <= t_dc / 2; throws kStepTooLarge otherwise.
double step_power_tracking(double p_dc, double p_order,
                           const ConverterParams& params, double dt);

/// Block fault: zero current and power, keep the frozen power order.
DcLinkState apply_block(DcLinkState state);

/// DC current (kA) at which the inverter delivers p_inv_mw, from the
/// quadratic n_poles * (V0 cos(gamma) - Rc * I) * I = P. Takes the
/// low-current root. Throws kInvalidArgument when P exceeds the inverter's
/// maximum transferable power.
double current_for_inverter_power(double p_inv_mw, const ConverterParams& params);

/// Picks k_t_inv so the inverter sits at v_d_inv with current i_d, and
/// k_t_rect so the rectifier fires at alpha at the same point. Everything
/// else in params is returned unchanged.
ConverterParams calibrate_transformer_ratios(ConverterParams params,
                                             double v_d_inv, double i_d,
                                             double alpha);

}  // namespace edcps
