#include "edcps/dc_link.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "edcps/error.hpp"

namespace edcps {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// (3 sqrt(2) / pi) * N_b: ideal no-load DC voltage per kV of valve-side AC.
double bridge_voltage_factor(int n_bridges) {
  return 3.0 * kSqrt2 / kPi * n_bridges;
}

// (3 / pi) * N_b * X_c: equivalent commutation resistance, ohms.
double commutation_resistance(int n_bridges, double x_c) {
  return 3.0 / kPi * n_bridges * x_c;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("ConverterParams: ") + what);
}

}  // namespace

void ConverterParams::validate() const {
  require(n_poles >= 1, "n_poles must be >= 1");
  require(n_bridges >= 1, "n_bridges must be >= 1");
  require(x_c_rect > 0.0 && x_c_inv > 0.0, "commutating reactances must be > 0");
  require(r_dc > 0.0, "r_dc must be > 0");
  require(k_t_rect > 0.0 && k_t_inv > 0.0, "transformer ratios must be > 0");
  require(v_ac_rect > 0.0 && v_ac_inv > 0.0, "AC voltages must be > 0");
  require(p_rated > 0.0 && i_rated > 0.0 && v_rated > 0.0, "ratings must be > 0");
  require(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < kPi / 2.0,
          "need 0 < alpha_min < alpha_max < pi/2");
  require(gamma_ref > 0.0 && gamma_ref < kPi / 2.0, "need 0 < gamma_ref < pi/2");
  require(k_max >= 1.0, "k_max must be >= 1");
  require(t_dc > 0.0, "t_dc must be > 0");
  require(voltage_floor > 0.0 && voltage_floor < 1.0, "voltage_floor must be in (0, 1)");
}

double ConverterParams::ideal_voltage_rect() const {
  return bridge_voltage_factor(n_bridges) * k_t_rect * v_ac_rect;
}

double ConverterParams::ideal_voltage_inv() const {
  return bridge_voltage_factor(n_bridges) * k_t_inv * v_ac_inv;
}

double power_to_current_order(double p_order, double u_d, double power_base,
                              const ConverterParams& params) {
  const double floor = params.voltage_floor * params.v_rated;
  if (!(u_d > floor)) {
    std::ostringstream msg;
    msg << "measured DC voltage " << u_d << " kV is at or below the floor " << floor << " kV";
    throw Error(ErrorCode::kVoltageFloor, msg.str());
  }
  const double i_order = p_order * power_base / (params.n_poles * u_d);
  return std::clamp(i_order, 0.0, params.max_current());
}

DcLinkState evaluate_operating_point(double i_d, const ConverterParams& params) {
  DcLinkState s;
  s.i_d = i_d;
  s.i_order = i_d;
  s.v_d_inv = params.ideal_voltage_inv() * std::cos(params.gamma_ref) -
              commutation_resistance(params.n_bridges, params.x_c_inv) * i_d;
  s.v_d_rect = s.v_d_inv + params.r_dc * i_d;
  const double cos_alpha =
      (s.v_d_rect + commutation_resistance(params.n_bridges, params.x_c_rect) * i_d) /
      params.ideal_voltage_rect();
  s.alpha = std::acos(std::clamp(cos_alpha, -1.0, 1.0));
  s.p_rect = params.n_poles * s.v_d_rect * i_d;
  s.p_inv = params.n_poles * s.v_d_inv * i_d;
  return s;
}

DcLinkState solve_steady_state(double i_order, const ConverterParams& params) {
  if (!(i_order > 0.0) || i_order > params.max_current()) {
    std::ostringstream msg;
    msg << "current order " << i_order << " kA outside (0, " << params.max_current() << "]";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  DcLinkState s = evaluate_operating_point(i_order, params);

  const double cos_alpha =
      (s.v_d_rect + commutation_resistance(params.n_bridges, params.x_c_rect) * i_order) /
      params.ideal_voltage_rect();
  if (cos_alpha < -1.0 || cos_alpha > 1.0) {
    std::ostringstream msg;
    msg << "firing-angle cosine " << cos_alpha << " at I_d=" << i_order << " kA";
    throw Error(ErrorCode::kCosineDomain, msg.str());
  }
  if (s.alpha < params.alpha_min || s.alpha > params.alpha_max) {
    std::ostringstream msg;
    msg << "alpha " << rad_to_deg(s.alpha) << " deg outside [" << rad_to_deg(params.alpha_min)
        << ", " << rad_to_deg(params.alpha_max) << "] at I_d=" << i_order << " kA";
    throw Error(ErrorCode::kAlphaOutOfRange, msg.str());
  }
  return s;
}

double step_power_tracking(double p_dc, double p_order, const ConverterParams& params,
                           double dt) {
  if (!(dt > 0.0) || dt > params.t_dc / 2.0) {
    std::ostringstream msg;
    msg << "dt=" << dt << " s must lie in (0, t_dc/2=" << params.t_dc / 2.0 << "]";
    throw Error(ErrorCode::kStepTooLarge, msg.str());
  }
  const double rate = 1.0 / params.t_dc;
  auto f = [&](double p) { return rate * (p_order - p); };
  const double k1 = f(p_dc);
  const double k2 = f(p_dc + 0.5 * dt * k1);
  const double k3 = f(p_dc + 0.5 * dt * k2);
  const double k4 = f(p_dc + dt * k3);
  const double next = p_dc + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  // The RK4 amplification factor is in (0, 1) for dt <= t_dc/2, so this only
  // removes rounding noise at the fixed point.
  return std::clamp(next, std::min(p_dc, p_order), std::max(p_dc, p_order));
}

DcLinkState apply_block(DcLinkState state) {
  state.blocked = true;
  state.i_d = 0.0;
  state.i_order = 0.0;
  state.p_rect = 0.0;
  state.p_inv = 0.0;
  state.p_dc = 0.0;
  return state;
}

double current_for_inverter_power(double p_inv_mw, const ConverterParams& params) {
  if (p_inv_mw <= 0.0) return 0.0;
  const double v0 = params.ideal_voltage_inv() * std::cos(params.gamma_ref);
  const double rc = commutation_resistance(params.n_bridges, params.x_c_inv);
  const double p = p_inv_mw / params.n_poles;
  const double disc = v0 * v0 - 4.0 * rc * p;
  if (disc < 0.0) {
    std::ostringstream msg;
    msg << p_inv_mw << " MW exceeds the inverter's transferable maximum "
        << params.n_poles * v0 * v0 / (4.0 * rc) << " MW";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return 2.0 * p / (v0 + std::sqrt(disc));
}

ConverterParams calibrate_transformer_ratios(ConverterParams params, double v_d_inv,
                                             double i_d, double alpha) {
  if (!(v_d_inv > 0.0) || !(i_d >= 0.0) || !(alpha > 0.0 && alpha < kPi / 2.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "calibration needs v_d_inv > 0, i_d >= 0 and 0 < alpha < pi/2");
  }
  const double factor = bridge_voltage_factor(params.n_bridges);
  const double v0_inv =
      (v_d_inv + commutation_resistance(params.n_bridges, params.x_c_inv) * i_d) /
      std::cos(params.gamma_ref);
  params.k_t_inv = v0_inv / (factor * params.v_ac_inv);

  const double v_d_rect = v_d_inv + params.r_dc * i_d;
  const double v0_rect =
      (v_d_rect + commutation_resistance(params.n_bridges, params.x_c_rect) * i_d) /
      std::cos(alpha);
  params.k_t_rect = v0_rect / (factor * params.v_ac_rect);
  return params;
}

}  // namespace edcps
