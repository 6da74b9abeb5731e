#include "edcps/grid.hpp"

#include <sstream>
#include <string>

#include "edcps/error.hpp"

namespace edcps {

void SubsystemParams::validate() const {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::kInvalidArgument, std::string("SubsystemParams: ") + what);
  };
  if (!(inertia_h > 0.0)) fail("inertia_h must be > 0");
  if (!(damping_d >= 0.0)) fail("damping_d must be >= 0");
  if (!(k_gov >= 0.0)) fail("k_gov must be >= 0");
  if (!(t_gov > 0.0)) fail("t_gov must be > 0");
  if (!(s_base > 0.0)) fail("s_base must be > 0");
  if (!(omega_min < omega_nominal && omega_nominal < omega_max))
    fail("need omega_min < omega_nominal < omega_max");
}

SubsystemDerivatives subsystem_derivatives(const SubsystemState& state, double p_net,
                                           const SubsystemParams& params) {
  const double dw = (state.omega - params.omega_nominal) / params.omega_nominal;
  SubsystemDerivatives d;
  d.d_omega = params.omega_nominal * (p_net + state.p_gov - params.damping_d * dw) /
              (2.0 * params.inertia_h);
  d.d_p_gov = (-params.k_gov * dw - state.p_gov) / params.t_gov;
  return d;
}

double steady_state_frequency(double p_deficit, const SubsystemParams& params) {
  const double stiffness = params.k_gov + params.damping_d;
  if (stiffness == 0.0) {
    if (p_deficit == 0.0) return params.omega_nominal;
    std::ostringstream msg;
    msg << "no governor or damping to absorb a deficit of " << p_deficit << " p.u.";
    throw Error(ErrorCode::kZeroStiffness, msg.str());
  }
  return params.omega_nominal * (1.0 - p_deficit / stiffness);
}

}  // namespace edcps
