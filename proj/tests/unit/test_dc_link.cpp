#include <doctest.h>

#include <cmath>

#include "dc_newton.hpp"
#include "edcps/dc_link.hpp"
#include "edcps/error.hpp"

using namespace edcps;

namespace {

ConverterParams rated_660() {
  ConverterParams p;
  return calibrate_transformer_ratios(p, 600.0, 1.1, deg_to_rad(15.0));
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("power to current order") {
  const ConverterParams p = rated_660();
  CHECK(power_to_current_order(0.66, 600.0, 1000.0, p) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(power_to_current_order(0.0, 600.0, 1000.0, p) == 0.0);
  CHECK(power_to_current_order(-0.2, 600.0, 1000.0, p) == 0.0);
  CHECK(power_to_current_order(5.0, 600.0, 1000.0, p) == doctest::Approx(p.max_current()));

  ConverterParams bipole = p;
  bipole.n_poles = 2;
  CHECK(power_to_current_order(0.66, 600.0, 1000.0, bipole) == doctest::Approx(0.55));

  CHECK(code_of([&] { power_to_current_order(0.5, 60.0, 1000.0, p); }) == ErrorCode::kVoltageFloor);
  CHECK(code_of([&] { power_to_current_order(0.5, 0.0, 1000.0, p); }) == ErrorCode::kVoltageFloor);
  CHECK_NOTHROW(power_to_current_order(0.5, 60.1, 1000.0, p));
}

TEST_CASE("calibration lands on the requested operating point") {
  const ConverterParams p = rated_660();
  const DcLinkState s = solve_steady_state(1.1, p);
  CHECK(s.v_d_inv == doctest::Approx(600.0).epsilon(1e-12));
  CHECK(s.alpha == doctest::Approx(deg_to_rad(15.0)).epsilon(1e-12));
  CHECK(s.p_inv == doctest::Approx(660.0).epsilon(1e-12));
}

TEST_CASE("steady state agrees with an independent Newton solve") {
  const ConverterParams p = rated_660();
  for (double i = 0.3; i <= p.max_current(); i += 0.05) {
    const DcLinkState s = solve_steady_state(i, p);
    const oracle::LinkPoint ref = oracle::newton_solve(i, p);
    CHECK(s.v_d_inv == doctest::Approx(ref.v_d_inv).epsilon(1e-12));
    CHECK(s.v_d_rect == doctest::Approx(ref.v_d_rect).epsilon(1e-12));
    CHECK(s.alpha == doctest::Approx(ref.alpha).epsilon(1e-12));

    const auto r = oracle::link_residuals({s.v_d_inv, s.v_d_rect, s.alpha}, s.i_d, p);
    for (double v : r) CHECK(std::abs(v) < 1e-10);
  }
}

TEST_CASE("power balance across the line") {
  ConverterParams p = rated_660();
  for (int poles : {1, 2}) {
    p.n_poles = poles;
    for (int k = 1; k <= 100; ++k) {
      const double i = p.max_current() * k / 100.0;
      DcLinkState s;
      try {
        s = solve_steady_state(i, p);
      } catch (const Error&) {
        continue;  // outside the firing-angle window
      }
      const double loss = poles * p.r_dc * s.i_d * s.i_d;
      CHECK(std::abs((s.p_rect - s.p_inv) - loss) <= 1e-9 * loss);
    }
  }
}

TEST_CASE("raising the current order") {
  const ConverterParams p = rated_660();
  DcLinkState prev = solve_steady_state(0.8, p);
  for (double i = 0.81; i <= p.max_current(); i += 0.01) {
    const DcLinkState s = solve_steady_state(i, p);
    CHECK(s.i_d > prev.i_d);
    CHECK(s.p_inv > prev.p_inv);
    CHECK(s.alpha < prev.alpha);
    CHECK(s.v_d_inv < prev.v_d_inv);
    prev = s;
  }
}

TEST_CASE("steady-state error paths") {
  const ConverterParams p = rated_660();
  CHECK(code_of([&] { solve_steady_state(0.0, p); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { solve_steady_state(p.max_current() * 1.01, p); }) ==
        ErrorCode::kInvalidArgument);

  ConverterParams narrow = p;
  narrow.alpha_max = deg_to_rad(14.0);
  CHECK(code_of([&] { solve_steady_state(1.1, narrow); }) == ErrorCode::kAlphaOutOfRange);

  ConverterParams weak = p;
  weak.k_t_rect = 0.3;  // rectifier cannot reach the required voltage
  CHECK(code_of([&] { solve_steady_state(1.1, weak); }) == ErrorCode::kCosineDomain);
}

TEST_CASE("zero-current operating point") {
  const ConverterParams p = rated_660();
  const DcLinkState s = evaluate_operating_point(0.0, p);
  CHECK(s.i_d == 0.0);
  CHECK(s.p_inv == 0.0);
  CHECK(s.v_d_inv == doctest::Approx(p.ideal_voltage_inv() * std::cos(p.gamma_ref)));
}

TEST_CASE("power tracking follows the first-order lag") {
  const ConverterParams p = rated_660();
  const double dt = 1e-3;
  double x = 0.66;
  for (int k = 1; k <= 500; ++k) {
    x = step_power_tracking(x, 0.80, p, dt);
    const double exact = 0.80 + (0.66 - 0.80) * std::exp(-k * dt / p.t_dc);
    CHECK(std::abs(x - exact) < 1e-10);
    CHECK(x >= 0.66);
    CHECK(x <= 0.80);
  }
  // Falling order stays between the endpoints too.
  CHECK(step_power_tracking(0.8, 0.0, p, p.t_dc / 2) >= 0.0);
  CHECK(step_power_tracking(0.8, 0.0, p, p.t_dc / 2) <= 0.8);

  CHECK(code_of([&] { step_power_tracking(0.5, 0.6, p, p.t_dc / 2 * 1.0001); }) ==
        ErrorCode::kStepTooLarge);
  CHECK(code_of([&] { step_power_tracking(0.5, 0.6, p, 0.0); }) == ErrorCode::kStepTooLarge);
}

TEST_CASE("block removes all transfer") {
  DcLinkState s = solve_steady_state(1.1, rated_660());
  s.p_order = 0.66;
  s.p_dc = 0.66;
  const DcLinkState b = apply_block(s);
  CHECK(b.blocked);
  CHECK(b.i_d == 0.0);
  CHECK(b.p_inv == 0.0);
  CHECK(b.p_rect == 0.0);
  CHECK(b.p_dc == 0.0);
  CHECK(b.p_order == 0.66);
}

TEST_CASE("current for a requested inverter power") {
  const ConverterParams p = rated_660();
  for (double mw : {50.0, 330.0, 660.0, 700.0}) {
    const double i = current_for_inverter_power(mw, p);
    CHECK(evaluate_operating_point(i, p).p_inv == doctest::Approx(mw).epsilon(1e-12));
  }
  CHECK(current_for_inverter_power(0.0, p) == 0.0);
  CHECK(code_of([&] { current_for_inverter_power(1e6, p); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("parameter validation") {
  ConverterParams p;
  CHECK_NOTHROW(p.validate());
  p.r_dc = 0.0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::kInvalidArgument);
  p = {};
  p.alpha_min = p.alpha_max;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::kInvalidArgument);
}
