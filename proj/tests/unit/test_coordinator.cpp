#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edcps/coordinator.hpp"
#include "edcps/error.hpp"
#include "eq7_check.hpp"
#include "random_instances.hpp"

using namespace edcps;

namespace {

OptimizationInput two_line() {
  OptimizationInput in;
  in.p_loss = 0.2;
  in.k_g_send = {10.0, 10.0};
  in.k_g_recv = 10.0;
  in.p_dc_current = {0.6, 0.6};
  in.p_dc_rated = {0.8, 0.8};
  in.k_max = {1.1, 1.1};
  in.omega_bounds.assign(3, FrequencyBand{});
  return in;
}

SampledSeries step_series(std::size_t pre, std::size_t post, double before, double after) {
  SampledSeries s{0.0, 1e-3, {{}, {}}};
  for (std::size_t k = 0; k < pre + post; ++k) {
    s.values[0].push_back(0.6);
    s.values[1].push_back(k < pre ? before : after);
  }
  return s;
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

TEST_CASE("block detection") {
  const auto fault = detect_block(step_series(100, 50, 0.54, 0.0), 0.1, 0.02);
  REQUIRE(fault);
  CHECK(fault->line_index == 1);
  CHECK(fault->p_loss == doctest::Approx(0.54));
  CHECK(fault->detection_time == doctest::Approx(0.12));

  CHECK_FALSE(detect_block(step_series(100, 50, 0.54, 0.3), 0.1, 0.02));
  CHECK_FALSE(detect_block(step_series(100, 10, 0.54, 0.0), 0.1, 0.02));  // too short a drop
  CHECK(code_of([] { detect_block(step_series(10, 0, 0.5, 0.5), 0.1, 0.02); }) ==
        ErrorCode::kInsufficientHistory);
}

TEST_CASE("detector fires once") {
  BlockDetector d(1, 0.1, 2);
  int fired = 0;
  for (int k = 0; k < 20; ++k) {
    const double p = k < 5 ? 0.5 : 0.0;
    if (d.push(k * 0.01, std::span<const double>(&p, 1))) ++fired;
  }
  CHECK(fired == 1);
  CHECK(d.fired());
}

TEST_CASE("two identical lines share the loss equally") {
  const OptimizationInput in = two_line();
  const OptimizationResult r = optimize_droop(in);
  CHECK(r.k_droop[0] == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(r.k_droop[1] == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(r.dp_shed < 1e-12);
  for (double w : r.omega_pred) CHECK(w == doctest::Approx(1.0 - 0.2 / 30.0).epsilon(1e-12));
  CHECK(oracle::max_violation(in, r).amount < 1e-12);
}

TEST_CASE("zero deficit") {
  OptimizationInput in = two_line();
  in.p_loss = 0.0;
  const OptimizationResult r = optimize_droop(in);
  for (double k : r.k_droop) CHECK(k == 0.0);
  for (double p : r.dp_dc) CHECK(p == 0.0);
  CHECK(r.dp_shed == 0.0);
  CHECK(r.objective == 0.0);
}

TEST_CASE("unequal stiffness gives equal frequencies") {
  OptimizationInput in = two_line();
  in.k_g_send = {30.0, 25.0, 29.0};
  in.k_g_recv = 30.0;
  in.p_dc_current = {0.66, 0.63, 0.65};
  in.p_dc_rated = {0.8, 0.8, 0.8};
  in.k_max = {1.1, 1.1, 1.1};
  in.omega_bounds.assign(4, FrequencyBand{});
  in.p_loss = 0.54;
  const OptimizationResult r = optimize_droop(in);
  // With all frequencies equal the coefficient equals the sending stiffness.
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.k_droop[i] == doctest::Approx(in.k_g_send[i]).epsilon(1e-9));
  const auto [lo, hi] = std::minmax_element(r.omega_pred.begin(), r.omega_pred.end());
  CHECK(*hi - *lo < 1e-8);
}

TEST_CASE("headroom caps force shedding") {
  OptimizationInput in = two_line();
  in.k_g_send = {30.0, 30.0};
  in.k_g_recv = 5.0;
  in.p_dc_current = {0.75, 0.7};
  in.p_loss = 0.6;
  const OptimizationResult r = optimize_droop(in);
  CHECK(r.dp_dc[0] == doctest::Approx(0.13));
  CHECK(r.dp_dc[1] == doctest::Approx(0.18));
  CHECK(r.omega_pred[2] == doctest::Approx(0.99));
  CHECK(r.dp_shed == doctest::Approx(0.6 - 0.31 - 0.05));
  CHECK(std::find(r.active_constraints.begin(), r.active_constraints.end(), "headroom[0]") !=
        r.active_constraints.end());
  CHECK(oracle::max_violation(in, r).amount < 1e-10);
}

TEST_CASE("penalty makes shedding a last resort") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    OptimizationInput in = oracle::random_instance(rng);
    in.penalty_m = 1e4;
    // Zero-shed feasibility: equal-frequency split within bands and headroom.
    double total = in.k_g_recv;
    for (double k : in.k_g_send) total += k;
    const double d = in.p_loss / total;
    bool ok = d <= 0.01;
    for (std::size_t i = 0; i < in.num_lines(); ++i)
      ok = ok && in.p_dc_current[i] + in.k_g_send[i] * d <= in.k_max[i] * in.p_dc_rated[i];
    if (!ok) continue;
    ++checked;
    CHECK(optimize_droop(in).dp_shed < 1e-6);
  }
  CHECK(checked > 20);
}

TEST_CASE("optimizer against the grid search") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const OptimizationInput in = oracle::random_instance(rng);
    const OptimizationResult r = optimize_droop(in);
    CHECK(oracle::max_violation(in, r).amount < 1e-8);
    CHECK(oracle::objective(in, r) == doctest::Approx(r.objective).epsilon(1e-9));
    CHECK(r.dp_dc.size() == in.num_lines());

    const OptimizationResult grid = brute_force_droop(in, 20);
    CHECK(oracle::max_violation(in, grid).amount < 1e-8);
    CHECK(r.objective <= grid.objective + 1e-9 * (1.0 + grid.objective));
    CHECK(grid.objective - r.objective <= grid_objective_variation(in, grid, 20) + 1e-12);
  }
}

TEST_CASE("library residuals agree with the independent checker") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const OptimizationInput in = oracle::random_instance(rng);
    OptimizationResult r = optimize_droop(in);
    CHECK(evaluate_constraints(in, r).max() < 1e-8);
    r.dp_shed += 0.1;  // break the receiving-end balance
    CHECK(evaluate_constraints(in, r).max() > 0.05);
    CHECK(oracle::max_violation(in, r).amount > 0.05);
  }
}

TEST_CASE("infeasible band and bad input") {
  OptimizationInput in = two_line();
  in.omega_bounds[1] = {0.995, 0.999};
  CHECK(code_of([&] { optimize_droop(in); }) == ErrorCode::kInfeasible);

  in = two_line();
  in.p_dc_rated.pop_back();
  CHECK(code_of([&] { optimize_droop(in); }) == ErrorCode::kInvalidArgument);

  in = two_line();
  in.p_loss = -0.1;
  CHECK(code_of([&] { optimize_droop(in); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("receiver without stiffness") {
  OptimizationInput in = two_line();
  in.k_g_recv = 0.0;
  const OptimizationResult r = optimize_droop(in);
  CHECK(oracle::max_violation(in, r).amount < 1e-8);
  CHECK(r.dp_shed < 1e-9);
}

TEST_CASE("dispatch") {
  OptimizationResult r;
  r.k_droop = {30.0, 25.0};
  const std::vector<std::size_t> ids = {0, 2};
  auto events = dispatch_coefficients(r, 0.1, 8.3, ids);
  REQUIRE(events.size() == 2);
  CHECK(events[0].time == 8.3 + 0.1);
  CHECK(std::get<CoefficientUpdate>(events[1].payload).line == 2);
  CHECK(std::get<CoefficientUpdate>(events[1].payload).k_droop == 25.0);

  r.dp_shed = 0.05;
  events = dispatch_coefficients(r, 0.0, 8.3);
  REQUIRE(events.size() == 3);
  CHECK(events[0].time == 8.3);
  CHECK(std::get<LoadShed>(events[2].payload).amount == 0.05);
}

TEST_CASE("json round trip") {
  const OptimizationInput in = two_line();
  CHECK(optimization_input_from_json(to_json(in)) == in);
  const OptimizationResult r = optimize_droop(in);
  CHECK(optimization_result_from_json(to_json(r)) == r);

  const OptimizationInput scalar = optimization_input_from_json(
      R"({"p_loss":0.1,"k_g_send":[5,6],"k_g_recv":3,"p_dc_current":[0.5,0.5],"p_dc_rated":[1,1],"k_max":1.2})");
  CHECK(scalar.k_max == std::vector<double>{1.2, 1.2});
  CHECK(scalar.omega_bounds.size() == 3);

  CHECK(code_of([] { optimization_input_from_json("{"); }) == ErrorCode::kParse);
  CHECK(code_of([] { optimization_input_from_json(R"({"p_loss":"x"})"); }) == ErrorCode::kParse);
  try {
    optimization_input_from_json(R"({"p_loss":0.1,"k_g_send":[5],"k_g_recv":3,"p_dc_current":[0.5]})");
    FAIL("missing field accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("p_dc_rated") != std::string::npos);
  }
}
