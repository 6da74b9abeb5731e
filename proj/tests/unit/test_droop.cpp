#include <doctest.h>

#include "edcps/droop.hpp"
#include "edcps/error.hpp"

using namespace edcps;

namespace {

DroopSettings armed(double k) {
  DroopSettings s;
  s.k_droop = k;
  s.p_nominal = 0.66;
  s.p_ceiling = 0.858;
  s.armed = true;
  return s;
}

}  // namespace

TEST_CASE("droop order for a 0.35 Hz step") {
  CHECK(droop_power_order(hz_to_rad(49.65), armed(20.0)) == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(droop_power_order(hz_to_rad(50.35), armed(20.0)) == doctest::Approx(0.52).epsilon(1e-12));
}

TEST_CASE("deadband") {
  const DroopSettings s = armed(20.0);
  CHECK(droop_power_order(hz_to_rad(50.0), s) == 0.66);
  CHECK(droop_power_order(hz_to_rad(49.9801), s) == 0.66);
  CHECK(droop_power_order(hz_to_rad(50.019), s) == 0.66);
  // Beyond the band the full deviation counts.
  CHECK(droop_power_order(hz_to_rad(49.97), s) == doctest::Approx(0.66 + 20.0 * 0.0006));
}

TEST_CASE("ceiling and floor") {
  CHECK(droop_power_order(hz_to_rad(45.0), armed(20.0)) == 0.858);
  CHECK(droop_power_order(hz_to_rad(55.0), armed(20.0)) == 0.0);
}

TEST_CASE("linear in the active region") {
  const DroopSettings s = armed(17.5);
  const double d1 = 0.002, d2 = 0.006;
  const double p1 = droop_power_order(s.omega_nominal * (1.0 - d1), s);
  const double p2 = droop_power_order(s.omega_nominal * (1.0 - d2), s);
  CHECK((p2 - p1) / (d2 - d1) == doctest::Approx(17.5).epsilon(1e-9));
}

TEST_CASE("output bounded for any frequency") {
  const DroopSettings s = armed(200.0);
  for (double f = 40.0; f <= 60.0; f += 0.01) {
    const double p = droop_power_order(hz_to_rad(f), s);
    CHECK(p >= 0.0);
    CHECK(p <= s.p_ceiling);
  }
}

TEST_CASE("disarmed controller holds nominal") {
  DroopSettings s = armed(20.0);
  s.armed = false;
  for (double f : {45.0, 49.0, 50.0, 51.0, 55.0}) CHECK(droop_power_order(hz_to_rad(f), s) == 0.66);
}

TEST_CASE("coefficient updates") {
  const DroopSettings s = update_coefficient(DroopSettings{.p_nominal = 0.5, .p_ceiling = 1.0}, 12.0);
  CHECK(s.armed);
  CHECK(s.k_droop == 12.0);

  const DroopSettings zero = update_coefficient(s, 0.0);
  CHECK(zero.armed);
  for (double f : {49.0, 49.5, 50.5}) CHECK(droop_power_order(hz_to_rad(f), zero) == 0.5);

  try {
    update_coefficient(s, -1.0);
    FAIL("negative coefficient accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNegativeCoefficient);
  }
}

TEST_CASE("delay line") {
  DelayLine none(0, 1.0);
  CHECK(none.push(3.0) == 3.0);

  DelayLine d(3, 50.0);
  CHECK(d.push(1.0) == 50.0);
  CHECK(d.push(2.0) == 50.0);
  CHECK(d.push(3.0) == 50.0);
  CHECK(d.push(4.0) == 1.0);
  CHECK(d.push(5.0) == 2.0);
  CHECK(d.delay_samples() == 3);
}

TEST_CASE("settings validation") {
  DroopSettings s = armed(10.0);
  CHECK_NOTHROW(s.validate());
  s.k_droop = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = armed(10.0);
  s.p_nominal = 0.9;  // above the ceiling
  CHECK_THROWS_AS(s.validate(), Error);
}
