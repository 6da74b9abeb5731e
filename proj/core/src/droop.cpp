#include "edcps/droop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edcps/error.hpp"

namespace edcps {

void DroopSettings::validate() const {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::kInvalidArgument, std::string("DroopSettings: ") + what);
  };
  if (!(k_droop >= 0.0)) fail("k_droop must be >= 0");
  if (!(deadband >= 0.0)) fail("deadband must be >= 0");
  if (!(omega_nominal > 0.0)) fail("omega_nominal must be > 0");
  if (!(p_nominal >= 0.0)) fail("p_nominal must be >= 0");
  if (!(p_ceiling >= p_nominal)) fail("p_ceiling must be >= p_nominal");
  if (!(signal_delay >= 0.0)) fail("signal_delay must be >= 0");
}

double droop_power_order(double omega_re, const DroopSettings& settings) {
  if (!settings.armed) return settings.p_nominal;
  const double deviation = (settings.omega_nominal - omega_re) / settings.omega_nominal;
  if (std::abs(deviation) <= settings.deadband) return settings.p_nominal;
  const double order = settings.p_nominal + settings.k_droop * deviation;
  return std::clamp(order, 0.0, settings.p_ceiling);
}

DroopSettings update_coefficient(DroopSettings settings, double k_new) {
  if (!(k_new >= 0.0)) {
    std::ostringstream msg;
    msg << "droop coefficient " << k_new << " is negative";
    throw Error(ErrorCode::kNegativeCoefficient, msg.str());
  }
  settings.k_droop = k_new;
  settings.armed = true;
  return settings;
}

DelayLine::DelayLine(std::size_t delay_samples, double initial)
    : buffer_(delay_samples, initial) {}

double DelayLine::push(double sample) {
  if (buffer_.empty()) return sample;
  const double out = buffer_[head_];
  buffer_[head_] = sample;
  head_ = (head_ + 1) % buffer_.size();
  return out;
}

}  // namespace edcps
