#pragma once

#include <cstddef>
#include <vector>

#include "edcps/units.hpp"

namespace edcps {

/// Configuration of one line's P-f droop controller.
///
/// The frequency deviation is taken in per-unit of omega_nominal and the
/// power in per-unit of the system base, so k_droop = 20 turns a 0.35 Hz dip
/// at 50 Hz into a 0.14 p.u. rise of the power order.
struct DroopSettings {
  double k_droop = 0.0;
  double p_nominal = 0.0;  // pre-fault power set-point, p.u.
  double omega_nominal = kDefaultNominalOmega;
  double deadband = 0.0004;  // p.u. of omega_nominal (0.02 Hz at 50 Hz)
  bool armed = false;
  double p_ceiling = 0.0;  // p.u., k_max * P_rated / S_base
  double signal_delay = 0.05;

  void validate() const;

  bool operator==(const DroopSettings&) const = default;
};

/// Power order for a measured receiving-end angular frequency. Returns
/// p_nominal while disarmed or inside the deadband; otherwise
/// p_nominal + k_droop * (omega_nominal - omega_re) / omega_nominal, clipped
/// to [0, p_ceiling].
double droop_power_order(double omega_re, const DroopSettings& settings);

/// Coefficient broadcast from the coordination layer: replaces k_droop and
/// arms the controller. Throws kNegativeCoefficient for k_new < 0.
DroopSettings update_coefficient(DroopSettings settings, double k_new);

/// Fixed-length transport delay over uniformly spaced samples.
class DelayLine {
 public:
  DelayLine(std::size_t delay_samples, double initial);

  /// Feeds the newest sample and returns the one pushed delay_samples ago
  /// (the initial value until the line has filled).
  double push(double sample);

  std::size_t delay_samples() const { return buffer_.size(); }

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
};

}  // namespace edcps
