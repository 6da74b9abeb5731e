#include "edcps/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edcps/error.hpp"

namespace edcps {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "MidcScenario: " + what);
}

std::size_t event_line(const EventPayload& p) {
  if (const auto* b = std::get_if<BlockFault>(&p)) return b->line;
  if (const auto* f = std::get_if<FrequencyStep>(&p)) return f->line;
  if (const auto* c = std::get_if<CoefficientUpdate>(&p)) return c->line;
  return 0;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

void MidcScenario::validate() const {
  if (lines.empty()) invalid("at least one line is required");
  if (!(s_base > 0.0)) invalid("s_base must be > 0");
  if (!(sim.dt > 0.0)) invalid("sim.dt must be > 0");
  if (!(sim.t_end > sim.dt)) invalid("sim.t_end must exceed sim.dt");
  if (sim.decimation < 1) invalid("sim.decimation must be >= 1");
  receiving.validate();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const LineConfig& l = lines[i];
    try {
      l.converter.validate();
      l.droop.validate();
      l.sending.validate();
    } catch (const Error& e) {
      invalid("lines[" + std::to_string(i) + "] (" + l.name + "): " + e.detail());
    }
    if (l.name.empty()) invalid("lines[" + std::to_string(i) + "] has no name");
    for (std::size_t j = 0; j < i; ++j)
      if (lines[j].name == l.name) invalid("duplicate line name '" + l.name + "'");
    if (sim.dt > l.converter.t_dc / 2.0)
      invalid("sim.dt exceeds half of line '" + l.name + "' t_dc");
  }
  const CoordinatorConfig& c = coordinator;
  if (!(c.detection_threshold > 0.0)) invalid("coordinator.detection_threshold must be > 0");
  if (!(c.detection_hold >= 0.0)) invalid("coordinator.detection_hold must be >= 0");
  if (!(c.optimization_latency >= 0.0)) invalid("coordinator.optimization_latency must be >= 0");
  if (!(c.comm_delay >= 0.0)) invalid("coordinator.comm_delay must be >= 0");
  if (!(c.penalty_m > 0.0)) invalid("coordinator.penalty_m must be > 0");
  for (std::size_t k = 0; k < events.size(); ++k) {
    const TimedEvent& e = events[k];
    if (!(e.time >= 0.0 && e.time <= sim.t_end))
      invalid("events[" + std::to_string(k) + "] time outside [0, t_end]");
    if (!std::holds_alternative<LoadShed>(e.payload) && event_line(e.payload) >= lines.size()) {
      throw Error(ErrorCode::kBadIndex,
                  "MidcScenario: events[" + std::to_string(k) + "] refers to line " +
                      std::to_string(event_line(e.payload)));
    }
    if (const auto* u = std::get_if<CoefficientUpdate>(&e.payload); u && !(u->k_droop >= 0.0))
      invalid("events[" + std::to_string(k) + "] has a negative coefficient");
    if (const auto* s = std::get_if<LoadShed>(&e.payload); s && !(s->amount >= 0.0))
      invalid("events[" + std::to_string(k) + "] sheds a negative amount");
    if (const auto* f = std::get_if<FrequencyStep>(&e.payload); f && !(f->f_to > 0.0))
      invalid("events[" + std::to_string(k) + "] steps to a non-positive frequency");
  }
}

std::size_t MidcScenario::line_index(std::string_view name) const {
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].name == name) return i;
  throw Error(ErrorCode::kBadIndex, "no line named '" + std::string(name) + "'");
}

MidcScenario inject_frequency_step(MidcScenario scenario, std::size_t line, double t,
                                   double f_from, double f_to) {
  if (line >= scenario.lines.size()) {
    throw Error(ErrorCode::kBadIndex, "frequency step on line " + std::to_string(line) + " of " +
                                          std::to_string(scenario.lines.size()));
  }
  if (!(t >= 0.0 && t < scenario.sim.t_end))
    throw Error(ErrorCode::kInvalidArgument, "frequency step time must lie in [0, t_end)");
  scenario.events.push_back({t, FrequencyStep{line, f_from, f_to}});
  return scenario;
}

namespace {

struct Pending {
  double time;
  std::size_t seq;
  EventPayload payload;
  bool scheduled_by_coordinator;
};

// Continuous state layout: p_dc per line, then (omega, p_gov) per sending
// end, then (omega, p_gov) of the receiving end.
class Engine {
 public:
  explicit Engine(const MidcScenario& sc)
      : sc_(sc),
        m_(sc.lines.size()),
        x_(3 * m_ + 2),
        p0_(m_),
        p_order_(m_),
        blocked_(m_, false),
        droop_(m_),
        override_(m_),
        elec_(m_),
        k1_(x_.size()),
        k2_(x_.size()),
        k3_(x_.size()),
        k4_(x_.size()),
        tmp_(x_.size()) {
    for (std::size_t i = 0; i < m_; ++i) {
      const LineConfig& l = sc.lines[i];
      p0_[i] = l.droop.p_nominal;
      p_order_[i] = l.droop.p_nominal;
      droop_[i] = l.droop;
      x_[i] = l.droop.p_nominal;
      x_[m_ + 2 * i] = l.sending.omega_nominal;
      x_[m_ + 2 * i + 1] = 0.0;
      const auto delay = static_cast<std::size_t>(std::llround(l.droop.signal_delay / sc.sim.dt));
      delay_.emplace_back(delay, sc.receiving.omega_nominal);
      try {
        const double i_d = current_for_inverter_power(l.droop.p_nominal * sc.s_base, l.converter);
        elec_[i] = i_d > 0.0 ? solve_steady_state(i_d, l.converter)
                             : evaluate_operating_point(0.0, l.converter);
      } catch (const Error& e) {
        throw SimulationError(e, 0.0, i);
      }
    }
    x_[3 * m_] = sc.receiving.omega_nominal;
    x_[3 * m_ + 1] = 0.0;

    for (std::size_t k = 0; k < sc.events.size(); ++k)
      queue_.push_back({sc.events[k].time, seq_++, sc.events[k].payload, false});
    std::stable_sort(queue_.begin(), queue_.end(),
                     [](const Pending& a, const Pending& b) { return a.time < b.time; });

    if (sc.coordinator.mode != CoordinatorMode::kOff) {
      const auto hold =
          static_cast<std::size_t>(std::llround(sc.coordinator.detection_hold / sc.sim.dt));
      detector_.emplace(m_, sc.coordinator.detection_threshold, hold);
    }
  }

  SimulationTrace run() {
    const double dt = sc_.sim.dt;
    const auto steps = static_cast<std::size_t>(std::llround(sc_.sim.t_end / dt));
    init_trace();
    std::vector<double> powers(m_);
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      apply_due(t);
      if (detector_ && !detector_->fired()) {
        for (std::size_t i = 0; i < m_; ++i) powers[i] = x_[i];
        if (auto fault = detector_->push(t, powers)) {
          coordinate(*fault);
          apply_due(t);
        }
      }
      const double omega_re = x_[3 * m_];
      for (std::size_t i = 0; i < m_; ++i) {
        const double delayed = delay_[i].push(omega_re);
        const double measured = override_[i].value_or(delayed);
        if (!blocked_[i]) p_order_[i] = droop_power_order(measured, droop_[i]);
      }
      update_electrical(t);
      if (k % static_cast<std::size_t>(sc_.sim.decimation) == 0 || k == steps) record(t);
      if (k < steps) {
        rk4(dt);
        check_finite(t + dt);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) trace_.subsystems[i + 1].participating = !blocked_[i];
    trace_.metrics = compute_metrics(trace_);
    return std::move(trace_);
  }

 private:
  void init_trace() {
    SubsystemTrace re;
    re.name = "receiving";
    re.omega_nominal = sc_.receiving.omega_nominal;
    re.omega_min = sc_.receiving.omega_min;
    re.omega_max = sc_.receiving.omega_max;
    trace_.subsystems.push_back(std::move(re));
    for (const LineConfig& l : sc_.lines) {
      SubsystemTrace se;
      se.name = l.name + "_send";
      se.omega_nominal = l.sending.omega_nominal;
      se.omega_min = l.sending.omega_min;
      se.omega_max = l.sending.omega_max;
      trace_.subsystems.push_back(std::move(se));
      LineTrace lt;
      lt.name = l.name;
      trace_.lines.push_back(std::move(lt));
    }
  }

  void record(double t) {
    trace_.time.push_back(t);
    trace_.subsystems[0].omega.push_back(x_[3 * m_]);
    for (std::size_t i = 0; i < m_; ++i) {
      trace_.subsystems[i + 1].omega.push_back(x_[m_ + 2 * i]);
      LineTrace& lt = trace_.lines[i];
      lt.p_dc.push_back(x_[i]);
      lt.p_order.push_back(p_order_[i]);
      lt.i_d.push_back(elec_[i].i_d);
      lt.v_d_inv.push_back(elec_[i].v_d_inv);
      lt.alpha.push_back(elec_[i].alpha);
    }
    trace_.p_shed.push_back(shed_);
  }

  bool due(const Pending& p, double t) const {
    // Snap tolerance absorbs k*dt rounding; events still land on the first
    // boundary at or after their time.
    return p.time <= t + 1e-6 * sc_.sim.dt;
  }

  void apply_due(double t) {
    while (!queue_.empty() && due(queue_.front(), t)) {
      Pending p = std::move(queue_.front());
      queue_.erase(queue_.begin());
      apply(p, t);
    }
  }

  void log(double t, double scheduled, std::string kind, std::string detail) {
    trace_.events.push_back({t, scheduled, std::move(kind), std::move(detail)});
  }

  void apply(const Pending& p, double t) {
    if (const auto* b = std::get_if<BlockFault>(&p.payload)) {
      blocked_[b->line] = true;
      x_[b->line] = 0.0;
      elec_[b->line] = apply_block(elec_[b->line]);
      if (!trace_.disturbance_time) trace_.disturbance_time = t;
      log(t, p.time, "block", sc_.lines[b->line].name);
    } else if (const auto* f = std::get_if<FrequencyStep>(&p.payload)) {
      override_[f->line] = hz_to_rad(f->f_to);
      if (!trace_.disturbance_time) trace_.disturbance_time = t;
      log(t, p.time, "frequency_step",
          sc_.lines[f->line].name + " " + format_number(f->f_from) + "->" +
              format_number(f->f_to) + " Hz");
    } else if (const auto* c = std::get_if<CoefficientUpdate>(&p.payload)) {
      droop_[c->line] = update_coefficient(droop_[c->line], c->k_droop);
      log(t, p.time, "coefficient_update",
          sc_.lines[c->line].name + " k_droop=" + format_number(c->k_droop));
    } else if (const auto* s = std::get_if<LoadShed>(&p.payload)) {
      shed_ += s->amount;
      log(t, p.time, "load_shed", format_number(s->amount) + " p.u.");
    }
  }

  void schedule(const TimedEvent& e) {
    Pending p{e.time, seq_++, e.payload, true};
    auto pos = std::upper_bound(queue_.begin(), queue_.end(), p,
                                [](const Pending& a, const Pending& b) { return a.time < b.time; });
    queue_.insert(pos, std::move(p));
  }

  void coordinate(const FaultInfo& fault) {
    trace_.fault = fault;
    log(fault.detection_time, fault.detection_time, "fault_detected",
        sc_.lines[fault.line_index].name + " p_loss=" + format_number(fault.p_loss));

    std::vector<std::size_t> surviving;
    for (std::size_t i = 0; i < m_; ++i)
      if (i != fault.line_index && !blocked_[i]) surviving.push_back(i);
    if (surviving.empty()) {
      log(fault.detection_time, fault.detection_time, "optimization_failed",
          "no surviving line");
      return;
    }
    const double dispatch_at = fault.detection_time + sc_.coordinator.optimization_latency;

    OptimizationResult result;
    if (sc_.coordinator.mode == CoordinatorMode::kFixed) {
      for (std::size_t i : surviving) result.k_droop.push_back(droop_[i].k_droop);
    } else {
      OptimizationInput in;
      in.p_loss = fault.p_loss;
      in.k_g_recv = sc_.receiving.stiffness_on(sc_.s_base);
      in.penalty_m = sc_.coordinator.penalty_m;
      for (std::size_t i : surviving) {
        const LineConfig& l = sc_.lines[i];
        in.k_g_send.push_back(l.sending.stiffness_on(sc_.s_base));
        in.p_dc_current.push_back(x_[i]);
        in.p_dc_rated.push_back(l.converter.p_rated / sc_.s_base);
        in.k_max.push_back(l.converter.k_max);
        in.omega_bounds.push_back({l.sending.omega_min / l.sending.omega_nominal,
                                   l.sending.omega_max / l.sending.omega_nominal});
      }
      in.omega_bounds.push_back({sc_.receiving.omega_min / sc_.receiving.omega_nominal,
                                 sc_.receiving.omega_max / sc_.receiving.omega_nominal});
      trace_.optimization_input = in;
      try {
        result = optimize_droop(in);
      } catch (const Error& e) {
        log(fault.detection_time, fault.detection_time, "optimization_failed", e.what());
        return;
      }
      trace_.optimization = result;
      std::ostringstream detail;
      detail << "k_droop=";
      for (std::size_t k = 0; k < result.k_droop.size(); ++k)
        detail << (k ? "," : "") << result.k_droop[k];
      detail << " shed=" << result.dp_shed;
      log(dispatch_at, dispatch_at, "optimization", detail.str());
    }
    for (const TimedEvent& e :
         dispatch_coefficients(result, sc_.coordinator.comm_delay, dispatch_at, surviving))
      schedule(e);
  }

  void update_electrical(double t) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (blocked_[i]) continue;
      const ConverterParams& c = sc_.lines[i].converter;
      try {
        const double u_d = elec_[i].v_d_inv;
        const double i_order = power_to_current_order(x_[i], u_d, sc_.s_base, c);
        DcLinkState s =
            i_order > 0.0 ? solve_steady_state(i_order, c) : evaluate_operating_point(0.0, c);
        s.p_order = p_order_[i];
        s.p_dc = x_[i];
        elec_[i] = s;
      } catch (const Error& e) {
        throw SimulationError(e, t, i);
      }
    }
  }

  void derivatives(const std::vector<double>& x, std::vector<double>& dx) const {
    const double s_base = sc_.s_base;
    double re_net = shed_;
    for (std::size_t i = 0; i < m_; ++i) {
      const LineConfig& l = sc_.lines[i];
      dx[i] = blocked_[i] ? 0.0 : (p_order_[i] - x[i]) / l.converter.t_dc;
      const double delta = x[i] - p0_[i];
      re_net += delta;
      const SubsystemDerivatives d = subsystem_derivatives(
          {x[m_ + 2 * i], x[m_ + 2 * i + 1], 0.0}, -delta * s_base / l.sending.s_base, l.sending);
      dx[m_ + 2 * i] = d.d_omega;
      dx[m_ + 2 * i + 1] = d.d_p_gov;
    }
    const SubsystemDerivatives d =
        subsystem_derivatives({x[3 * m_], x[3 * m_ + 1], shed_},
                              re_net * s_base / sc_.receiving.s_base, sc_.receiving);
    dx[3 * m_] = d.d_omega;
    dx[3 * m_ + 1] = d.d_p_gov;
  }

  void rk4(double dt) {
    const std::size_t n = x_.size();
    derivatives(x_, k1_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = x_[j] + 0.5 * dt * k1_[j];
    derivatives(tmp_, k2_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = x_[j] + 0.5 * dt * k2_[j];
    derivatives(tmp_, k3_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = x_[j] + dt * k3_[j];
    derivatives(tmp_, k4_);
    for (std::size_t j = 0; j < n; ++j)
      x_[j] += dt / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

  void check_finite(double t) const {
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const bool omega_slot = j >= m_ && (j - m_) % 2 == 0;
      if (!std::isfinite(x_[j]) || (omega_slot && x_[j] <= 0.0)) {
        std::optional<std::size_t> line;
        if (j < m_) line = j;
        else if (j < 3 * m_) line = (j - m_) / 2;
        throw SimulationError(Error(ErrorCode::kNonFinite, "state left the admissible range"), t,
                              line);
      }
    }
  }

  const MidcScenario& sc_;
  std::size_t m_;
  std::vector<double> x_;
  std::vector<double> p0_;
  std::vector<double> p_order_;
  std::vector<bool> blocked_;
  std::vector<DroopSettings> droop_;
  std::vector<std::optional<double>> override_;
  std::vector<DelayLine> delay_;
  std::vector<DcLinkState> elec_;
  double shed_ = 0.0;
  std::vector<Pending> queue_;
  std::size_t seq_ = 0;
  std::optional<BlockDetector> detector_;
  SimulationTrace trace_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

SimulationTrace run(const MidcScenario& scenario) {
  scenario.validate();
  Engine engine(scenario);
  return engine.run();
}

Metrics compute_metrics(const SimulationTrace& trace) {
  if (trace.time.empty() || trace.subsystems.empty())
    throw Error(ErrorCode::kInvalidArgument, "metrics need a non-empty trace");
  const std::size_t n = trace.time.size();
  const SubsystemTrace& re = trace.subsystems.front();
  const double f_nom = rad_to_hz(re.omega_nominal);
  const std::size_t window = std::min(n - 1, static_cast<std::size_t>(0.9 * static_cast<double>(n)));

  Metrics m;
  m.nadir_hz = rad_to_hz(*std::min_element(re.omega.begin(), re.omega.end()));
  double sum = 0.0;
  for (std::size_t k = window; k < n; ++k) sum += rad_to_hz(re.omega[k]);
  const double f_final = sum / static_cast<double>(n - window);
  m.steady_deviation_hz = f_final - f_nom;

  constexpr double kSettleBandHz = 0.02;
  const double reference = trace.disturbance_time.value_or(trace.time.front());
  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < n; ++k) {
    if (trace.time[k] < reference) continue;
    if (std::abs(rad_to_hz(re.omega[k]) - f_final) > kSettleBandHz) last_outside = k;
  }
  if (!last_outside) {
    m.settling_time = 0.0;
  } else if (*last_outside + 1 < n) {
    m.settling_time = trace.time[*last_outside + 1] - reference;
  } else {
    m.settled = false;
    m.settling_time = trace.time.back() - reference;
  }

  for (std::size_t k = window; k < n; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const SubsystemTrace& s : trace.subsystems) {
      if (!s.participating) continue;
      const double w = s.omega[k] / s.omega_nominal;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    if (hi >= lo) m.spread_pu = std::max(m.spread_pu, hi - lo);
  }

  m.total_shed = trace.p_shed.empty() ? 0.0 : trace.p_shed.back();
  for (double w : re.omega)
    if (w < re.omega_min || w > re.omega_max) m.band_violated = true;
  m.final_in_band = re.omega.back() >= re.omega_min && re.omega.back() <= re.omega_max;
  return m;
}

}  // namespace edcps
