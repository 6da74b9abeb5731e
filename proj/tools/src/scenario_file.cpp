#include "edcps/cli/scenario_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "edcps/error.hpp"

namespace edcps::cli {

namespace {

enum class Check { kAny, kPositive, kNonNegative };

class TableReader {
 public:
  TableReader(const toml::table& table, std::string path, std::string_view source)
      : table_(table), path_(std::move(path)), source_(source) {}

  double number(std::string_view key, double fallback, Check check = Check::kAny) {
    const toml::node* node = take(key);
    if (!node) return fallback;
    std::optional<double> v;
    if (node->is_floating_point() || node->is_integer()) v = node->value<double>();
    if (!v) fail(key, "expected a number");
    if (check == Check::kPositive && !(*v > 0.0)) fail(key, "must be > 0");
    if (check == Check::kNonNegative && !(*v >= 0.0)) fail(key, "must be >= 0");
    return *v;
  }

  int integer(std::string_view key, int fallback, int minimum) {
    const toml::node* node = take(key);
    if (!node) return fallback;
    if (!node->is_integer()) fail(key, "expected an integer");
    const auto v = node->value<int64_t>().value();
    if (v < minimum) fail(key, "must be >= " + std::to_string(minimum));
    return static_cast<int>(v);
  }

  bool boolean(std::string_view key, bool fallback) {
    const toml::node* node = take(key);
    if (!node) return fallback;
    if (!node->is_boolean()) fail(key, "expected true or false");
    return node->value<bool>().value();
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* node = take(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) fail(key, "expected a string");
    return node->value<std::string>();
  }

  std::string required_string(std::string_view key) {
    if (!table_.contains(key)) fail(key, "missing");
    return *string(key);
  }

  double required_number(std::string_view key, Check check = Check::kAny) {
    if (!table_.contains(key)) fail(key, "missing");
    return number(key, 0.0, check);
  }

  const toml::table* table(std::string_view key) {
    const toml::node* node = take(key);
    if (!node) return nullptr;
    if (!node->is_table()) fail(key, "expected a table");
    return node->as_table();
  }

  const toml::array* array(std::string_view key) {
    const toml::node* node = take(key);
    if (!node) return nullptr;
    if (!node->is_array()) fail(key, "expected an array of tables");
    return node->as_array();
  }

  bool has(std::string_view key) const { return table_.contains(key); }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  /// Rejects keys nobody asked for (typos would otherwise be silently ignored).
  void finish() const {
    for (const auto& [key, node] : table_) {
      if (!used_.count(std::string(key.str()))) fail(key.str(), "unknown field");
    }
  }

  [[noreturn]] void fail(std::string_view key, const std::string& reason) const {
    const toml::node* node = table_.get(key);
    const auto line = node ? node->source().begin.line : table_.source().begin.line;
    std::ostringstream msg;
    msg << source_ << ":" << line << ": " << child(key) << ": " << reason;
    throw Error(ErrorCode::kParse, msg.str());
  }

  [[noreturn]] void fail_table(const std::string& reason) const {
    std::ostringstream msg;
    msg << source_ << ":" << table_.source().begin.line << ": "
        << (path_.empty() ? "<root>" : path_) << ": " << reason;
    throw Error(ErrorCode::kParse, msg.str());
  }

 private:
  const toml::node* take(std::string_view key) {
    used_.insert(std::string(key));
    return table_.get(key);
  }

  const toml::table& table_;
  std::string path_;
  std::string_view source_;
  std::set<std::string> used_;
};

const toml::table kEmpty;

ConverterParams read_converter(TableReader& r) {
  ConverterParams c;
  c.n_poles = r.integer("n_poles", c.n_poles, 1);
  c.n_bridges = r.integer("n_bridges", c.n_bridges, 1);
  c.x_c_rect = r.number("x_c_rect", c.x_c_rect, Check::kPositive);
  c.x_c_inv = r.number("x_c_inv", c.x_c_inv, Check::kPositive);
  c.r_dc = r.number("r_dc", c.r_dc, Check::kPositive);
  c.k_t_rect = r.number("k_t_rect", c.k_t_rect, Check::kPositive);
  c.k_t_inv = r.number("k_t_inv", c.k_t_inv, Check::kPositive);
  c.v_ac_rect = r.number("v_ac_rect", c.v_ac_rect, Check::kPositive);
  c.v_ac_inv = r.number("v_ac_inv", c.v_ac_inv, Check::kPositive);
  c.gamma_ref = r.number("gamma_ref", c.gamma_ref, Check::kPositive);
  c.alpha_min = r.number("alpha_min", c.alpha_min, Check::kPositive);
  c.alpha_max = r.number("alpha_max", c.alpha_max, Check::kPositive);
  c.p_rated = r.number("p_rated", c.p_rated, Check::kPositive);
  c.i_rated = r.number("i_rated", c.i_rated, Check::kPositive);
  c.v_rated = r.number("v_rated", c.v_rated, Check::kPositive);
  c.k_max = r.number("k_max", c.k_max, Check::kPositive);
  c.t_dc = r.number("t_dc", c.t_dc, Check::kPositive);
  c.voltage_floor = r.number("voltage_floor", c.voltage_floor, Check::kPositive);
  r.finish();
  return c;
}

SubsystemParams read_subsystem(TableReader& r) {
  SubsystemParams s;
  s.inertia_h = r.number("inertia_h", s.inertia_h, Check::kPositive);
  s.damping_d = r.number("damping_d", s.damping_d, Check::kNonNegative);
  s.k_gov = r.number("k_gov", s.k_gov, Check::kNonNegative);
  s.t_gov = r.number("t_gov", s.t_gov, Check::kPositive);
  s.omega_nominal = r.number("omega_nominal", s.omega_nominal, Check::kPositive);
  s.omega_min = r.number("omega_min", s.omega_min, Check::kPositive);
  s.omega_max = r.number("omega_max", s.omega_max, Check::kPositive);
  s.s_base = r.number("s_base", s.s_base, Check::kPositive);
  r.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    r.fail_table(e.detail());
  }
  return s;
}

LineConfig read_line(const toml::table& t, const std::string& path, std::string_view source,
                     const MidcScenario& sc) {
  TableReader r(t, path, source);
  LineConfig l;
  l.name = r.required_string("name");

  const toml::table* conv = r.table("converter");
  TableReader cr(conv ? *conv : kEmpty, r.child("converter"), source);
  l.converter = read_converter(cr);

  if (const toml::table* cal = r.table("calibration")) {
    TableReader kr(*cal, r.child("calibration"), source);
    if (conv && (conv->contains("k_t_rect") || conv->contains("k_t_inv")))
      kr.fail_table("give either calibration or explicit k_t_rect/k_t_inv, not both");
    const double v = kr.required_number("v_d_inv", Check::kPositive);
    const double i = kr.required_number("i_d", Check::kNonNegative);
    const double a = kr.required_number("alpha", Check::kPositive);
    kr.finish();
    try {
      l.converter = calibrate_transformer_ratios(l.converter, v, i, a);
    } catch (const Error& e) {
      kr.fail_table(e.detail());
    }
  }
  try {
    l.converter.validate();
  } catch (const Error& e) {
    cr.fail_table(e.detail());
  }

  const toml::table* droop = r.table("droop");
  if (!droop) r.fail("droop", "missing (p_nominal is required)");
  TableReader dr(*droop, r.child("droop"), source);
  DroopSettings& d = l.droop;
  d.k_droop = dr.number("k_droop", d.k_droop, Check::kNonNegative);
  d.p_nominal = dr.required_number("p_nominal", Check::kNonNegative);
  d.omega_nominal = dr.number("omega_nominal", sc.receiving.omega_nominal, Check::kPositive);
  d.deadband = dr.number("deadband", d.deadband, Check::kNonNegative);
  d.armed = dr.boolean("armed", d.armed);
  d.p_ceiling = dr.number("p_ceiling", l.converter.k_max * l.converter.p_rated / sc.s_base,
                          Check::kNonNegative);
  d.signal_delay = dr.number("signal_delay", d.signal_delay, Check::kNonNegative);
  dr.finish();
  try {
    d.validate();
  } catch (const Error& e) {
    dr.fail_table(e.detail());
  }

  const toml::table* send = r.table("sending");
  TableReader sr(send ? *send : kEmpty, r.child("sending"), source);
  l.sending = read_subsystem(sr);
  r.finish();
  return l;
}

TimedEvent read_event(const toml::table& t, const std::string& path, std::string_view source,
                      const MidcScenario& sc) {
  TableReader r(t, path, source);
  const std::string type = r.required_string("type");
  TimedEvent e;
  e.time = r.required_number("time", Check::kNonNegative);
  auto line = [&] {
    const std::string name = r.required_string("line");
    try {
      return sc.line_index(name);
    } catch (const Error&) {
      r.fail("line", "no line named '" + name + "'");
    }
  };
  if (type == "block") {
    e.payload = BlockFault{line()};
  } else if (type == "frequency_step") {
    const std::size_t l = line();
    const double nominal = rad_to_hz(sc.receiving.omega_nominal);
    e.payload = FrequencyStep{l, r.number("f_from", nominal, Check::kPositive),
                              r.required_number("f_to", Check::kPositive)};
  } else if (type == "coefficient_update") {
    const std::size_t l = line();
    e.payload = CoefficientUpdate{l, r.required_number("k_droop", Check::kNonNegative)};
  } else if (type == "load_shed") {
    e.payload = LoadShed{r.required_number("amount", Check::kNonNegative)};
  } else {
    r.fail("type", "unknown event type '" + type +
                       "' (block, frequency_step, coefficient_update, load_shed)");
  }
  r.finish();
  return e;
}

MidcScenario scenario_from_table(const toml::table& root, std::string_view source) {
  TableReader r(root, "", source);
  MidcScenario sc;
  sc.s_base = r.number("s_base", sc.s_base, Check::kPositive);

  if (const toml::table* t = r.table("sim")) {
    TableReader s(*t, "sim", source);
    sc.sim.dt = s.number("dt", sc.sim.dt, Check::kPositive);
    sc.sim.t_end = s.number("t_end", sc.sim.t_end, Check::kPositive);
    sc.sim.decimation = s.integer("decimation", sc.sim.decimation, 1);
    s.finish();
  }

  if (const toml::table* t = r.table("coordinator")) {
    TableReader c(*t, "coordinator", source);
    CoordinatorConfig& cc = sc.coordinator;
    if (auto mode = c.string("mode")) {
      if (*mode == "off") cc.mode = CoordinatorMode::kOff;
      else if (*mode == "optimize") cc.mode = CoordinatorMode::kOptimize;
      else if (*mode == "fixed") cc.mode = CoordinatorMode::kFixed;
      else c.fail("mode", "expected off, optimize or fixed");
    }
    cc.detection_threshold = c.number("detection_threshold", cc.detection_threshold, Check::kPositive);
    cc.detection_hold = c.number("detection_hold", cc.detection_hold, Check::kNonNegative);
    cc.optimization_latency =
        c.number("optimization_latency", cc.optimization_latency, Check::kNonNegative);
    cc.comm_delay = c.number("comm_delay", cc.comm_delay, Check::kNonNegative);
    cc.penalty_m = c.number("penalty_m", cc.penalty_m, Check::kPositive);
    c.finish();
  }

  {
    const toml::table* t = r.table("receiving");
    TableReader s(t ? *t : kEmpty, "receiving", source);
    sc.receiving = read_subsystem(s);
  }

  const toml::array* lines = r.array("lines");
  if (!lines || lines->empty()) r.fail("lines", "at least one [[lines]] entry is required");
  for (std::size_t i = 0; i < lines->size(); ++i) {
    const std::string path = "lines[" + std::to_string(i) + "]";
    const toml::table* t = lines->get(i)->as_table();
    if (!t) r.fail("lines", path + " is not a table");
    sc.lines.push_back(read_line(*t, path, source, sc));
  }

  if (const toml::array* events = r.array("events")) {
    for (std::size_t k = 0; k < events->size(); ++k) {
      const std::string path = "events[" + std::to_string(k) + "]";
      const toml::table* t = events->get(k)->as_table();
      if (!t) r.fail("events", path + " is not a table");
      sc.events.push_back(read_event(*t, path, source, sc));
    }
  }
  r.finish();

  try {
    sc.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string(source) + ": " + e.detail());
  }
  return sc;
}

toml::table parse_table(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw Error(ErrorCode::kParse, msg.str());
  }
}

toml::table subsystem_table(const SubsystemParams& s) {
  return toml::table{
      {"inertia_h", s.inertia_h}, {"damping_d", s.damping_d},
      {"k_gov", s.k_gov},         {"t_gov", s.t_gov},
      {"omega_nominal", s.omega_nominal}, {"omega_min", s.omega_min},
      {"omega_max", s.omega_max}, {"s_base", s.s_base},
  };
}

const char* mode_name(CoordinatorMode mode) {
  switch (mode) {
    case CoordinatorMode::kOff: return "off";
    case CoordinatorMode::kOptimize: return "optimize";
    case CoordinatorMode::kFixed: return "fixed";
  }
  return "off";
}

toml::table scenario_to_table(const MidcScenario& sc) {
  toml::table root;
  root.insert("s_base", sc.s_base);
  root.insert("sim", toml::table{{"dt", sc.sim.dt},
                                 {"t_end", sc.sim.t_end},
                                 {"decimation", sc.sim.decimation}});
  const CoordinatorConfig& c = sc.coordinator;
  root.insert("coordinator", toml::table{{"mode", mode_name(c.mode)},
                                         {"detection_threshold", c.detection_threshold},
                                         {"detection_hold", c.detection_hold},
                                         {"optimization_latency", c.optimization_latency},
                                         {"comm_delay", c.comm_delay},
                                         {"penalty_m", c.penalty_m}});
  root.insert("receiving", subsystem_table(sc.receiving));

  toml::array lines;
  for (const LineConfig& l : sc.lines) {
    const ConverterParams& cv = l.converter;
    toml::table conv{
        {"n_poles", cv.n_poles},     {"n_bridges", cv.n_bridges},   {"x_c_rect", cv.x_c_rect},
        {"x_c_inv", cv.x_c_inv},     {"r_dc", cv.r_dc},             {"k_t_rect", cv.k_t_rect},
        {"k_t_inv", cv.k_t_inv},     {"v_ac_rect", cv.v_ac_rect},   {"v_ac_inv", cv.v_ac_inv},
        {"gamma_ref", cv.gamma_ref}, {"alpha_min", cv.alpha_min},   {"alpha_max", cv.alpha_max},
        {"p_rated", cv.p_rated},     {"i_rated", cv.i_rated},       {"v_rated", cv.v_rated},
        {"k_max", cv.k_max},         {"t_dc", cv.t_dc},             {"voltage_floor", cv.voltage_floor},
    };
    const DroopSettings& d = l.droop;
    toml::table droop{
        {"k_droop", d.k_droop},   {"p_nominal", d.p_nominal}, {"omega_nominal", d.omega_nominal},
        {"deadband", d.deadband}, {"armed", d.armed},         {"p_ceiling", d.p_ceiling},
        {"signal_delay", d.signal_delay},
    };
    lines.push_back(toml::table{{"name", l.name},
                                {"converter", std::move(conv)},
                                {"droop", std::move(droop)},
                                {"sending", subsystem_table(l.sending)}});
  }
  root.insert("lines", std::move(lines));

  toml::array events;
  for (const TimedEvent& e : sc.events) {
    toml::table t{{"time", e.time}};
    if (const auto* b = std::get_if<BlockFault>(&e.payload)) {
      t.insert("type", "block");
      t.insert("line", sc.lines.at(b->line).name);
    } else if (const auto* f = std::get_if<FrequencyStep>(&e.payload)) {
      t.insert("type", "frequency_step");
      t.insert("line", sc.lines.at(f->line).name);
      t.insert("f_from", f->f_from);
      t.insert("f_to", f->f_to);
    } else if (const auto* u = std::get_if<CoefficientUpdate>(&e.payload)) {
      t.insert("type", "coefficient_update");
      t.insert("line", sc.lines.at(u->line).name);
      t.insert("k_droop", u->k_droop);
    } else if (const auto* s = std::get_if<LoadShed>(&e.payload)) {
      t.insert("type", "load_shed");
      t.insert("amount", s->amount);
    }
    events.push_back(std::move(t));
  }
  if (!events.empty()) root.insert("events", std::move(events));
  return root;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& token, std::string_view path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used == token.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kParse, std::string(path) + ": '" + token + "' is not a number");
}

// Assigns value(s) to the numeric leaf addressed by parts[depth..] below node.
void assign(toml::node& node, const std::vector<std::string>& parts, std::size_t depth,
            const std::vector<double>& values, std::size_t& next, std::string_view path) {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::kParse, "--param " + std::string(path) + ": " + why);
  };
  if (depth == parts.size()) {
    if (!(node.is_floating_point() || node.is_integer())) bad("does not address a numeric field");
    if (values.size() > 1 && next >= values.size()) bad("too few values for the matched elements");
    const double v = values.size() == 1 ? values[0] : values[next];
    ++next;
    if (node.is_integer()) {
      if (v != static_cast<double>(static_cast<int64_t>(v))) bad("integer field needs a whole number");
      *node.as_integer() = static_cast<int64_t>(v);
    } else {
      *node.as_floating_point() = v;
    }
    return;
  }
  const std::string& key = parts[depth];
  if (toml::table* t = node.as_table()) {
    toml::node* child = t->get(key);
    if (!child) bad("no field '" + key + "'");
    assign(*child, parts, depth + 1, values, next, path);
  } else if (toml::array* a = node.as_array()) {
    if (key == "*") {
      for (auto& element : *a) assign(element, parts, depth + 1, values, next, path);
      return;
    }
    std::size_t index = a->size();
    try {
      index = std::stoul(key);
    } catch (const std::exception&) {
    }
    if (index >= a->size()) {
      // Lines may also be addressed by name.
      for (std::size_t k = 0; k < a->size(); ++k) {
        const toml::table* t = a->get(k)->as_table();
        if (t && t->get("name") && t->get("name")->value<std::string>() == key) index = k;
      }
    }
    if (index >= a->size()) bad("no element '" + key + "'");
    assign(*a->get(index), parts, depth + 1, values, next, path);
  } else {
    bad("'" + key + "' is below a scalar");
  }
}

}  // namespace

MidcScenario parse_scenario(std::string_view text, std::string_view source_name) {
  return scenario_from_table(parse_table(text, source_name), source_name);
}

MidcScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const MidcScenario& scenario) {
  std::ostringstream out;
  out << scenario_to_table(scenario) << '\n';
  return out.str();
}

MidcScenario with_field(const MidcScenario& scenario, std::string_view path,
                        std::string_view value) {
  toml::table root = scenario_to_table(scenario);
  const std::vector<std::string> parts = split(path, '.');
  std::vector<double> values;
  for (const std::string& token : split(value, ':')) values.push_back(parse_double(token, path));
  std::size_t used = 0;
  assign(root, parts, 0, values, used, path);
  if (values.size() > 1 && used != values.size()) {
    throw Error(ErrorCode::kParse, "--param " + std::string(path) + ": " +
                                       std::to_string(values.size()) + " values for " +
                                       std::to_string(used) + " matched fields");
  }
  return scenario_from_table(root, "--param " + std::string(path));
}

}  // namespace edcps::cli
