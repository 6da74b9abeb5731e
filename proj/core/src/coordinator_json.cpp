#include <json.hpp>

#include "edcps/coordinator.hpp"
#include "edcps/error.hpp"

namespace edcps {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::kParse, field + ": " + reason);
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("<document>", e.what());
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(get_number(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

const json& require(const json& doc, const std::string& field) {
  if (!doc.contains(field)) parse_fail(field, "missing");
  return doc.at(field);
}

}  // namespace

OptimizationInput optimization_input_from_json(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) parse_fail("<document>", "expected an object");
  OptimizationInput in;
  in.p_loss = get_number(require(doc, "p_loss"), "p_loss");
  in.k_g_send = get_numbers(require(doc, "k_g_send"), "k_g_send");
  in.k_g_recv = get_number(require(doc, "k_g_recv"), "k_g_recv");
  in.p_dc_current = get_numbers(require(doc, "p_dc_current"), "p_dc_current");
  in.p_dc_rated = get_numbers(require(doc, "p_dc_rated"), "p_dc_rated");
  const std::size_t m = in.k_g_send.size();

  if (!doc.contains("k_max")) {
    in.k_max.assign(m, 1.1);
  } else if (doc["k_max"].is_array()) {
    in.k_max = get_numbers(doc["k_max"], "k_max");
  } else {
    in.k_max.assign(m, get_number(doc["k_max"], "k_max"));
  }

  if (!doc.contains("omega_bounds")) {
    in.omega_bounds.assign(m + 1, FrequencyBand{});
  } else {
    const json& b = doc["omega_bounds"];
    if (!b.is_array()) parse_fail("omega_bounds", "expected an array of [lower, upper] pairs");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string f = "omega_bounds[" + std::to_string(k) + "]";
      const std::vector<double> pair = get_numbers(b[k], f);
      if (pair.size() != 2) parse_fail(f, "expected [lower, upper]");
      in.omega_bounds.push_back({pair[0], pair[1]});
    }
  }
  if (doc.contains("penalty_m")) in.penalty_m = get_number(doc["penalty_m"], "penalty_m");

  try {
    in.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.detail());
  }
  return in;
}

std::string to_json(const OptimizationInput& in) {
  json bounds = json::array();
  for (const auto& b : in.omega_bounds) bounds.push_back({b.lower, b.upper});
  json doc = {
      {"p_loss", in.p_loss},
      {"k_g_send", in.k_g_send},
      {"k_g_recv", in.k_g_recv},
      {"p_dc_current", in.p_dc_current},
      {"p_dc_rated", in.p_dc_rated},
      {"k_max", in.k_max},
      {"omega_bounds", bounds},
      {"penalty_m", in.penalty_m},
  };
  return doc.dump(2);
}

OptimizationResult optimization_result_from_json(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) parse_fail("<document>", "expected an object");
  OptimizationResult r;
  r.k_droop = get_numbers(require(doc, "k_droop"), "k_droop");
  r.dp_dc = get_numbers(require(doc, "dp_dc"), "dp_dc");
  r.dp_shed = get_number(require(doc, "dp_shed"), "dp_shed");
  r.omega_pred = get_numbers(require(doc, "omega_pred"), "omega_pred");
  r.objective = get_number(require(doc, "objective"), "objective");
  const json& active = require(doc, "active_constraints");
  if (!active.is_array()) parse_fail("active_constraints", "expected an array of strings");
  for (const auto& a : active) {
    if (!a.is_string()) parse_fail("active_constraints", "expected strings");
    r.active_constraints.push_back(a.get<std::string>());
  }
  if (doc.contains("degenerate")) {
    if (!doc["degenerate"].is_boolean()) parse_fail("degenerate", "expected a boolean");
    r.degenerate = doc["degenerate"].get<bool>();
  }
  return r;
}

std::string to_json(const OptimizationResult& r) {
  json doc = {
      {"k_droop", r.k_droop},
      {"dp_dc", r.dp_dc},
      {"dp_shed", r.dp_shed},
      {"omega_pred", r.omega_pred},
      {"objective", r.objective},
      {"active_constraints", r.active_constraints},
      {"degenerate", r.degenerate},
  };
  return doc.dump(2);
}

}  // namespace edcps
