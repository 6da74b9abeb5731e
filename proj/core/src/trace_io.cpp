#include <charconv>
#include <ostream>

#include <json.hpp>

#include "edcps/sim.hpp"

namespace edcps {

namespace {

void put_number(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<std::string> trace_csv_header(const SimulationTrace& trace) {
  std::vector<std::string> cols{"time"};
  for (const SubsystemTrace& s : trace.subsystems) cols.push_back(s.name + ".omega");
  cols.push_back("receiving.p_shed");
  for (const LineTrace& l : trace.lines) {
    for (const char* field : {".p_dc", ".p_order", ".i_d", ".v_d_inv", ".alpha"})
      cols.push_back(l.name + field);
  }
  return cols;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  const std::vector<std::string> header = trace_csv_header(trace);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t k = 0; k < trace.time.size(); ++k) {
    put_number(out, trace.time[k]);
    for (const SubsystemTrace& s : trace.subsystems) {
      out << ',';
      put_number(out, s.omega[k]);
    }
    out << ',';
    put_number(out, trace.p_shed[k]);
    for (const LineTrace& l : trace.lines) {
      for (const auto* series : {&l.p_dc, &l.p_order, &l.i_d, &l.v_d_inv, &l.alpha}) {
        out << ',';
        put_number(out, (*series)[k]);
      }
    }
    out << '\n';
  }
}

std::string metrics_to_json(const Metrics& m) {
  const nlohmann::json doc = {
      {"nadir_hz", m.nadir_hz},
      {"steady_deviation_hz", m.steady_deviation_hz},
      {"settling_time", m.settling_time},
      {"settled", m.settled},
      {"spread_pu", m.spread_pu},
      {"total_shed", m.total_shed},
      {"band_violated", m.band_violated},
      {"final_in_band", m.final_in_band},
  };
  return doc.dump(2);
}

}  // namespace edcps
