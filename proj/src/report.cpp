#include "grk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace grk {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

Json vec3(const Eigen::Vector3d& v) { return Json::array({v[0], v[1], v[2]}); }

Json runs_json(const std::vector<Run>& runs) {
  Json out = Json::array();
  for (const Run& r : runs) {
    out.push_back({{"letter", std::string(1, letter_symbol(r.letter))}, {"count", r.count}});
  }
  return out;
}

Json pattern_json(const Pattern& p) { return pattern_to_string(p); }

void dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ',';
        first = false;
        dump_into(e, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      break;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

Json to_json(const DatabaseGeometry& g) {
  return {{"n", g.n},         {"m", g.m},           {"N", g.N},
          {"b", g.b},         {"K", g.K},           {"theta1", g.theta1},
          {"theta2", g.theta2}, {"gamma", g.gamma}};
}

Json to_json(const ReducedState& s) { return {{"components", vec3(s.components())}}; }

Json to_json(const Eigen::Matrix3d& m) {
  Json out = Json::array();
  for (int i = 0; i < 3; ++i) out.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return out;
}

Json to_json(const GrkParameters& p) {
  return {{"K", p.K},   {"alpha", p.alpha}, {"eta", p.eta},
          {"k1", p.k1}, {"k2", p.k2},       {"predicted_queries", p.predicted_queries}};
}

Json to_json(const TerminalResidual& r) {
  return {{"amplitude", r.amplitude},
          {"residual_probability", r.residual_probability},
          {"target_block_probability", r.target_block_probability}};
}

Json to_json(const GrkRun& run) {
  return {{"params", to_json(run.params)},
          {"final_state", to_json(run.final_state)},
          {"residual", to_json(run.residual)},
          {"queries", run.queries}};
}

Json to_json(const GlgResult& g) {
  return {{"k1", g.k1},
          {"k2", g.k2},
          {"residual", g.residual},
          {"success", g.success},
          {"queries", g.queries()}};
}

Json to_json(const SearchReport& r) {
  Json out = {{"geometry", to_json(r.geometry)}, {"epsilon", r.epsilon}, {"max_len", r.max_len}};
  out["best_word"] = r.best_word ? Json(r.best_word->to_string()) : Json(nullptr);
  out["best_length"] = r.best_length;
  out["best_residual"] = r.best_residual;
  out["structure"] = {{"runs", runs_json(r.structure.runs)},
                      {"switchings", r.structure.switchings}};
  out["words_examined"] = r.words_examined;
  out["glg_best"] = to_json(r.glg_best);
  return out;
}

Json to_json(const OracleComparison& c) {
  return {{"deviation", c.deviation},
          {"leakage", c.leakage},
          {"projected", vec3(c.projected)},
          {"reduced", vec3(c.reduced)}};
}

Json to_json(const PhiTriple& phi) {
  return {{"phi1", phi.phi1}, {"phi2", phi.phi2}, {"phi3", phi.phi3}};
}

Json to_json(const CompressionReport& r) {
  return {{"s", r.s},
          {"ell", r.ell},
          {"tau_x", r.tau_x},
          {"length_yxy", r.length_yxy},
          {"length_xyx", r.length_xyx},
          {"replacement_yxy", r.replacement_yxy},
          {"replacement_xyx", r.replacement_xyx},
          {"gap_yxy", r.gap_yxy},
          {"gap_xyx", r.gap_xyx}};
}

Json to_json(const EndpointReport& r) {
  return {{"gamma", r.gamma},
          {"tau", r.tau},
          {"y_arc_u_drift", r.y_arc_u_drift},
          {"x_arc_u", r.x_arc_u},
          {"x_arc_u_closed_form", r.x_arc_u_closed_form},
          {"x_arc_deviation", r.x_arc_deviation}};
}

Json to_json(const ArcSchedule& s) {
  return {{"pattern", pattern_json(s.pattern)},
          {"durations", s.durations},
          {"total_time", s.total_time}};
}

Json to_json(const PatternComparison& c) {
  Json results = Json::array();
  for (const PatternResult& r : c.results) {
    Json e = {{"requested", pattern_json(r.requested)}, {"feasible", r.feasible}};
    if (r.feasible) {
      e["schedule"] = to_json(r.schedule);
      e["time"] = r.time;
      e["residual"] = r.residual;
      e["extremal_schedule"] = to_json(r.extremal_schedule);
      e["extremal_time"] = r.extremal_time;
    }
    if (!r.diagnostic.empty()) e["diagnostic"] = r.diagnostic;
    results.push_back(std::move(e));
  }
  Json out = {{"gamma", c.gamma}, {"max_switches", c.max_switches}, {"results", results}};
  out["best"] = c.results.empty() ? Json(nullptr) : Json(pattern_to_string(c.results[c.best].requested));
  out["grk_time"] = c.grk_time;
  return out;
}

Json to_json(const ExtremalTrajectory& traj) {
  Json arcs = Json::array();
  for (const Arc& a : traj.arcs) {
    arcs.push_back({{"control", std::string(1, control_symbol(a.control))},
                    {"start", a.start},
                    {"end", a.end},
                    {"duration", a.duration()},
                    {"starts_at_switch", a.starts_at_switch},
                    {"ends_at_switch", a.ends_at_switch}});
  }
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = -hmin;
  for (const auto& s : traj.samples) {
    hmin = std::min(hmin, s.hamiltonian);
    hmax = std::max(hmax, s.hamiltonian);
  }
  Json out = {{"samples", traj.samples.size()},
              {"switching_times", traj.switching_times},
              {"arcs", arcs},
              {"hamiltonian_min", hmin},
              {"hamiltonian_max", hmax},
              {"halted", traj.halted}};
  if (!traj.diagnostic.empty()) out["diagnostic"] = traj.diagnostic;
  return out;
}

std::string trajectory_csv(const ExtremalTrajectory& traj) {
  std::string out = kTrajectoryCsvHeader;
  out += '\n';
  for (const auto& s : traj.samples) {
    const double fields[] = {s.t,        s.psi[0],   s.psi[1],   s.psi[2],  s.p[0], s.p[1],
                             s.p[2],     s.phi.phi1, s.phi.phi2, s.phi.phi3};
    for (double f : fields) {
      out += format_double(f);
      out += ',';
    }
    out += control_symbol(s.control);
    out += ',';
    out += format_double(s.hamiltonian);
    out += '\n';
  }
  return out;
}

std::string landscape_csv(const std::vector<LandscapePoint>& points) {
  std::string out = kLandscapeCsvHeader;
  out += '\n';
  for (const auto& p : points) {
    out += std::to_string(p.k1) + ',' + std::to_string(p.k2) + ',' + format_double(p.residual) +
           '\n';
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UnwritablePath("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UnwritablePath("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UnwritablePath("cannot rename onto " + path);
  }
}

}  // namespace grk
