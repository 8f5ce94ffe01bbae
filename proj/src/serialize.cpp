#include "gpduo/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gpduo/errors.hpp"

namespace gpduo::serialize {

namespace {

// Small containers of scalars stay on one line.
bool inline_form(const Json& j) {
  if (j.size() > 4) return false;
  for (const auto& v : j)
    if (v.is_structured()) return false;
  return true;
}

void emit(const Json& j, int depth, std::string& out) {
  if (j.is_structured() && !j.empty() && inline_form(j)) {
    const bool obj = j.is_object();
    out += obj ? "{" : "[";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ", ";
      first = false;
      if (obj) out += Json(k).dump() + ": ";
      emit(v, depth + 1, out);
    }
    out += obj ? "}" : "]";
    return;
  }
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        emit(v, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

double num_at(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("ConfigError", where + ": missing key '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) fail("ConfigError", where + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t count_at(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("ConfigError", where + ": missing key '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) fail("ConfigError", where + ": '" + key + "' must be a count");
  return v.get<std::size_t>();
}

Point point_from(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail("ConfigError", where + ": expected a point [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Json point_to(const Point& p) { return Json::array({p[0], p[1]}); }

Json component_to_json(const fields::ComponentPotential& c) {
  Json centers = Json::array();
  for (const auto& z : c.centers) centers.push_back({{"at", point_to(z.at)}, {"exponent", z.exponent}});
  return {{"centers", centers}, {"modulator", c.modulator}};
}

fields::ComponentPotential component_from_json(const Json& j, const std::string& where) {
  check_keys(j, {"centers", "modulator"}, where);
  fields::ComponentPotential c;
  if (j.contains("modulator")) c.modulator = num_at(j, "modulator", where);
  if (!j.contains("centers") || !j.at("centers").is_array())
    fail("ConfigError", where + ": 'centers' must be an array");
  for (const auto& z : j.at("centers")) {
    check_keys(z, {"at", "exponent"}, where + ".centers");
    if (!z.contains("at")) fail("ConfigError", where + ".centers: missing key 'at'");
    c.centers.push_back({point_from(z.at("at"), where + ".centers"),
                         num_at(z, "exponent", where + ".centers")});
  }
  return c;
}

minimizer::InitKind init_from(const std::string& s) {
  if (s == "gaussian") return minimizer::InitKind::Gaussian;
  if (s == "random-gaussian") return minimizer::InitKind::RandomGaussian;
  if (s == "townes-seeded") return minimizer::InitKind::TownesSeeded;
  if (s == "warm-start") return minimizer::InitKind::WarmStart;
  fail("ConfigError", "flow: unknown init '" + s + "'");
}

const char* init_name(minimizer::InitKind k) {
  switch (k) {
    case minimizer::InitKind::Gaussian: return "gaussian";
    case minimizer::InitKind::RandomGaussian: return "random-gaussian";
    case minimizer::InitKind::TownesSeeded: return "townes-seeded";
    case minimizer::InitKind::WarmStart: return "warm-start";
  }
  return "gaussian";
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail("ConfigError", where + ": cannot parse '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, 0, out);
  out += "\n";
  return out;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail("ConfigError", where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail("ConfigError", where + ": unknown key '" + k + "'");
  }
}

double parse_scaled(const std::string& text, std::optional<double> a_star) {
  if (!text.empty() && text.back() == 'a') {
    if (!a_star) fail("ConfigError", "'" + text + "' needs a Townes artifact for a*");
    return parse_double(text.substr(0, text.size() - 1), "value") * *a_star;
  }
  return parse_double(text, "value");
}

double scaled_value(const Json& v, std::optional<double> a_star, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_scaled(v.get<std::string>(), a_star);
  fail("ConfigError", where + ": expected a number or a multiple of a* such as \"0.5a\"");
}

Json townes_to_json(const townes::RadialProfile& profile, const townes::TownesConstants& c) {
  Json j;
  j["a_star"] = c.a_star;
  j["q0"] = c.q0;
  j["kinetic"] = c.kinetic;
  j["l4"] = c.l4;
  Json m = Json::object();
  for (const auto& [p, v] : c.moments) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", p);
    m[key] = v;
  }
  j["moments"] = m;
  Json prof = Json::array();
  for (std::size_t i = 0; i < profile.values.size(); ++i)
    prof.push_back({{"r", profile.grid.nodes[i]}, {"q", profile.values[i]}});
  j["profile"] = prof;
  return j;
}

TownesArtifact townes_from_json(const Json& j) {
  const std::string where = "townes";
  check_keys(j, {"a_star", "q0", "kinetic", "l4", "moments", "profile"}, where);
  TownesArtifact t;
  t.constants.a_star = num_at(j, "a_star", where);
  t.constants.q0 = num_at(j, "q0", where);
  t.constants.kinetic = num_at(j, "kinetic", where);
  t.constants.l4 = num_at(j, "l4", where);
  if (!j.contains("moments") || !j.at("moments").is_object())
    fail("ConfigError", where + ": 'moments' must be an object");
  for (const auto& [k, v] : j.at("moments").items()) {
    if (!v.is_number()) fail("ConfigError", where + ": moment " + k + " must be a number");
    t.constants.moments[parse_double(k, where + ".moments")] = v.get<double>();
  }
  if (!j.contains("profile") || !j.at("profile").is_array() || j.at("profile").size() < 2)
    fail("ConfigError", where + ": 'profile' must be an array of {r, q}");
  for (const auto& e : j.at("profile")) {
    check_keys(e, {"r", "q"}, where + ".profile");
    t.profile.grid.nodes.push_back(num_at(e, "r", where + ".profile"));
    t.profile.values.push_back(num_at(e, "q", where + ".profile"));
  }
  t.profile.grid.n_nodes = t.profile.grid.nodes.size();
  t.profile.grid.r_max = t.profile.grid.nodes.back();
  if (!(t.constants.a_star > 0)) fail("ConfigError", where + ": a_star must be positive");
  t.profile.validate();
  return t;
}

Json grid_to_json(const Grid2D& g) { return {{"n", g.n}, {"extent", g.extent}}; }

Grid2D grid_from_json(const Json& j) {
  check_keys(j, {"n", "extent"}, "grid");
  return Grid2D::make(count_at(j, "n", "grid"), num_at(j, "extent", "grid"));
}

Json potential_to_json(const fields::PotentialSpec& p) {
  return {{"v1", component_to_json(p.v1)}, {"v2", component_to_json(p.v2)}};
}

fields::PotentialSpec potential_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "harmonic") return fields::PotentialSpec::harmonic();
    fail("ConfigError", "potential: unknown preset '" + j.get<std::string>() + "'");
  }
  check_keys(j, {"v1", "v2"}, "potential");
  if (!j.contains("v1") || !j.contains("v2")) fail("ConfigError", "potential: needs v1 and v2");
  fields::PotentialSpec p{component_from_json(j.at("v1"), "potential.v1"),
                          component_from_json(j.at("v2"), "potential.v2")};
  p.validate();
  return p;
}

Json analysis_to_json(const fields::PotentialAnalysis& a) {
  Json lam = Json::array();
  for (const auto& p : a.lambda_set) lam.push_back(point_to(p));
  Json z = Json::array();
  for (const auto& p : a.z_points()) z.push_back(point_to(p));
  return {{"lambda_set", lam},   {"pbar", a.pbar},     {"p0", a.p0},
          {"gamma_j", a.gamma_j}, {"gamma", a.gamma},   {"z_set", a.z_set},
          {"z_points", z}};
}

Json params_to_json(const criteria::CouplingParams& p) {
  return {{"b1", p.b1}, {"b2", p.b2}, {"beta", p.beta}};
}

criteria::CouplingParams params_from_json(const Json& j, std::optional<double> a_star) {
  check_keys(j, {"b1", "b2", "beta"}, "params");
  for (const char* k : {"b1", "b2", "beta"})
    if (!j.contains(k)) fail("ConfigError", std::string("params: missing key '") + k + "'");
  return {scaled_value(j.at("b1"), a_star, "params.b1"), scaled_value(j.at("b2"), a_star, "params.b2"),
          scaled_value(j.at("beta"), a_star, "params.beta")};
}

Json label_to_json(const criteria::RegionLabel& l) {
  return {{"tag", criteria::to_string(l.tag)}, {"detail", l.detail}};
}

minimizer::FlowConfig flow_from_json(const Json& j, const TownesArtifact* townes) {
  const std::string where = "flow";
  check_keys(j, {"dt", "max_iters", "grad_tol", "seed", "init", "init_width", "init_center", "tau",
                 "townes_center", "warm", "energy_floor"},
             where);
  minimizer::FlowConfig c;
  if (j.contains("dt")) c.dt = num_at(j, "dt", where);
  if (j.contains("max_iters")) c.max_iters = count_at(j, "max_iters", where);
  if (j.contains("grad_tol")) c.grad_tol = num_at(j, "grad_tol", where);
  if (j.contains("seed")) c.seed = count_at(j, "seed", where);
  if (j.contains("init_width")) c.init_width = num_at(j, "init_width", where);
  if (j.contains("init_center")) c.init_center = point_from(j.at("init_center"), where);
  if (j.contains("energy_floor")) c.energy_floor = num_at(j, "energy_floor", where);
  if (j.contains("init")) {
    if (!j.at("init").is_string()) fail("ConfigError", where + ": 'init' must be a string");
    c.init = init_from(j.at("init").get<std::string>());
  }
  if (c.init == minimizer::InitKind::TownesSeeded) {
    if (!townes) fail("ConfigError", where + ": townes-seeded start needs a Townes artifact");
    c.townes.profile = &townes->profile;
    c.townes.a_star = townes->constants.a_star;
    if (j.contains("tau")) c.townes.tau = num_at(j, "tau", where);
    if (j.contains("townes_center")) c.townes.center = point_from(j.at("townes_center"), where);
  }
  if (c.init == minimizer::InitKind::WarmStart) {
    if (!j.contains("warm") || !j.at("warm").is_string())
      fail("ConfigError", where + ": warm-start needs 'warm', the path of a field file");
    auto fs = fields::read_fields(j.at("warm").get<std::string>());
    if (fs.size() != 2) fail("ConfigError", where + ": warm field file must hold two components");
    c.warm = std::make_shared<std::pair<fields::Field2D, fields::Field2D>>(std::move(fs[0]),
                                                                          std::move(fs[1]));
  }
  c.validate();
  return c;
}

Json flow_to_json(const minimizer::FlowConfig& c) {
  Json j{{"dt", c.dt},
         {"max_iters", c.max_iters},
         {"grad_tol", c.grad_tol},
         {"seed", c.seed},
         {"init", init_name(c.init)},
         {"init_width", c.init_width},
         {"init_center", point_to(c.init_center)},
         {"energy_floor", c.energy_floor}};
  if (c.init == minimizer::InitKind::TownesSeeded) {
    j["tau"] = c.townes.tau;
    j["townes_center"] = point_to(c.townes.center);
  }
  return j;
}

Json result_to_json(const minimizer::MinimizeResult& r) {
  const auto& t = r.terms;
  return {{"energy", r.energy},
          {"mu1", r.mu1},
          {"mu2", r.mu2},
          {"residual", r.residual},
          {"iters", r.iters},
          {"max1", point_to(r.max1)},
          {"max2", point_to(r.max2)},
          {"max_index1", r.max_index1},
          {"max_index2", r.max_index2},
          {"l4_1", r.l4_1},
          {"l4_2", r.l4_2},
          {"diff2", r.diff2},
          {"terms",
           {{"kinetic1", t.kinetic1},
            {"kinetic2", t.kinetic2},
            {"potential1", t.potential1},
            {"potential2", t.potential2},
            {"quartic1", t.quartic1},
            {"quartic2", t.quartic2},
            {"cross", t.cross},
            {"diff2", t.diff2},
            {"mass1", t.mass1},
            {"mass2", t.mass2}}},
          {"accepted_steps", r.history.size()}};
}

Json fit_to_json(const blowup::FitResult& f) {
  return {{"exponent", f.exponent}, {"constant", f.constant}, {"stderr", f.stderr_}, {"window", f.window}};
}

Json wells_to_json(const blowup::WellsReport& w) {
  return {{"a_star", w.a_star},
          {"beta", w.beta},
          {"b", w.b},
          {"c_zeta", w.c_zeta},
          {"c_zeta_exact", w.c_zeta_exact},
          {"plateau", w.plateau},
          {"inf_potential", w.inf_potential},
          {"energy", w.energy},
          {"residual", w.residual},
          {"certificate", w.certificate},
          {"energy_below", w.energy_below},
          {"trend_offsets", w.trend_offsets},
          {"trend_energies", w.trend_energies},
          {"trend_decreasing", w.trend_decreasing},
          {"pass", w.pass()}};
}

blowup::SweepSpec sweep_from_json(const Json& j, const TownesArtifact& townes) {
  const std::string where = "sweep";
  check_keys(j, {"beta", "eps_list", "eps", "path", "split", "potential", "grid", "flow",
                 "min_core_points", "boundary_mass_tol"},
             where);
  const double a_star = townes.constants.a_star;
  blowup::SweepSpec s;
  if (!j.contains("beta")) fail("ConfigError", where + ": missing key 'beta'");
  s.beta = scaled_value(j.at("beta"), a_star, where + ".beta");
  if (j.contains("eps_list") == j.contains("eps"))
    fail("ConfigError", where + ": give exactly one of 'eps_list' and 'eps'");
  if (j.contains("eps_list")) {
    if (!j.at("eps_list").is_array()) fail("ConfigError", where + ": 'eps_list' must be an array");
    for (const auto& v : j.at("eps_list")) s.eps_list.push_back(scaled_value(v, a_star, where + ".eps_list"));
  } else {
    const Json& e = j.at("eps");
    check_keys(e, {"from", "to", "points"}, where + ".eps");
    const double from = num_at(e, "from", where + ".eps"), to = num_at(e, "to", where + ".eps");
    const std::size_t points = count_at(e, "points", where + ".eps");
    if (points < 2 || !(from > 0) || !(to > 0))
      fail("ConfigError", where + ".eps: need at least 2 points and positive bounds");
    for (std::size_t i = 0; i < points; ++i)
      s.eps_list.push_back(i + 1 == points ? to
                                           : from * std::pow(to / from, static_cast<double>(i) /
                                                                            static_cast<double>(points - 1)));
  }
  if (j.contains("path")) {
    const auto p = j.at("path").get<std::string>();
    if (p == "symmetric") s.path = blowup::PathKind::Symmetric;
    else if (p == "split") s.path = blowup::PathKind::Split;
    else fail("ConfigError", where + ": unknown path '" + p + "'");
  }
  if (j.contains("split")) s.split = num_at(j, "split", where);
  s.pot = j.contains("potential") ? potential_from_json(j.at("potential")) : fields::PotentialSpec::harmonic();
  if (!j.contains("grid")) fail("ConfigError", where + ": missing key 'grid'");
  s.grid = grid_from_json(j.at("grid"));
  if (j.contains("flow")) s.cfg = flow_from_json(j.at("flow"), &townes);
  if (j.contains("min_core_points")) s.min_core_points = count_at(j, "min_core_points", where);
  if (j.contains("boundary_mass_tol")) s.boundary_mass_tol = num_at(j, "boundary_mass_tol", where);
  s.validate(a_star);
  return s;
}

std::string records_to_csv(const std::vector<blowup::SweepRecord>& records) {
  std::string out = std::string(kRecordHeader) + "\n";
  for (const auto& r : records) {
    const double row[] = {r.eps_raw, r.b1,      r.b2,      r.beta,    r.energy,
                          r.l4_1,    r.l4_2,    r.diff2,   r.mu1,     r.mu2,
                          r.max1[0], r.max1[1], r.max2[0], r.max2[1], r.profile_dist};
    bool first = true;
    for (double v : row) {
      if (!first) out += ",";
      first = false;
      out += fmt17(v);
    }
    out += "\n";
  }
  return out;
}

std::vector<blowup::SweepRecord> records_from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) fail("ConfigError", "records: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordHeader) fail("ConfigError", "records: unexpected header '" + line + "'");
  std::vector<blowup::SweepRecord> out;
  std::size_t row = 1;
  while (std::getline(ss, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 15) fail("ConfigError", "records: row " + std::to_string(row) + " has " +
                                                    std::to_string(cells.size()) + " cells");
    double v[15];
    for (int i = 0; i < 15; ++i) v[i] = parse_double(cells[i], "records row " + std::to_string(row));
    blowup::SweepRecord r;
    r.eps_raw = v[0];
    r.b1 = v[1];
    r.b2 = v[2];
    r.beta = v[3];
    r.energy = v[4];
    r.l4_1 = v[5];
    r.l4_2 = v[6];
    r.diff2 = v[7];
    r.mu1 = v[8];
    r.mu2 = v[9];
    r.max1 = {v[10], v[11]};
    r.max2 = {v[12], v[13]};
    r.profile_dist = v[14];
    out.push_back(r);
  }
  return out;
}

}  // namespace gpduo::serialize
