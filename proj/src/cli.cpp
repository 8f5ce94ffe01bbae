#include "gpduo/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "gpduo/blowup.hpp"
#include "gpduo/criteria.hpp"
#include "gpduo/errors.hpp"
#include "gpduo/io.hpp"
#include "gpduo/serialize.hpp"
#include "gpduo/svg.hpp"

namespace gpduo::cli {

namespace {

namespace fs = std::filesystem;
using serialize::Json;
using serialize::TownesArtifact;

constexpr double kDefaultRmax = 20;
constexpr std::size_t kDefaultNodes = 4096;
constexpr double kDefaultTol = 1e-10;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Io {
  std::ostream& out;
};

void emit(Io& io, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") io.out << text;
  else io::atomic_write(path, text);
}

Json read_json(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("ConfigError", path + ": " + e.what());
  }
}

TownesArtifact compute_townes(double r_max, std::size_t nodes, double tol) {
  TownesArtifact t;
  t.profile = townes::solve_townes(r_max, nodes, tol);
  t.constants = townes::compute_constants(t.profile);
  return t;
}

// Explicit path, else GPDUO_CACHE (filled on first use), else a fresh solve.
TownesArtifact load_townes(const std::string& path) {
  if (!path.empty()) return serialize::townes_from_json(read_json(path));
  if (const char* cache = std::getenv("GPDUO_CACHE"); cache && *cache) {
    if (fs::exists(cache)) return serialize::townes_from_json(read_json(cache));
    auto t = compute_townes(kDefaultRmax, kDefaultNodes, kDefaultTol);
    io::atomic_write(cache, serialize::dump(serialize::townes_to_json(t.profile, t.constants)));
    return t;
  }
  return compute_townes(kDefaultRmax, kDefaultNodes, kDefaultTol);
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("ConfigError", where + ": missing key '" + key + "'");
  return j.at(key);
}

// records.csv -> records.<k>.csv
std::string indexed_path(const std::string& path, std::size_t k) {
  const fs::path p(path);
  fs::path q = p.parent_path() / p.stem();
  return q.string() + "." + std::to_string(k) + p.extension().string();
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

// ---- subcommands ----

struct TownesArgs {
  double rmax = kDefaultRmax;
  std::size_t nodes = kDefaultNodes;
  double tol = kDefaultTol;
  std::string out;
};

void run_townes(Io& io, const TownesArgs& a) {
  const auto t = compute_townes(a.rmax, a.nodes, a.tol);
  emit(io, a.out, serialize::dump(serialize::townes_to_json(t.profile, t.constants)));
}

struct ClassifyArgs {
  std::string townes, b1, b2, beta, grid, out;
  double band = criteria::kDefaultBand;
};

void run_classify(Io& io, const ClassifyArgs& a) {
  const double a_star = load_townes(a.townes).constants.a_star;
  if (a.grid.empty()) {
    if (a.b1.empty() || a.b2.empty() || a.beta.empty())
      throw UsageError("classify needs --b1, --b2 and --beta, or --grid");
    const criteria::CouplingParams p{serialize::parse_scaled(a.b1, a_star),
                                     serialize::parse_scaled(a.b2, a_star),
                                     serialize::parse_scaled(a.beta, a_star)};
    emit(io, a.out, serialize::dump(serialize::label_to_json(criteria::classify(p, a_star, a.band))));
    return;
  }
  // lo:hi:n for every coordinate not fixed by its own flag
  const auto first = a.grid.find(':'), second = a.grid.rfind(':');
  if (first == std::string::npos || first == second)
    fail("ConfigError", "--grid expects lo:hi:n, got '" + a.grid + "'");
  const double lo = serialize::parse_scaled(a.grid.substr(0, first), a_star);
  const double hi = serialize::parse_scaled(a.grid.substr(first + 1, second - first - 1), a_star);
  const double count = serialize::parse_scaled(a.grid.substr(second + 1), std::nullopt);
  if (!(count >= 1) || count != std::floor(count) || count > 1e4)
    fail("ConfigError", "--grid point count must be an integer in [1, 10000]");
  const auto axis = linspace(lo, hi, static_cast<std::size_t>(count));
  auto values = [&](const std::string& fixed) {
    return fixed.empty() ? axis : std::vector<double>{serialize::parse_scaled(fixed, a_star)};
  };
  const auto v1 = values(a.b1), v2 = values(a.b2), vb = values(a.beta);
  std::string csv = "b1,b2,beta,tag\n";
  for (double b1 : v1)
    for (double b2 : v2)
      for (double beta : vb) {
        const auto label = criteria::classify({b1, b2, beta}, a_star, a.band);
        csv += serialize::fmt17(b1) + "," + serialize::fmt17(b2) + "," + serialize::fmt17(beta) + "," +
               criteria::to_string(label.tag) + "\n";
      }
  emit(io, a.out, csv);
}

struct PotArgs {
  std::string pot, out;
};

void run_analyze(Io& io, const PotArgs& a) {
  const auto spec = serialize::potential_from_json(read_json(a.pot));
  emit(io, a.out, serialize::dump(serialize::analysis_to_json(fields::analyze_potential(spec))));
}

struct MinimizeArgs {
  std::string config, townes, out, fields;
};

void run_minimize(Io& io, const MinimizeArgs& a) {
  const Json cfg = read_json(a.config);
  serialize::check_keys(cfg, {"params", "potential", "grid", "flow"}, "run");
  const auto t = load_townes(a.townes);
  const auto params = serialize::params_from_json(member(cfg, "params", "run"), t.constants.a_star);
  const auto pot = cfg.contains("potential") ? serialize::potential_from_json(cfg.at("potential"))
                                             : fields::PotentialSpec::harmonic();
  const auto grid = serialize::grid_from_json(member(cfg, "grid", "run"));
  const auto flow = cfg.contains("flow") ? serialize::flow_from_json(cfg.at("flow"), &t) : minimizer::FlowConfig{};
  const auto r = minimizer::minimize(params, pot, grid, flow);
  if (!a.fields.empty()) fields::write_fields(a.fields, {&r.u1, &r.u2});
  emit(io, a.out, serialize::dump(serialize::result_to_json(r)));
}

void run_quotient(Io& io, const MinimizeArgs& a) {
  const Json cfg = read_json(a.config);
  serialize::check_keys(cfg, {"params", "grid", "flow"}, "quotient");
  const auto t = load_townes(a.townes);
  const double a_star = t.constants.a_star;
  const auto params = serialize::params_from_json(member(cfg, "params", "quotient"), a_star);
  const auto grid = serialize::grid_from_json(member(cfg, "grid", "quotient"));
  const auto flow = cfg.contains("flow") ? serialize::flow_from_json(cfg.at("flow"), &t) : minimizer::FlowConfig{};
  const auto q = minimizer::estimate_gn_quotient_pair(params, grid, flow);
  if (!a.fields.empty()) fields::write_fields(a.fields, {&q.u1, &q.u2});
  const auto bounds = criteria::quotient_bounds(params, a_star);
  const auto finf = criteria::f_inf(params, a_star);
  const Json j{{"value", q.value},
               {"residual", q.residual},
               {"iters", q.iters},
               {"bounds", {{"lower", bounds.lower}, {"upper", bounds.upper}}},
               {"f_inf", {{"t_min", finf.t_min}, {"value", finf.value}}}};
  emit(io, a.out, serialize::dump(j));
}

void run_escape(Io& io, const MinimizeArgs& a) {
  const Json cfg = read_json(a.config);
  serialize::check_keys(cfg, {"params", "potential", "grid", "flow", "lambdas"}, "escape");
  const auto t = load_townes(a.townes);
  const auto params = serialize::params_from_json(member(cfg, "params", "escape"), t.constants.a_star);
  const auto pot = cfg.contains("potential") ? serialize::potential_from_json(cfg.at("potential"))
                                             : fields::PotentialSpec::harmonic();
  const auto grid = serialize::grid_from_json(member(cfg, "grid", "escape"));
  const auto flow = cfg.contains("flow") ? serialize::flow_from_json(cfg.at("flow"), &t) : minimizer::FlowConfig{};
  std::vector<double> lambdas;
  if (cfg.contains("lambdas")) {
    for (const auto& v : cfg.at("lambdas")) lambdas.push_back(serialize::scaled_value(v, std::nullopt, "lambdas"));
  } else {
    for (int k = 0; k <= 12; ++k) lambdas.push_back(std::pow(2.0, k / 2.0));
  }
  const auto r = minimizer::scaling_escape_test(params, pot, grid, lambdas, flow);
  emit(io, a.out,
       serialize::dump({{"lambdas", r.lambdas}, {"energies", r.energies}, {"verdict", r.verdict}}));
}

struct SweepArgs {
  std::string spec, townes, out, fields;
  std::size_t jobs = 1;
};

void run_sweep(Io&, const SweepArgs& a) {
  const Json doc = read_json(a.spec);
  const auto t = load_townes(a.townes);
  std::vector<blowup::SweepSpec> specs;
  const bool many = doc.is_object() && doc.contains("sweeps");
  if (many) {
    serialize::check_keys(doc, {"sweeps"}, "sweep file");
    const Json& list = doc.at("sweeps");
    if (!list.is_array() || list.empty()) fail("ConfigError", "sweep file: 'sweeps' must be a non-empty array");
    for (const auto& s : list) specs.push_back(serialize::sweep_from_json(s, t));
  } else {
    specs.push_back(serialize::sweep_from_json(doc, t));
  }
  // Sweep k runs with seed base + k.
  for (std::size_t k = 0; k < specs.size(); ++k) specs[k].cfg.seed += k;

  std::vector<std::vector<blowup::SweepRecord>> records(specs.size());
  std::vector<minimizer::MinimizeResult> last(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < specs.size();) {
      try {
        records[k] = blowup::run_sweep(specs[k], t.view(), a.fields.empty() ? nullptr : &last[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::min(a.jobs, specs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (errors[k]) continue;
    const std::string out = many ? indexed_path(a.out, k) : a.out;
    io::atomic_write(out, serialize::records_to_csv(records[k]));
    if (!a.fields.empty()) {
      const std::string fpath = many ? indexed_path(a.fields, k) : a.fields;
      fields::write_fields(fpath, {&last[k].u1, &last[k].u2});
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct FitArgs {
  std::string records, what, out;
  double p0 = 2;
  int component = 0;
};

void run_fit(Io& io, const FitArgs& a) {
  const auto rs = serialize::records_from_csv(io::read_file(a.records));
  const bool energy = a.what == "energy";
  const auto f = energy ? blowup::fit_energy_exponent(rs) : blowup::fit_l4_exponent(rs, a.component);
  Json j = serialize::fit_to_json(f);
  const double target = energy ? blowup::energy_exponent_target(a.p0) : blowup::l4_exponent_target(a.p0);
  j["what"] = a.what;
  j["p0"] = a.p0;
  j["target"] = target;
  j["deviation"] = f.exponent - target;
  emit(io, a.out, serialize::dump(j));
}

struct ReportArgs {
  std::string records, townes, pot, fields, plots, out;
  double spacing = 0;
};

Json guarded(const std::function<Json()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {{"error", {{"kind", e.kind()}, {"message", e.message()}}}};
  }
}

void write_plot(const std::string& dir, const std::string& name, const svg::Plot& p, Json& listing) {
  const std::string path = (fs::path(dir) / name).string();
  io::atomic_write(path, svg::render(p));
  listing.push_back(path);
}

void fit_plot(const std::vector<blowup::SweepRecord>& rs, const blowup::FitResult* fit, bool energy,
              const std::string& dir, Json& listing) {
  svg::Plot p;
  p.title = energy ? "energy against eps" : "L4 norm against eps";
  p.xlabel = "eps_raw";
  p.ylabel = energy ? "energy" : "int u^4 (geometric mean)";
  p.log_x = p.log_y = true;
  svg::Series data{"records", {}, {}, true, "#1f77b4"};
  for (const auto& r : rs) {
    data.x.push_back(r.eps_raw);
    data.y.push_back(energy ? r.energy : std::sqrt(r.l4_1 * r.l4_2));
  }
  p.series.push_back(data);
  if (fit) {
    svg::Series line{"fit", data.x, {}, false, "#d62728"};
    for (double e : line.x) line.y.push_back(fit->constant * std::pow(e, fit->exponent));
    p.series.push_back(line);
  }
  write_plot(dir, energy ? "energy_fit.svg" : "l4_fit.svg", p, listing);
}

void profile_plot(const std::string& fields_path, const blowup::SweepRecord& rec, const TownesArtifact& t,
                  const fields::PotentialAnalysis& an, const std::string& dir, Json& listing) {
  const auto fs = fields::read_fields(fields_path);
  if (fs.size() != 2) fail("ConfigError", "profile overlay needs a two-component field file");
  const double eps = std::pow(rec.eps_raw, 1 / (an.p0 + 2));
  const double lam = townes::lambda_star(an.p0, an.gamma, t.constants);
  const double norm = std::sqrt(t.constants.a_star);
  svg::Plot p;
  p.title = "rescaled profile at eps_raw = " + num(rec.eps_raw);
  p.xlabel = "s = (y - y_max) / eps";
  p.ylabel = "eps u(eps s + x_max)";
  const Point maxes[2] = {rec.max1, rec.max2};
  const char* colors[2] = {"#1f77b4", "#2ca02c"};
  double s_hi = 0;
  for (int c = 0; c < 2; ++c) {
    const auto& u = fs[c];
    const Grid2D& g = u.grid;
    // grid row nearest to the maximum
    const auto row = static_cast<std::size_t>(
        std::clamp(std::lround((maxes[c][0] + g.extent) / g.spacing()), 0L, static_cast<long>(g.n) - 1));
    svg::Series ser{"u" + std::to_string(c + 1), {}, {}, true, colors[c]};
    for (std::size_t j = 0; j < g.n; ++j) {
      const double s = (g.coordinate(j) - maxes[c][1]) / eps;
      if (std::abs(s) > 6 / lam) continue;
      ser.x.push_back(s);
      ser.y.push_back(eps * u.values[row * g.n + j]);
      s_hi = std::max(s_hi, std::abs(s));
    }
    p.series.push_back(ser);
  }
  svg::Series q{"lambda Q(lambda s) / |Q|", {}, {}, false, "#d62728"};
  for (double s : linspace(-s_hi, s_hi, 401)) {
    q.x.push_back(s);
    q.y.push_back(lam * t.profile.value_at(lam * std::abs(s)) / norm);
  }
  p.series.push_back(q);
  write_plot(dir, "profile_overlay.svg", p, listing);
}

void run_report(Io& io, const ReportArgs& a) {
  const auto rs = serialize::records_from_csv(io::read_file(a.records));
  if (rs.empty()) fail("ConfigError", "records file has no rows");
  const auto t = load_townes(a.townes);
  const auto spec = a.pot.empty() ? fields::PotentialSpec::harmonic()
                                  : serialize::potential_from_json(read_json(a.pot));
  const auto an = fields::analyze_potential(spec);

  Json j;
  j["records"] = rs.size();
  j["analysis"] = {{"p0", an.p0}, {"gamma", an.gamma}};
  std::optional<blowup::FitResult> efit, lfit;
  j["energy_fit"] = guarded([&] {
    efit = blowup::fit_energy_exponent(rs);
    Json f = serialize::fit_to_json(*efit);
    f["target"] = blowup::energy_exponent_target(an.p0);
    return f;
  });
  j["l4_fit"] = guarded([&] {
    lfit = blowup::fit_l4_exponent(rs);
    Json f = serialize::fit_to_json(*lfit);
    f["target"] = blowup::l4_exponent_target(an.p0);
    return f;
  });
  j["limit_constant"] = guarded([&] {
    const auto ratios = blowup::limit_constant_check(rs, t.constants, an);
    return Json{{"value", townes::limit_constant(an.p0, an.gamma, t.constants)},
                {"ratios", ratios},
                {"final_ratio", ratios.back()}};
  });
  Json l4_dev = Json::array(), mu1 = Json::array(), mu2 = Json::array(), pd = Json::array();
  for (const auto& r : rs) {
    l4_dev.push_back(std::abs(r.l4_1 / r.l4_2 - 1));
    mu1.push_back(r.mu1 / (-(r.b1 + r.beta) / 2 * r.l4_1));
    mu2.push_back(r.mu2 / (-(r.b2 + r.beta) / 2 * r.l4_2));
    pd.push_back(r.profile_dist);
  }
  j["l4_ratio_deviation"] = l4_dev;
  j["mu_ratio"] = {{"u1", mu1}, {"u2", mu2}};
  j["profile_distance"] = pd;
  if (a.spacing > 0) {
    j["concentration"] = guarded([&] {
      const auto c = blowup::concentration_check(rs, an, a.spacing);
      return Json{{"target", {c.target[0], c.target[1]}},
                  {"final_distance", c.final_distance},
                  {"spacing", c.spacing},
                  {"normalized_offsets", c.normalized_offsets},
                  {"converged", c.converged},
                  {"offsets_decreasing", c.offsets_decreasing},
                  {"pass", c.pass()}};
    });
  }
  if (!a.plots.empty()) {
    fs::create_directories(a.plots);
    Json listing = Json::array();
    fit_plot(rs, efit ? &*efit : nullptr, true, a.plots, listing);
    fit_plot(rs, lfit ? &*lfit : nullptr, false, a.plots, listing);
    if (!a.fields.empty()) profile_plot(a.fields, rs.back(), t, an, a.plots, listing);
    j["plots"] = listing;
  }
  emit(io, a.out, serialize::dump(j));
}

struct WellsArgs {
  std::string townes, out;
  std::size_t n = 128;
  double extent = 8;
  double grad_tol = 1e-6;
  blowup::WellsOptions opts;
};

void run_wells(Io& io, const WellsArgs& a) {
  const auto t = load_townes(a.townes);
  minimizer::FlowConfig cfg;
  cfg.grad_tol = a.grad_tol;
  const auto r = blowup::separated_wells_scenario(Grid2D::make(a.n, a.extent), cfg, t.constants.a_star, a.opts);
  emit(io, a.out, serialize::dump(serialize::wells_to_json(r)));
}

void add_townes_option(CLI::App* sub, std::string& target) {
  sub->add_option("--townes,--a-star-file", target,
                  "Townes artifact (default: $GPDUO_CACHE, else solved on the fly)");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Io io{out};
  CLI::App app{"Two-component Gross-Pitaevskii toolkit", "gpduo"};
  app.require_subcommand(1);
  std::function<void()> action;

  TownesArgs ta;
  auto* s = app.add_subcommand("townes", "solve for the Townes profile and its constants");
  s->add_option("--rmax", ta.rmax, "outer radius")->capture_default_str();
  s->add_option("--nodes", ta.nodes, "radial nodes")->capture_default_str();
  s->add_option("--tol", ta.tol, "amplitude bisection tolerance")->capture_default_str();
  s->add_option("--out", ta.out, "output JSON (default stdout)");
  s->callback([&] { action = [&] { run_townes(io, ta); }; });

  ClassifyArgs ca;
  s = app.add_subcommand("classify", "region label of a coupling triple, or a phase table");
  add_townes_option(s, ca.townes);
  s->add_option("--b1", ca.b1, "b1 (suffix a for multiples of a*)");
  s->add_option("--b2", ca.b2, "b2");
  s->add_option("--beta", ca.beta, "beta");
  s->add_option("--band", ca.band, "boundary band relative to a*")->capture_default_str();
  s->add_option("--grid", ca.grid, "lo:hi:n sweep of every coordinate not fixed above; CSV output");
  s->add_option("--out", ca.out, "output file (default stdout)");
  s->callback([&] { action = [&] { run_classify(io, ca); }; });

  PotArgs pa;
  s = app.add_subcommand("analyze-potential", "common zeros, flatness p0 and gamma of a trap pair");
  s->add_option("--pot", pa.pot, "potential JSON")->required();
  s->add_option("--out", pa.out, "output JSON (default stdout)");
  s->callback([&] { action = [&] { run_analyze(io, pa); }; });

  MinimizeArgs ma;
  s = app.add_subcommand("minimize", "constrained minimization of the energy");
  s->add_option("--config", ma.config, "run JSON {params, potential, grid, flow}")->required();
  add_townes_option(s, ma.townes);
  s->add_option("--out", ma.out, "result JSON (default stdout)");
  s->add_option("--fields", ma.fields, "binary field output");
  s->callback([&] { action = [&] { run_minimize(io, ma); }; });

  MinimizeArgs qa;
  s = app.add_subcommand("gn-quotient", "numerical Gagliardo-Nirenberg quotient of a coupling triple");
  s->add_option("--config", qa.config, "JSON {params, grid, flow}")->required();
  add_townes_option(s, qa.townes);
  s->add_option("--out", qa.out, "result JSON (default stdout)");
  s->add_option("--fields", qa.fields, "binary output of the minimizing pair");
  s->callback([&] { action = [&] { run_quotient(io, qa); }; });

  MinimizeArgs ea;
  s = app.add_subcommand("escape-test", "energy along the mass-preserving dilation of a concentrating pair");
  s->add_option("--config", ea.config, "JSON {params, potential, grid, flow, lambdas}")->required();
  add_townes_option(s, ea.townes);
  s->add_option("--out", ea.out, "result JSON (default stdout)");
  s->callback([&] { action = [&] { run_escape(io, ea); }; });

  SweepArgs sa;
  s = app.add_subcommand("sweep", "continuation sweep toward the critical segment");
  s->add_option("--spec", sa.spec, "sweep JSON, or {\"sweeps\": [...]}")->required();
  add_townes_option(s, sa.townes);
  s->add_option("--out", sa.out, "records CSV (records.<k>.csv for several sweeps)")->required();
  s->add_option("--fields", sa.fields, "binary fields of the last point");
  s->add_option("--jobs", sa.jobs, "sweeps run concurrently")->check(CLI::PositiveNumber)->capture_default_str();
  s->callback([&] { action = [&] { run_sweep(io, sa); }; });

  FitArgs fa;
  s = app.add_subcommand("fit", "power-law fit of sweep records");
  s->add_option("--records", fa.records, "records CSV")->required();
  s->add_option("--what", fa.what, "energy or l4")->required()->check(CLI::IsMember({"energy", "l4"}));
  s->add_option("--p0", fa.p0, "flatness exponent for the target")->capture_default_str();
  s->add_option("--component", fa.component, "l4 component: 1, 2, or 0 for both")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  s->add_option("--out", fa.out, "output JSON (default stdout)");
  s->callback([&] { action = [&] { run_fit(io, fa); }; });

  ReportArgs ra;
  s = app.add_subcommand("report", "summary of a sweep with optional SVG plots");
  s->add_option("--records", ra.records, "records CSV")->required();
  add_townes_option(s, ra.townes);
  s->add_option("--pot", ra.pot, "potential JSON (default harmonic)");
  s->add_option("--spacing", ra.spacing, "grid spacing for the concentration check");
  s->add_option("--fields", ra.fields, "fields of the last record for the profile overlay");
  s->add_option("--plots", ra.plots, "directory for SVG plots");
  s->add_option("--out", ra.out, "output JSON (default stdout)");
  s->callback([&] { action = [&] { run_report(io, ra); }; });

  WellsArgs wa;
  s = app.add_subcommand("scenario-wells", "separated wells on the critical segment");
  add_townes_option(s, wa.townes);
  s->add_option("--n", wa.n, "grid points per side")->capture_default_str();
  s->add_option("--extent", wa.extent, "box half-width")->capture_default_str();
  s->add_option("--grad-tol", wa.grad_tol, "residual tolerance")->capture_default_str();
  s->add_option("--beta-fraction", wa.opts.beta_fraction, "beta / a*")->capture_default_str();
  s->add_option("--plateau-factor", wa.opts.plateau_factor, "plateau height in units of C_zeta")
      ->capture_default_str();
  s->add_option("--offset-fraction", wa.opts.offset_fraction, "distance below the segment / a*")
      ->capture_default_str();
  s->add_option("--out", wa.out, "output JSON (default stdout)");
  s->callback([&] { action = [&] { run_wells(io, wa); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto report = [&](const std::string& kind, const std::string& message) {
    err << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    return 1;
  };
  try {
    action();
  } catch (const UsageError& e) {
    err << e.what() << "\n" << "Run with --help for more information.\n";
    return 2;
  } catch (const Error& e) {
    return report(e.kind(), e.message());
  } catch (const nlohmann::json::exception& e) {
    return report("ConfigError", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report("IOError", e.what());
  }
  return 0;
}

}  // namespace gpduo::cli
