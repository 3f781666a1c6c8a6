#include "qcdiff/cases.hpp"

#include "qcdiff/oracles.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace qcdiff {

namespace fs = std::filesystem;

bool CaseResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"bupu-check", "norms",    "s0-isometry", "psf",           "density",
                                              "fourier-bohr", "autocorr", "diffract",    "wiener-diagram"};
  return names;
}

CaseResult run_command(const std::string& command, const json& config, const RunOptions& opt) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  const std::string declared = get_string(config, "command", command);
  if (declared != command) throw ConfigError("config is for '" + declared + "', not '" + command + "'");
  if (command == "bupu-check") return run_bupu_check(config, opt);
  if (command == "norms") return run_norms(config, opt);
  if (command == "s0-isometry") return run_s0_isometry(config, opt);
  if (command == "psf") return run_psf(config, opt);
  if (command == "density") return run_density(config, opt);
  if (command == "fourier-bohr") return run_fourier_bohr(config, opt);
  if (command == "autocorr") return run_autocorr(config, opt);
  if (command == "diffract") return run_diffract(config, opt);
  if (command == "wiener-diagram") return run_wiener_diagram(config, opt);
  throw ConfigError("unknown command '" + command + "'");
}

namespace {

Check le(std::string name, double value, double limit, std::string detail = {}) {
  return Check{std::move(name), value <= limit, value, limit, std::move(detail)};
}

Check ge(std::string name, double value, double limit, std::string detail = {}) {
  return Check{std::move(name), value >= limit, value, limit, std::move(detail)};
}

Check truth(std::string name, bool ok, std::string detail = {}) {
  return Check{std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)};
}

std::uint64_t seed_of(const json& c, const RunOptions& o, std::uint64_t fallback) {
  if (o.seed) return *o.seed;
  return static_cast<std::uint64_t>(get_int(c, "seed", static_cast<int>(fallback)));
}

bool writing(const RunOptions& o) { return o.out_dir.has_value(); }

fs::path artifact(const RunOptions& o, const std::string& name) {
  fs::create_directories(*o.out_dir);
  return *o.out_dir / name;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}, {"detail", c.detail}});
  return a;
}

void finish(CaseResult& r, const RunOptions& o) {
  r.report["command"] = r.command;
  r.report["case"] = o.case_name.empty() ? r.command : o.case_name;
  r.report["checks"] = checks_json(r.checks);
  r.report["pass"] = r.pass();
  if (writing(o)) write_json(artifact(o, "report.json"), r.report);
}

Vec vec_from(const json& j, const std::string& what) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError(what + " must be a number or an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::vector<Vec> vecs_from(const json& c, const std::string& key, int dim, std::vector<Vec> fallback) {
  if (!c.contains(key)) return fallback;
  const auto& a = c.at(key);
  if (!a.is_array()) throw ConfigError("'" + key + "' must be an array");
  std::vector<Vec> out;
  for (const auto& x : a) {
    out.push_back(vec_from(x, key));
    if (out.back().size() != dim) throw ConfigError("'" + key + "' entries have the wrong dimension");
  }
  return out;
}

const json& sub(const json& c, const std::string& key) {
  if (!c.contains(key)) throw ConfigError("missing field '" + key + "'");
  return c.at(key);
}

json empty_object() { return json::object(); }

const json& sub_or_empty(const json& c, const std::string& key) {
  static const json e = empty_object();
  return c.contains(key) ? c.at(key) : e;
}

WeightedModelSet model_set_from(const json& c, const RunOptions& o) {
  WeightedModelSet ms{scheme_from_json(sub(c, "scheme"), o.config_dir), weight_from_json(sub(c, "weight"))};
  if (ms.weight.dim() != ms.scheme.internal_dim())
    throw ConfigError("weight dimension " + std::to_string(ms.weight.dim()) + " does not match internal dimension " +
                      std::to_string(ms.scheme.internal_dim()));
  return ms;
}

ExclusionRule exclusion_from(const json& j) {
  ExclusionRule r;
  r.min_radius = get_double(j, "min_radius", r.min_radius);
  r.amplitude_factor = get_double(j, "amplitude_factor", r.amplitude_factor);
  r.amplitude_floor = get_double(j, "amplitude_floor", r.amplitude_floor);
  return r;
}

TaperRule taper_from(const json& j) {
  TaperRule t;
  t.coefficient = get_double(j, "coefficient", t.coefficient);
  t.exponent = get_double(j, "exponent", t.exponent);
  return t;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json box_json(const Box& b) { return {{"center", vec_json(b.center())}, {"half_widths", vec_json(b.half_widths())}}; }

// ---------------------------------------------------------------------------
// BUPU construction from config

std::vector<double> delone_centers(const json& j, const RunOptions& o) {
  std::vector<double> out;
  if (j.contains("points")) return get_doubles(j, "points");
  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    const double s = get_double(l, "spacing", 1.0);
    const Box r = box_from_json(sub(l, "range"));
    std::set<long long> removed;
    if (l.contains("remove"))
      for (double x : get_doubles(l, "remove")) removed.insert(std::llround(x / s));
    for (auto n = static_cast<long long>(std::ceil(r.lower()[0] / s)); n * s <= r.upper()[0]; ++n)
      if (!removed.count(n)) out.push_back(static_cast<double>(n) * s);
    return out;
  }
  const auto ms = model_set_from(sub(j, "model_set"), o);
  if (ms.scheme.physical_dim() != 1) throw ConfigError("Delone centres must be one-dimensional");
  const auto mat = materialize(ms, box_from_json(sub(j, "range")));
  for (const auto& p : mat.comb.points()) out.push_back(p[0]);
  return out;
}

Bupu build_bupu(const json& j, const RunOptions& o) {
  const std::string kind = get_string(j, "kind", "");
  if (kind == "triangular") return triangular_bupu(get_double(j, "spacing"), box_from_json(sub(j, "window")));
  if (kind == "product") {
    const auto& f = sub(j, "factors");
    if (!f.is_array() || f.size() != 2) throw ConfigError("product BUPU needs two factors");
    return product_bupu(build_bupu(f[0], o), build_bupu(f[1], o));
  }
  if (kind == "smoothed") {
    BoxIndicatorFamily raw{get_double(j, "spacing", 1.0), box_from_json(sub(j, "window")), get_double(j, "height", 1.0)};
    return smooth_bupu(raw, get_double(j, "mollifier_width"), get_double(j, "size_half_width", 0.0));
  }
  if (kind == "delone") {
    const auto& psi = sub(j, "psi");
    const auto bump = BumpFunction::triangle(0.0, get_double(psi, "half_width"), get_double(psi, "height", 1.0));
    return delone_bupu(delone_centers(sub(j, "centers"), o), bump, box_from_json(sub(j, "v")),
                       box_from_json(sub(j, "window")));
  }
  if (kind == "refine") return refine(build_bupu(sub(j, "a"), o), build_bupu(sub(j, "b"), o));
  throw ConfigError("unknown BUPU kind '" + kind + "'");
}

json bupu_json(const Bupu& b) {
  json centers = json::array();
  for (const auto& c : b.centers()) centers.push_back(c.size() == 1 ? json(c[0]) : vec_json(c));
  return {{"kind", b.kind()},          {"centers", centers},        {"size_U", box_json(b.size_u())},
          {"norm_M", b.norm_m()},      {"overlap_B", b.overlap_b()}, {"coverage", box_json(b.coverage())}};
}

}  // namespace

// ---------------------------------------------------------------------------
// bupu-check

CaseResult run_bupu_check(const json& c, const RunOptions& o) {
  const auto samples = static_cast<std::size_t>(get_int(c, "samples", 10000));
  const double tol = get_double(c, "tolerance", 1e-10);
  const auto seed = seed_of(c, o, 1);
  const auto& list = sub(c, "bupus");
  if (!list.is_array() || list.empty()) throw ConfigError("'bupus' must be a nonempty array");
  for (const auto& b : list)
    if (!b.is_object()) throw ConfigError("every BUPU entry must be an object");

  CaseResult r{"bupu-check", {}, {}};
  json exported = json::array(), reports = json::array();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& entry = list[i];
    const std::string name = get_string(entry, "name", "bupu" + std::to_string(i));
    const Bupu b = build_bupu(entry, o);
    const Box window = entry.contains("check_window") ? box_from_json(entry.at("check_window")) : b.coverage();
    const AxiomReport a = verify_axioms(b, window, samples, seed + i);
    r.checks.push_back(le(name + ": partition of unity", a.max_sum_deviation, tol));
    r.checks.push_back(le(name + ": overlap", a.measured_overlap, a.declared_overlap));
    r.checks.push_back(le(name + ": sup norm", a.measured_norm, a.declared_norm * (1.0 + 1e-12)));
    r.checks.push_back(le(name + ": support leaks", static_cast<double>(a.support_violations), 0.0));
    r.checks.push_back(truth(name + ": overlap sandwich", a.sandwich_holds,
                             std::to_string(static_cast<int>(a.sandwich_lower)) + " <= " +
                                 std::to_string(a.measured_overlap) + " <= " +
                                 std::to_string(static_cast<int>(a.sandwich_upper))));
    if (entry.contains("max_center_multiplicity"))
      r.checks.push_back(le(name + ": centre multiplicity", a.max_center_multiplicity,
                            get_int(entry, "max_center_multiplicity", 1)));
    reports.push_back({{"name", name},
                       {"functions", b.size()},
                       {"max_sum_deviation", a.max_sum_deviation},
                       {"measured_overlap", a.measured_overlap},
                       {"declared_overlap", a.declared_overlap},
                       {"measured_norm", a.measured_norm},
                       {"declared_norm", a.declared_norm},
                       {"support_violations", a.support_violations},
                       {"samples", a.samples},
                       {"sandwich_lower", a.sandwich_lower},
                       {"sandwich_upper", a.sandwich_upper},
                       {"max_center_multiplicity", a.max_center_multiplicity}});
    json e = bupu_json(b);
    e["name"] = name;
    exported.push_back(std::move(e));
  }
  r.report["bupus"] = reports;
  if (writing(o)) write_json(artifact(o, "bupus.json"), exported);
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// norms

CaseResult run_norms(const json& c, const RunOptions& o) {
  const double a_phi = get_double(c, "phi_spacing", 1.0);
  const double a_psi = get_double(c, "psi_spacing", 0.5);
  const Box window = box_from_json(c.contains("window") ? c.at("window") : json::array({-20.0, 20.0}));
  const int count = get_int(c, "functions", 50);
  const auto seed = seed_of(c, o, 3);
  const int max_knots = get_int(c, "max_knots", 12);
  if (count < 1 || max_knots < 1) throw ConfigError("functions and max_knots must be positive");

  const Bupu phi = triangular_bupu(a_phi, window);
  const Bupu psi = triangular_bupu(a_psi, window);
  const Box u = phi.size_u(), v = psi.size_u();
  // the counted constants of the equivalence
  const double c_psi = point_family_norm(psi.centers(), u.difference(v)) * psi.norm_m();
  const double c_phi = point_family_norm(phi.centers(), v.difference(u)) * phi.norm_m();
  const Box allowed = phi.coverage().shrunk(u.grown(v));
  const double lo = allowed.lower()[0], hi = allowed.upper()[0];

  // comb for the integrability and convolution bounds
  const WeightedComb mu = WeightedComb::lattice_1d(window, 1.0);
  const double mu_u = comb_norm(mu, u);
  const double c_conv = point_family_norm(phi.centers(), u.difference(u)) * phi.norm_m();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> knots(1, max_knots);
  std::size_t viol_psi = 0, viol_phi = 0, viol_sup = 0, viol_sym = 0, viol_int = 0, viol_conv = 0;
  double worst_psi = 0.0, worst_phi = 0.0;
  const Bupu phi_reflected = phi.reflected();

  CaseResult r{"norms", {}, {}};
  json rows = json::array();
  std::vector<std::array<double, 6>> csv;
  for (int i = 0; i < count; ++i) {
    double a = lo + (hi - lo) * unif(rng), b = lo + (hi - lo) * unif(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.05) b = std::min(hi, a + 0.05 + 4.0 * unif(rng));
    const auto f = random_piecewise_linear(a, b, knots(rng), rng(), i % 2 == 1);
    const double nphi = wiener_norm(f, phi), npsi = wiener_norm(f, psi);
    if (npsi > c_psi * nphi * (1.0 + 1e-12)) ++viol_psi;
    if (nphi > c_phi * npsi * (1.0 + 1e-12)) ++viol_phi;
    worst_psi = std::max(worst_psi, npsi / (c_psi * nphi));
    worst_phi = std::max(worst_phi, nphi / (c_phi * npsi));
    if (f.sup_norm() > nphi * (1.0 + 1e-12)) ++viol_sup;
    // |f| is not representable on f's grid across sign changes, so phase
    // invariance is tested with a unimodular factor instead
    const double nconj = wiener_norm(f.conj(), phi);
    const double nphase = wiener_norm(f.scaled(std::polar(1.0, 0.3 + i)), phi);
    const double nrefl = wiener_norm(f.reflected(), phi_reflected);
    if (nconj != nphi || std::abs(nphase - nphi) > 1e-12 * nphi || std::abs(nrefl - nphi) > 1e-12 * nphi) ++viol_sym;
    const double integ = evaluate(mu, [&](const Vec& x) { return cplx(std::abs(f(x))); }).real();
    if (integ > mu_u * nphi * (1.0 + 1e-12)) ++viol_int;
    double conv = 0.0;
    for (double x = a - 1.0; x <= b + 1.0; x += 0.01)
      conv = std::max(conv, std::abs(convolve_at(mu, [&](const Vec& y) { return f(y); }, Vec::Constant(1, x))));
    if (conv > c_conv * mu_u * nphi * (1.0 + 1e-12)) ++viol_conv;
    csv.push_back({static_cast<double>(i), nphi, npsi, f.sup_norm(), c_psi * nphi, c_phi * npsi});
  }
  const auto sandwich = operator_norm_sandwich(mu, phi, 100, seed + 1);

  r.checks.push_back(le("||f||_Psi <= C ||f||_Phi violations", static_cast<double>(viol_psi), 0.0,
                        "C = ||delta_Y||_{U-V} M_Psi = " + format_double(c_psi)));
  r.checks.push_back(le("||f||_Phi <= C' ||f||_Psi violations", static_cast<double>(viol_phi), 0.0,
                        "C' = ||delta_X||_{V-U} M_Phi = " + format_double(c_phi)));
  r.checks.push_back(le("sup norm below Wiener norm violations", static_cast<double>(viol_sup), 0.0));
  r.checks.push_back(le("conj / phase / reflection invariance violations", static_cast<double>(viol_sym), 0.0));
  r.checks.push_back(le("integrability bound violations", static_cast<double>(viol_int), 0.0));
  r.checks.push_back(le("mu * f sup bound violations", static_cast<double>(viol_conv), 0.0));
  r.checks.push_back(le("operator quotient above upper bound", static_cast<double>(sandwich.violations), 0.0,
                        "sandwich (" + format_double(sandwich.lower) + ", " + format_double(sandwich.upper) + ")"));
  r.report["constants"] = {{"psi_over_phi", c_psi}, {"phi_over_psi", c_phi}, {"mu_U", mu_u}, {"C_phi", c_conv}};
  r.report["worst_ratio"] = {{"psi_over_phi", worst_psi}, {"phi_over_psi", worst_phi}};
  r.report["sandwich"] = {{"lower", sandwich.lower},
                          {"upper", sandwich.upper},
                          {"max_quotient", sandwich.max_quotient},
                          {"tests", sandwich.tests}};
  if (writing(o)) {
    CsvWriter w(artifact(o, "norms.csv"), {"index", "phi_norm", "psi_norm", "sup_norm", "bound_psi", "bound_phi"});
    for (const auto& row : csv) {
      for (double x : row) w << x;
      w.end_row();
    }
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// s0-isometry

namespace {

Grid grid_from(const json& j, double lo, double hi, int n) {
  return Grid::uniform(get_double(j, "lo", lo), get_double(j, "hi", hi), get_int(j, "n", n));
}

}  // namespace

CaseResult run_s0_isometry(const json& c, const RunOptions& o) {
  const Grid sample = grid_from(sub_or_empty(c, "sample_grid"), -12.0, 12.0, 769);
  const Grid time = grid_from(sub_or_empty(c, "time_grid"), -7.0, 7.0, 225);
  const Grid freq = grid_from(sub_or_empty(c, "freq_grid"), -7.0, 7.0, 225);
  const double iso_tol = get_double(c, "isometry_tolerance", 1e-3);
  const double gauss_tol = get_double(c, "gaussian_tolerance", 1e-4);
  const double richardson = get_double(c, "richardson_tolerance", 1e-4);
  const double beta = get_double(c, "modulation", 0.37);
  std::vector<Profile> fs;
  std::vector<std::string> names;
  if (c.contains("functions")) {
    for (const auto& f : c.at("functions")) {
      fs.push_back(profile_from_json(f));
      names.push_back(fs.back().name());
    }
  } else {
    fs = {Profile::gaussian(0.7), Profile::gaussian(1.3), Profile::hermite_gaussian(1.0)};
    for (const auto& f : fs) names.push_back(f.name());
  }
  if (fs.empty()) throw ConfigError("no test functions");

  const auto g = SampledFunction::sample(Profile::gaussian(1.0), sample);
  CaseResult r{"s0-isometry", {}, {}};
  const auto self = s0_norm(g, g, time, freq, richardson);
  r.checks.push_back(le("||g||_S0 - sqrt 2", std::abs(self.value - std::sqrt(2.0)), gauss_tol,
                        "value " + format_double(self.value)));

  json rows = json::array();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto f = SampledFunction::sample(fs[i], sample);
    const auto fh = f.fourier(sample);
    const auto nf = s0_norm(f, g, time, freq, richardson);
    const auto nh = s0_norm(fh, g, time, freq, richardson);
    const double rel = std::abs(nh.value - nf.value) / nf.value;
    r.checks.push_back(le(names[i] + ": Fourier isometry", rel, iso_tol));
    r.checks.push_back(truth(names[i] + ": quadrature converged", nf.accepted && nh.accepted,
                             "halving deltas " + format_double(nf.richardson_delta) + ", " +
                                 format_double(nh.richardson_delta)));
    rows.push_back({{"function", names[i]},
                    {"norm", nf.value},
                    {"norm_fourier", nh.value},
                    {"relative_gap", rel},
                    {"boundary_mass_ratio", std::max(nf.boundary_mass_ratio, nh.boundary_mass_ratio)}});
    if (i == 0) {
      const auto n2 = s0_norm(f.scaled(2.0), g, time, freq, richardson);
      r.checks.push_back(le(names[i] + ": homogeneity", std::abs(n2.value - 2.0 * nf.value) / (2.0 * nf.value), 1e-10));
      const auto nm = s0_norm(f.modulated(beta), g, time, freq, richardson);
      r.checks.push_back(le(names[i] + ": character invariance", std::abs(nm.value - nf.value) / nf.value, 1e-6));
    }
  }
  r.report["gaussian_self_norm"] = self.value;
  r.report["functions"] = rows;
  if (writing(o)) {
    CsvWriter w(artifact(o, "s0.csv"), {"function", "norm", "norm_fourier", "relative_gap"});
    for (const auto& row : rows) {
      w << row["function"].get<std::string>() << row["norm"].get<double>() << row["norm_fourier"].get<double>()
        << row["relative_gap"].get<double>();
      w.end_row();
    }
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// psf

CaseResult run_psf(const json& c, const RunOptions& o) {
  const auto& cases = sub(c, "cases");
  if (!cases.is_array() || cases.empty()) throw ConfigError("'cases' must be a nonempty array");
  const double floor = get_double(c, "monotone_floor", 1e-15);
  struct Plan {
    std::string name;
    CutProjectScheme scheme;
    WeightFunction g, h;
    double radius;
    std::vector<double> radii;
    std::optional<double> max_residual;
    std::optional<double> scale;
  };
  std::vector<Plan> plans;
  for (const auto& k : cases) {
    Plan p{get_string(k, "name", "case"), scheme_from_json(sub(k, "scheme"), o.config_dir), weight_from_json(sub(k, "g")),
           weight_from_json(sub(k, "h")), get_double(k, "radius", 8.0), {}, {}, {}};
    if (k.contains("radii")) p.radii = get_doubles(k, "radii");
    if (k.contains("max_residual")) p.max_residual = get_double(k, "max_residual");
    if (k.contains("scaled_check")) p.scale = get_double(k, "scaled_check");
    if (p.g.dim() != p.scheme.physical_dim() || p.h.dim() != p.scheme.internal_dim())
      throw ConfigError(p.name + ": g and h must match the physical and internal dimensions");
    plans.push_back(std::move(p));
  }

  CaseResult r{"psf", {}, {}};
  json out = json::array();
  std::vector<std::pair<std::string, PsfReport>> rows;
  for (const auto& p : plans) {
    const auto rep = psf_verify(p.scheme, p.g, p.h, p.radius);
    rows.emplace_back(p.name, rep);
    r.checks.push_back(le(p.name + ": residual within 10x bounds", rep.residual,
                          10.0 * (rep.tail_bound + rep.roundoff_bound)));
    if (p.max_residual) r.checks.push_back(le(p.name + ": residual", rep.residual, *p.max_residual));
    json item{{"name", p.name},           {"radius", rep.radius},     {"lhs", rep.lhs.real()},
              {"rhs", rep.rhs.real()},    {"residual", rep.residual}, {"tail_bound", rep.tail_bound},
              {"roundoff_bound", rep.roundoff_bound}, {"density", p.scheme.density()}};
    if (!p.radii.empty()) {
      double prev = std::numeric_limits<double>::infinity();
      std::size_t breaks = 0;
      json seq = json::array();
      for (double rad : p.radii) {
        const auto q = psf_verify(p.scheme, p.g, p.h, rad);
        rows.emplace_back(p.name, q);
        if (q.residual > std::max(prev, floor)) ++breaks;
        prev = q.residual;
        seq.push_back({{"radius", rad}, {"residual", q.residual}});
      }
      r.checks.push_back(le(p.name + ": residual shrinks with radius", static_cast<double>(breaks), 0.0));
      item["radius_sweep"] = seq;
    }
    if (p.scale) {
      const auto scaled = p.scheme.scaled(*p.scale);
      const double expect = p.scheme.density() / std::pow(*p.scale, p.scheme.dim());
      r.checks.push_back(le(p.name + ": density under scaling", std::abs(scaled.density() - expect) / expect, 1e-14));
      const auto q = psf_verify(scaled, p.g, p.h, p.radius * *p.scale);
      rows.emplace_back(p.name + "-scaled", q);
      r.checks.push_back(le(p.name + ": scaled lattice residual", q.residual, 10.0 * (q.tail_bound + q.roundoff_bound)));
    }
    out.push_back(std::move(item));
  }
  r.report["cases"] = out;
  if (writing(o)) {
    CsvWriter w(artifact(o, "psf.csv"), {"case", "radius", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual",
                                         "tail_bound", "roundoff_bound"});
    for (const auto& [name, q] : rows) {
      w << name << q.radius << q.lhs.real() << q.lhs.imag() << q.rhs.real() << q.rhs.imag() << q.residual
        << q.tail_bound << q.roundoff_bound;
      w.end_row();
    }
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// density

CaseResult run_density(const json& c, const RunOptions& o) {
  const auto ms = model_set_from(c, o);
  const int d = ms.scheme.physical_dim();
  const auto seq = sequence_from_json(d, sub_or_empty(c, "sequence"), o.max_n);
  const auto shifts = vecs_from(c, "shifts", d, {Vec::Zero(d), Vec::Constant(d, 0.3), Vec::Constant(d, 12.7)});
  const double k_res = get_double(c, "residual_constant", 5.0);
  const double k_shift = get_double(c, "shift_constant", 5.0);
  const double tail = get_double(c, "tail_eps", 1e-12);

  const auto rep = density_formula_check(ms, seq, shifts, tail);
  CaseResult r{"density", {}, {}};
  double worst_res = 0.0, worst_shift = 0.0;
  std::size_t res_fail = 0, shift_fail = 0;
  for (std::size_t n = 0; n < rep.half_widths.size(); ++n) {
    const double l = rep.half_widths[n];
    worst_res = std::max(worst_res, rep.residual[n] * l);
    worst_shift = std::max(worst_shift, rep.shift_deviation[n] * l);
    if (rep.residual[n] > k_res / l) ++res_fail;
    if (rep.shift_deviation[n] > k_shift / l) ++shift_fail;
  }
  r.checks.push_back(le("max_n L_n |ratio - dens int h|", worst_res, k_res,
                        std::to_string(res_fail) + " stages above the bound"));
  r.checks.push_back(le("max_n L_n shift deviation", worst_shift, k_shift,
                        std::to_string(shift_fail) + " stages above the bound"));
  r.report["target"] = rep.target;
  r.report["final_half_width"] = rep.half_widths.back();
  r.report["final_residual"] = rep.residual.back();
  r.report["dropped_mass_density"] = rep.dropped_mass_density;
  if (writing(o)) {
    CsvWriter w(artifact(o, "density.csv"), {"half_width", "shift", "ratio", "residual"});
    for (std::size_t k = 0; k < shifts.size(); ++k)
      for (std::size_t n = 0; n < rep.half_widths.size(); ++n) {
        w << rep.half_widths[n] << shifts[k][0] << rep.ratios[k][n] << rep.ratios[k][n] - rep.target;
        w.end_row();
      }
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// fourier-bohr

CaseResult run_fourier_bohr(const json& c, const RunOptions& o) {
  const auto ms = model_set_from(c, o);
  const int d = ms.scheme.physical_dim();
  const auto seq = sequence_from_json(d, sub_or_empty(c, "sequence"), o.max_n);
  const Box freq_box = box_from_json(c.contains("freq_box") ? c.at("freq_box") : json::array({-3.0, 3.0}));
  const double peak_eps = get_double(c, "peak_eps", 1e-4);
  const auto max_peaks = static_cast<std::size_t>(get_int(c, "max_peaks", 10));
  const auto off_count = static_cast<std::size_t>(get_int(c, "off_peak_count", 20));
  const auto uniform_peaks = static_cast<std::size_t>(get_int(c, "uniformity_peaks", 3));
  const ExclusionRule excl = exclusion_from(sub_or_empty(c, "exclusion"));
  const auto shifts = vecs_from(c, "shifts", d, {Vec::Constant(d, 0.3), Vec::Constant(d, 12.7), Vec::Constant(d, -40.0)});
  const double k = get_double(c, "constant", 10.0);
  const double tail = get_double(c, "tail_eps", 1e-12);
  const bool allow = get_bool(c, "allow_non_w0", false);
  const auto seed = seed_of(c, o, 2024);

  double reach = seq.half_widths().back();
  for (const auto& t : shifts) reach = std::max(reach, seq.half_widths().back() + t.cwiseAbs().maxCoeff());
  const auto mat = materialize(ms, Box::cube(d, reach + 1.0), tail);

  PeakList peaks = analytic_diffraction(ms, freq_box, peak_eps, allow);
  std::stable_sort(peaks.peaks.begin(), peaks.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.intensity > b.intensity; });
  if (peaks.peaks.size() > max_peaks) peaks.peaks.resize(max_peaks);
  std::vector<Vec> chis;
  for (const auto& p : peaks.peaks) chis.push_back(p.frequency);
  const double floor = excl.amplitude_floor;
  const auto reference = analytic_diffraction(ms, freq_box.grown(Box::cube(d, 1.0)), floor * floor, allow);
  const auto off = off_peak_frequencies(reference, freq_box, off_count, seed, excl);

  const auto on_series = fourier_bohr(mat.comb, chis, seq, Vec::Zero(d));
  const auto off_series = fourier_bohr(mat.comb, off, seq, Vec::Zero(d));

  CaseResult r{"fourier-bohr", {}, {}};
  double worst_on = 0.0, worst_off = 0.0, worst_uni = 0.0;
  for (std::size_t i = 0; i < chis.size(); ++i)
    for (std::size_t n = 0; n < on_series[i].values.size(); ++n)
      worst_on = std::max(worst_on, std::abs(on_series[i].values[n] - peaks.peaks[i].amplitude) * seq.half_widths()[n]);
  for (const auto& s : off_series)
    for (std::size_t n = 0; n < s.values.size(); ++n) worst_off = std::max(worst_off, std::abs(s.values[n]) * seq.half_widths()[n]);
  json uni = json::array();
  for (std::size_t i = 0; i < std::min(uniform_peaks, chis.size()); ++i) {
    const auto u = translate_uniformity_check(mat.comb, chis[i], seq, shifts);
    for (std::size_t n = 0; n < u.deviation.size(); ++n) worst_uni = std::max(worst_uni, u.deviation[n] * seq.half_widths()[n]);
    uni.push_back({{"chi", vec_json(chis[i])}, {"max_deviation", u.max_deviation}});
  }
  r.checks.push_back(ge("dual-projected peaks tested", static_cast<double>(chis.size()), 1.0));
  r.checks.push_back(le("max_n L_n |a_n(chi) - dens h^(eta)|", worst_on, k));
  r.checks.push_back(le("max_n L_n |a_n(chi)| off the dual projection", worst_off, k));
  r.checks.push_back(le("max_n L_n translate deviation", worst_uni, k));
  json pk = json::array();
  for (std::size_t i = 0; i < chis.size(); ++i)
    pk.push_back({{"chi", vec_json(chis[i])},
                  {"eta", vec_json(peaks.peaks[i].internal)},
                  {"target_re", peaks.peaks[i].amplitude.real()},
                  {"target_im", peaks.peaks[i].amplitude.imag()},
                  {"final_re", on_series[i].extrapolated.real()},
                  {"final_im", on_series[i].extrapolated.imag()},
                  {"error_bar", on_series[i].error_bar}});
  r.report["peaks"] = pk;
  r.report["uniformity"] = uni;
  r.report["off_peak_count"] = off.size();
  if (writing(o)) {
    CsvWriter w(artifact(o, "fourier_bohr.csv"), {"kind", "chi", "half_width", "re", "im", "target_re", "target_im"});
    auto dump = [&](const std::string& kind, const FourierBohrSeries& s, cplx target) {
      for (std::size_t n = 0; n < s.values.size(); ++n) {
        w << kind << s.chi[0] << s.half_widths[n] << s.values[n].real() << s.values[n].imag() << target.real()
          << target.imag();
        w.end_row();
      }
    };
    for (std::size_t i = 0; i < chis.size(); ++i) dump("peak", on_series[i], peaks.peaks[i].amplitude);
    for (const auto& s : off_series) dump("off", s, 0.0);
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// autocorr

namespace {

WeightedComb comb_source(const json& j, const Box& window, std::uint64_t seed, const RunOptions& o) {
  const std::string type = get_string(j, "type", "model_set");
  if (type == "model_set") return materialize(model_set_from(j, o), window, get_double(j, "tail_eps", 1e-12)).comb;
  if (window.dim() != 1 && type != "random") throw ConfigError("comb type '" + type + "' is one-dimensional");
  if (type == "half_line") {
    std::vector<Vec> pts;
    for (long long n = 0; static_cast<double>(n) <= window.upper()[0]; ++n)
      if (static_cast<double>(n) >= window.lower()[0]) pts.push_back(Vec::Constant(1, static_cast<double>(n)));
    return WeightedComb::dirac(std::move(pts), window);
  }
  if (type == "random") {
    const int n = get_int(j, "points", 200);
    const bool complex_weights = get_bool(j, "complex", true);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> pts;
    std::vector<cplx> w;
    for (int i = 0; i < n; ++i) {
      Vec p(window.dim());
      for (int k = 0; k < window.dim(); ++k) p[k] = window.lower()[k] + 2.0 * window.half_widths()[k] * u(rng);
      // half the points on a half-integer grid so that differences coincide
      if (i % 2 == 0) p = (p * 2.0).array().round().matrix() / 2.0;
      pts.push_back(window.contains(p) ? p : window.center());
      w.emplace_back(2.0 * u(rng) - 1.0, complex_weights ? 2.0 * u(rng) - 1.0 : 0.0);
    }
    return WeightedComb(std::move(pts), std::move(w), window);
  }
  throw ConfigError("unknown comb type '" + type + "'");
}

double bernoulli_scale(const WeightedComb& c) {
  double s = 0.0;
  for (const auto& w : c.weights()) s += std::norm(w);
  return s;
}

struct OracleTally {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::size_t max_points = 0;
  std::string first_failure;
  void fail(const std::string& what) {
    ++mismatches;
    if (first_failure.empty()) first_failure = what;
  }
};

Mat random_basis(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  while (true) {
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = u(rng);
    const double det = std::abs(b.determinant());
    if (det > 0.4 && b.inverse().cwiseAbs().maxCoeff() < 4.0) return b;
  }
}

void oracle_enumeration(std::mt19937_64& rng, std::size_t count, std::size_t max_points, OracleTally& t) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int shapes[][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 0}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto* sh = shapes[i % 4];
    const int d = sh[0], m = sh[1];
    const CutProjectScheme s(d, m, random_basis(rng, d + m));
    auto make = [&](int dim, double scale) {
      if (dim == 0) return Box::empty_space();
      Vec c(dim), r(dim);
      for (int k = 0; k < dim; ++k) {
        c[k] = scale * (2.0 * u(rng) - 1.0);
        r[k] = 0.2 + scale * u(rng);
      }
      return Box(c, r);
    };
    // redraw with smaller boxes until the instance is within the point budget
    double scale = d + m == 2 ? 20.0 : 5.0;
    Box pb, ib;
    std::vector<std::vector<long long>> want;
    do {
      pb = make(d, scale);
      ib = make(m, 1.5);
      want = oracle::enumerate(s, pb, ib);
      scale *= 0.7;
    } while (want.size() > max_points);
    const auto lib = enumerate_points(s, pb, ib);
    std::vector<std::vector<long long>> got;
    for (const auto& p : lib) got.push_back(p.coords);
    std::sort(got.begin(), got.end());
    ++t.instances;
    t.max_points = std::max(t.max_points, want.size());
    if (got != want)
      t.fail("enumeration instance " + std::to_string(i) + ": " + std::to_string(got.size()) + " vs " +
             std::to_string(want.size()) + " points");
  }
}

WeightedComb random_instance_comb(std::mt19937_64& rng, int d, std::size_t n, bool duplicates) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double side = d == 1 ? 0.8 * static_cast<double>(n) : 1.2 * std::sqrt(static_cast<double>(n));
  const Box window = Box::cube(d, 0.5 * side + 1.0);
  std::vector<Vec> pts;
  std::vector<cplx> w;
  for (std::size_t i = 0; i < n; ++i) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = side * (u(rng) - 0.5);
    if (i % 3 == 0) p = (p * 4.0).array().round().matrix() / 4.0;  // coincident differences
    if (duplicates && i == n - 1) p = pts.front();
    pts.push_back(p);
    w.emplace_back(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
  }
  return WeightedComb(std::move(pts), std::move(w), window);
}

void oracle_geometry(std::mt19937_64& rng, std::size_t count, std::size_t max_points, OracleTally& t) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const int d = i % 2 == 0 ? 1 : 2;
    const std::size_t cap = d == 1 ? max_points : std::min<std::size_t>(max_points, 120);
    const auto n = static_cast<std::size_t>(20 + u(rng) * static_cast<double>(cap - 20));
    const auto comb = random_instance_comb(rng, d, n, i % 5 == 0);
    const Box k = Box::cube(d, 0.3 + 1.5 * u(rng));
    const auto g = geometry(comb, k);
    ++t.instances;
    t.max_points = std::max(t.max_points, n);
    // the oracle sees the unmerged family
    std::vector<Vec> family;
    std::vector<double> abs_w;
    for (std::size_t p = 0; p < comb.size(); ++p) {
      for (int r = 0; r < comb.multiplicities()[p]; ++r) family.push_back(comb.points()[p]);
      abs_w.push_back(std::abs(comb.weights()[p]));
    }
    const std::string tag = "geometry instance " + std::to_string(i);
    const double sep = oracle::separation(family);
    if (std::abs(sep - g.separation_radius) > 1e-12 * std::max(1.0, sep)) t.fail(tag + ": separation");
    int mult = 1;
    for (int m : comb.multiplicities()) mult = std::max(mult, m);
    if (mult != g.max_multiplicity || (mult > 1) == g.uniformly_discrete) t.fail(tag + ": multiplicity");
    const double cn = oracle::comb_norm(comb.points(), abs_w, k);
    if (std::abs(cn - comb_norm(comb, k)) > 1e-12 * std::max(1.0, cn)) t.fail(tag + ": comb norm");
    std::vector<double> ones(family.size(), 1.0);
    if (std::abs(oracle::comb_norm(family, ones, k) - g.comb_norm_k) > 1e-9) t.fail(tag + ": point family norm");
    if (d == 1) {
      const Box inner = comb.window().shrunk(k);
      std::vector<double> xs;
      for (const auto& p : comb.points()) xs.push_back(p[0]);
      const double cov = oracle::covering_1d(xs, inner.lower()[0], inner.upper()[0]);
      if (std::abs(cov - g.covering_radius) > 1e-12 * std::max(1.0, cov)) t.fail(tag + ": covering radius");
    }
  }
}

void oracle_autocorrelation(std::mt19937_64& rng, std::size_t count, std::size_t max_points, OracleTally& t) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(i % 3);
    const auto n = static_cast<std::size_t>(10 + u(rng) * static_cast<double>(max_points - 10));
    const auto comb = random_instance_comb(rng, d, n, i % 4 == 0);
    const double vol = comb.window().volume();
    const auto lib = autocorrelation_finite(comb, vol);
    // unmerged family with the merged weight split evenly is not the same
    // measure; feed the merged comb instead
    const auto want = oracle::autocorrelation(comb.points(), comb.weights(), vol);
    ++t.instances;
    t.max_points = std::max(t.max_points, n);
    const std::string tag = "autocorrelation instance " + std::to_string(i);
    if (lib.size() != want.size()) {
      t.fail(tag + ": " + std::to_string(lib.size()) + " vs " + std::to_string(want.size()) + " coefficients");
      continue;
    }
    const double scale = bernoulli_scale(comb) / vol;
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (max_abs_diff(lib.points()[k], want[k].z) > 2.0 * kMergeTolerance ||
          std::abs(lib.weights()[k] - want[k].value) > 1e-12 * std::max(1.0, scale)) {
        t.fail(tag + ": coefficient " + std::to_string(k));
        break;
      }
    }
  }
}

}  // namespace

CaseResult run_autocorr(const json& c, const RunOptions& o) {
  const std::string mode = get_string(c, "mode", "positive-definite");
  CaseResult r{"autocorr", {}, {}};
  r.report["mode"] = mode;
  if (mode == "oracle") {
    const auto count = static_cast<std::size_t>(get_int(c, "instances", 50));
    const auto max_points = static_cast<std::size_t>(get_int(c, "max_points", 500));
    if (max_points < 30) throw ConfigError("max_points must be at least 30");
    std::mt19937_64 rng(seed_of(c, o, 9));
    OracleTally en, ge_, ac;
    oracle_enumeration(rng, count, max_points, en);
    oracle_geometry(rng, count, max_points, ge_);
    oracle_autocorrelation(rng, count, max_points, ac);
    r.checks.push_back(le("lattice enumeration mismatches", static_cast<double>(en.mismatches), 0.0, en.first_failure));
    r.checks.push_back(le("comb geometry mismatches", static_cast<double>(ge_.mismatches), 0.0, ge_.first_failure));
    r.checks.push_back(le("finite autocorrelation mismatches", static_cast<double>(ac.mismatches), 0.0, ac.first_failure));
    r.checks.push_back(ge("instances per family", static_cast<double>(std::min({en.instances, ge_.instances, ac.instances})),
                          static_cast<double>(count)));
    json fam = json::array();
    for (const auto& [name, tl] : {std::pair<std::string, OracleTally*>{"enumeration", &en},
                                   {"geometry", &ge_},
                                   {"autocorrelation", &ac}})
      fam.push_back({{"family", name}, {"instances", tl->instances}, {"mismatches", tl->mismatches},
                     {"max_points", tl->max_points}});
    r.report["families"] = fam;
    if (writing(o)) {
      CsvWriter w(artifact(o, "oracle.csv"), {"family", "instances", "mismatches", "max_points"});
      for (const auto& f : fam) {
        w << f["family"].get<std::string>() << static_cast<double>(f["instances"].get<std::size_t>())
          << static_cast<double>(f["mismatches"].get<std::size_t>())
          << static_cast<double>(f["max_points"].get<std::size_t>());
        w.end_row();
      }
    }
    finish(r, o);
    return r;
  }
  if (mode != "positive-definite") throw ConfigError("unknown autocorr mode '" + mode + "'");

  const double tol = get_double(c, "tolerance", 1e-10);
  const auto& combs = sub(c, "combs");
  if (!combs.is_array() || combs.empty()) throw ConfigError("'combs' must be a nonempty array");
  const auto& bat = sub_or_empty(c, "battery");
  const auto seed = seed_of(c, o, 11);
  struct Row {
    std::string name;
    double half_width;
    std::size_t points, coefficients;
    double min_real, max_imag, mass_gap;
    bool hermitian;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, WeightedComb>> finals;
  for (std::size_t ci = 0; ci < combs.size(); ++ci) {
    const auto& entry = combs[ci];
    const std::string name = get_string(entry, "name", "comb" + std::to_string(ci));
    const int d = get_int(entry, "dim", 1);
    const auto seq = sequence_from_json(d, sub_or_empty(entry, "sequence"), o.max_n);
    const auto omega = comb_source(entry, seq.box(seq.max_n()), seed + ci, o);
    if (omega.dim() != d) throw ConfigError(name + ": comb dimension differs from 'dim'");
    const auto battery = bump_battery(d, static_cast<std::size_t>(get_int(bat, "count", 20)),
                                      static_cast<std::uint64_t>(get_int(bat, "seed", 11)));
    std::size_t pd_fail = 0, herm_fail = 0, mass_fail = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= seq.max_n(); ++n) {
      const Box a = seq.box(n);
      const auto local = restrict(omega, a);
      const auto gamma = autocorrelation_finite(local, a.volume());
      const auto pd = positive_definiteness(gamma, battery);
      CompensatedSum<cplx> total, mass;
      for (const auto& w : local.weights()) total += w;
      for (const auto& w : gamma.weights()) mass += w;
      const double want = std::norm(total.value());
      const double mass_gap = std::abs(mass.value() * a.volume() - want) / std::max(1.0, want);
      if (!pd.passes(tol)) ++pd_fail;
      if (!pd.hermitian_exact) ++herm_fail;
      if (mass_gap > 1e-12) ++mass_fail;
      worst = std::min(worst, pd.min_real);
      rows.push_back({name, seq.half_width(n), local.size(), gamma.size(), pd.min_real, pd.max_imag, mass_gap,
                      pd.hermitian_exact});
      if (n == seq.max_n()) finals.emplace_back(name, gamma);
    }
    r.checks.push_back(le(name + ": stages with gamma(f * f~) < -tol scale", static_cast<double>(pd_fail), 0.0,
                          "min normalised value " + format_double(worst)));
    r.checks.push_back(le(name + ": stages without exact hermitian symmetry", static_cast<double>(herm_fail), 0.0));
    r.checks.push_back(le(name + ": stages violating the mass identity", static_cast<double>(mass_fail), 0.0));
  }
  json st = json::array();
  for (const auto& row : rows)
    st.push_back({{"comb", row.name}, {"half_width", row.half_width}, {"points", row.points},
                  {"coefficients", row.coefficients}, {"min_real", row.min_real}, {"max_imag", row.max_imag},
                  {"mass_gap", row.mass_gap}, {"hermitian", row.hermitian}});
  r.report["stages"] = st;
  if (writing(o)) {
    CsvWriter w(artifact(o, "positive_definite.csv"),
                {"comb", "half_width", "points", "coefficients", "min_real", "max_imag", "mass_gap"});
    for (const auto& row : rows) {
      w << row.name << row.half_width << static_cast<double>(row.points) << static_cast<double>(row.coefficients)
        << row.min_real << row.max_imag << row.mass_gap;
      w.end_row();
    }
    for (const auto& [name, g] : finals) write_comb_csv(artifact(o, "autocorrelation_" + name + ".csv"), g);
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// diffract

CaseResult run_diffract(const json& c, const RunOptions& o) {
  const auto ms = model_set_from(c, o);
  const int d = ms.scheme.physical_dim();
  const Box freq_box = box_from_json(c.contains("freq_box") ? c.at("freq_box") : json::array({-3.0, 3.0}));
  const double amp_eps = get_double(c, "amp_eps", 1e-6);
  const bool allow = get_bool(c, "allow_non_w0", false);
  const double central_tol = get_double(c, "central_tolerance", 1e-10);
  const json& emp = sub_or_empty(c, "empirical");
  const bool run_empirical = !emp.empty();
  const auto seq = run_empirical ? sequence_from_json(d, sub_or_empty(emp, "sequence"), o.max_n)
                                 : VanHoveSequence(d, {1.0});
  const TaperRule taper = taper_from(sub_or_empty(emp, "taper"));
  const auto max_peaks = static_cast<std::size_t>(get_int(emp, "max_peaks", 10));
  const double emp_tol = get_double(emp, "tolerance", 0.02);

  const auto peaks = analytic_diffraction(ms, freq_box, amp_eps, allow);
  CaseResult r{"diffract", {}, {}};
  r.checks.push_back(le("flagged dual-projection collisions", static_cast<double>(peaks.flagged_collisions), 0.0));

  // central intensity against an independent quadrature of the weight
  if (freq_box.contains(Vec::Zero(d))) {
    cplx integral = ms.weight.amplitude();
    for (const auto& p : ms.weight.factors()) {
      // indicators are integrated between their jumps, smooth kinds over their numerical support
      const bool ind = p.kind() == ProfileKind::Indicator;
      const double lo = ind ? p.lo() : p.center() - p.support_radius(1e-18);
      const double hi = ind ? p.hi() : p.center() + p.support_radius(1e-18);
      // midpoint rule: never samples the jumps of an indicator
      const int n = 200000;
      const double h = (hi - lo) / n;
      CompensatedSum<cplx> s;
      for (int i = 0; i < n; ++i) s += h * p(lo + h * (i + 0.5));
      integral *= s.value();
    }
    const double want = std::pow(ms.scheme.density(), 2) * std::norm(integral);
    const Peak* zero = peaks.find(Vec::Zero(d));
    const double got = zero ? zero->intensity : 0.0;
    r.checks.push_back(le("central intensity vs dens^2 (int h)^2", std::abs(got - want) / std::max(want, 1e-300),
                          central_tol, "analytic " + format_double(got) + ", quadrature " + format_double(want)));
    r.report["central_intensity"] = got;
  }
  if (ms.weight.is_real_even()) {
    double asym = 0.0;
    for (const auto& p : peaks.peaks) {
      const Peak* q = peaks.find(-p.frequency);
      asym = std::max(asym, q ? std::abs(q->intensity - p.intensity) : p.intensity);
    }
    r.checks.push_back(le("intensity(chi) - intensity(-chi)", asym, 1e-15));
  }
  r.report["peaks"] = peaks.peaks.size();

  EmpiricalDiffraction ed;
  std::vector<const Peak*> strongest;
  if (run_empirical) {
    for (const auto& p : peaks.peaks) strongest.push_back(&p);
    std::stable_sort(strongest.begin(), strongest.end(),
                     [](const Peak* a, const Peak* b) { return a->intensity > b->intensity; });
    if (strongest.size() > max_peaks) strongest.resize(max_peaks);
    std::vector<Vec> freqs;
    for (const Peak* p : strongest) freqs.push_back(p->frequency);
    const auto mat = materialize(ms, seq.box(seq.max_n()));
    ed = empirical_diffraction(mat.comb, seq, freqs, taper);
    double gap_a = 0.0, gap_b = 0.0;
    const auto& last = ed.stages.back();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      gap_a = std::max(gap_a, std::abs(last.route_a[i] - strongest[i]->intensity));
      gap_b = std::max(gap_b, std::abs(last.route_b[i] - strongest[i]->intensity));
    }
    r.checks.push_back(le("route A intensity gap at the last stage", gap_a, emp_tol));
    r.report["route_b_gap"] = gap_b;
    r.report["route_gap"] = last.max_gap;
  }
  if (writing(o)) {
    write_peaks_csv(artifact(o, "peaks.csv"), peaks);
    if (run_empirical) {
      CsvWriter w(artifact(o, "empirical.csv"),
                  {"freq0", "half_width", "taper_radius", "route_a", "route_b", "analytic"});
      for (const auto& st : ed.stages)
        for (std::size_t i = 0; i < ed.frequencies.size(); ++i) {
          w << ed.frequencies[i][0] << st.half_width << st.taper_radius << st.route_a[i] << st.route_b[i]
            << strongest[i]->intensity;
          w.end_row();
        }
    }
  }
  finish(r, o);
  return r;
}

// ---------------------------------------------------------------------------
// wiener-diagram

CaseResult run_wiener_diagram(const json& c, const RunOptions& o) {
  const auto& cases = sub(c, "cases");
  if (!cases.is_array() || cases.empty()) throw ConfigError("'cases' must be a nonempty array");
  for (const auto& k : cases)
    if (!k.is_object()) throw ConfigError("every case must be an object");
  const auto seed = seed_of(c, o, 2024);

  CaseResult r{"wiener-diagram", {}, {}};
  json out = json::array();
  struct Row {
    std::string name;
    double half_width, autocorr_gap, peak_gap, off_peak, route_gap;
  };
  std::vector<Row> rows;
  for (const auto& k : cases) {
    const std::string name = get_string(k, "name", "case");
    const std::string type = get_string(k, "type", "model_set");
    if (type == "half_line") {
      // delta_N: Fourier-Bohr route against the autocorrelation route at chi = 0
      const auto seq = sequence_from_json(1, sub_or_empty(k, "sequence"), o.max_n);
      const double tol = get_double(k, "commutativity_tolerance", 0.05);
      const TaperRule taper = taper_from(sub_or_empty(k, "taper"));
      const double lmax = seq.half_widths().back();
      const auto omega = comb_source(json{{"type", "half_line"}}, Box::interval(-2.0 * lmax, 2.0 * lmax), seed, o);
      json st = json::array();
      CommutativityReport last;
      for (int n = 1; n <= seq.max_n(); ++n) {
        last = comb_commutativity(omega, seq.half_width(n), Vec::Zero(1), taper);
        st.push_back({{"half_width", last.half_width}, {"a0", last.amplitude.real()}, {"route_a", last.route_a},
                      {"route_b", last.route_b}, {"gamma_0", last.gamma_at_zero}, {"gap", last.gap}});
        rows.push_back({name, last.half_width, std::abs(last.gamma_at_zero - 0.5), last.route_a, 0.0, last.gap});
      }
      const auto uni = translate_uniformity_check(omega, Vec::Zero(1), VanHoveSequence(1, {lmax}),
                                                  {Vec::Constant(1, -0.5 * lmax)});
      r.checks.push_back(Check{name + ": diagram fails to commute (expected)", !last.commutes(tol), last.gap, tol,
                               "|a0|^2 = " + format_double(last.route_a) + ", tapered gamma^(0) = " +
                                   format_double(last.route_b)});
      r.checks.push_back(le(name + ": |a0|^2 - 1/4", std::abs(last.route_a - 0.25), 2.0 / lmax));
      r.checks.push_back(Check{name + ": translate deviation does not vanish (expected)", uni.max_deviation > tol,
                               uni.max_deviation, tol, "shift -L/2"});
      out.push_back({{"name", name}, {"type", type}, {"stages", st}, {"commutes", last.commutes(tol)},
                     {"translate_deviation", uni.max_deviation}});
      continue;
    }
    if (type != "model_set") throw ConfigError("unknown case type '" + type + "'");
    const auto ms = model_set_from(k, o);
    const int d = ms.scheme.physical_dim();
    WienerDiagramOptions opt;
    if (k.contains("freq_box")) opt.freq_box = box_from_json(k.at("freq_box"));
    if (opt.freq_box.dim() != d) throw ConfigError(name + ": freq_box has the wrong dimension");
    opt.peak_eps = get_double(k, "peak_eps", opt.peak_eps);
    opt.autocorr_cutoff = get_double(k, "autocorr_cutoff", opt.autocorr_cutoff);
    opt.autocorr_floor = get_double(k, "autocorr_floor", opt.autocorr_floor);
    opt.off_peak_count = static_cast<std::size_t>(get_int(k, "off_peak_count", 20));
    opt.seed = seed;
    opt.exclusion = exclusion_from(sub_or_empty(k, "exclusion"));
    opt.tail_eps = get_double(k, "tail_eps", opt.tail_eps);
    opt.taper = taper_from(sub_or_empty(k, "taper"));
    opt.allow_non_w0 = get_bool(k, "allow_non_w0", false);
    const json& tol = sub_or_empty(k, "tolerances");
    const std::string rule = get_string(k, "tolerance_rule", "fixed");
    if (rule != "fixed" && rule != "inverse_n") throw ConfigError("tolerance_rule must be 'fixed' or 'inverse_n'");
    std::vector<std::pair<int, double>> stages;
    if (k.contains("sequence")) {
      const auto seq = sequence_from_json(d, k.at("sequence"), o.max_n);
      for (int n = 1; n <= seq.max_n(); ++n) stages.emplace_back(n, seq.half_width(n));
    } else {
      stages.emplace_back(1, get_double(k, "half_width"));
    }
    json st = json::array();
    std::size_t fails = 0, route_fails = 0;
    WienerDiagramReport last;
    for (const auto& [n, l] : stages) {
      if (rule == "inverse_n") {
        opt.autocorr_tol = opt.peak_tol = opt.off_peak_tol = 1.0 / n;
      } else {
        opt.autocorr_tol = get_double(tol, "autocorr", 0.02);
        opt.peak_tol = get_double(tol, "peak", 0.02);
        opt.off_peak_tol = get_double(tol, "off_peak", 0.01);
      }
      last = wiener_diagram_report(ms, l, opt);
      if (!last.commutes()) ++fails;
      if (rule == "inverse_n" && last.route_gap > 1.0 / n) ++route_fails;
      st.push_back({{"n", n}, {"half_width", l}, {"points", last.points}, {"autocorr_gap", last.autocorr_gap},
                    {"autocorr_coefficients", last.autocorr_coefficients}, {"peak_gap", last.peak_gap},
                    {"amplitude_gap", last.amplitude_gap}, {"peaks", last.peaks}, {"off_peak_max", last.off_peak_max},
                    {"route_gap", last.route_gap}});
      rows.push_back({name, l, last.autocorr_gap, last.peak_gap, last.off_peak_max, last.route_gap});
    }
    if (rule == "inverse_n") {
      r.checks.push_back(le(name + ": stages with a corner gap above 1/n", static_cast<double>(fails), 0.0));
      r.checks.push_back(le(name + ": stages with |a|^2 vs tapered gamma^ above 1/n", static_cast<double>(route_fails), 0.0));
    } else {
      r.checks.push_back(le(name + ": autocorrelation gap", last.autocorr_gap, opt.autocorr_tol));
      r.checks.push_back(le(name + ": peak intensity gap", last.peak_gap, opt.peak_tol));
      r.checks.push_back(le(name + ": off-peak intensity", last.off_peak_max, opt.off_peak_tol));
    }
    r.checks.push_back(ge(name + ": peaks compared", static_cast<double>(last.peaks), 1.0));
    out.push_back({{"name", name}, {"type", type}, {"stages", st}, {"commutes", fails == 0}});
  }
  r.report["cases"] = out;
  if (writing(o)) {
    CsvWriter w(artifact(o, "wiener.csv"),
                {"case", "half_width", "autocorr_gap", "peak_gap", "off_peak_max", "route_gap"});
    for (const auto& row : rows) {
      w << row.name << row.half_width << row.autocorr_gap << row.peak_gap << row.off_peak << row.route_gap;
      w.end_row();
    }
  }
  finish(r, o);
  return r;
}

}  // namespace qcdiff
