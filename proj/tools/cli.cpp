#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "recipfm/catalog.hpp"
#include "recipfm/darboux.hpp"
#include "recipfm/error.hpp"
#include "recipfm/expr.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/reciprocal.hpp"
#include "recipfm/sampling.hpp"

namespace recipfm::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchema = "recip-fm/1";
constexpr double kParallelTol = 1e-10;
constexpr double kLawTol = 1e-12;
constexpr double kDarbouxTol = 1e-9;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string builtin;
  std::optional<std::size_t> dim;
  std::optional<double> eps;
  std::vector<std::string> velocities;
  std::optional<std::string> density;
  std::optional<std::string> catalog;
  std::vector<std::string> params;
  std::uint64_t seed = 42;
  std::size_t points = 20;
  std::optional<double> tol;
  std::string output;
  bool summary = false;
  std::string config;
  std::vector<std::string> suites;
  bool biflat = false;
  std::optional<std::string> base;
  std::optional<std::string> gen0;
  std::optional<std::string> gen1;
  std::optional<std::string> composite;
  std::vector<std::string> beta;
  std::vector<std::string> lame;
  std::optional<double> d;
};

// --- config file -------------------------------------------------------------

std::string scalar_token(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt::format("{}", v.get<double>());
  throw ConfigError(fmt::format("config key '{}' must be a string or number", key));
}

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config file '{}': {}", path, e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::vector<std::string> flags{"summary", "biflat"};
  static const std::vector<std::string> known{"builtin", "dim",  "eps",       "velocity", "density", "catalog",
                                              "param",   "seed", "points",    "tol",      "output",  "summary",
                                              "suite",   "biflat", "base",    "gen0",     "gen1",    "composite",
                                              "beta",    "lame", "d"};
  std::vector<std::string> out;
  for (const auto& [key, v] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    const std::string flag = "--" + key;
    if (std::find(flags.begin(), flags.end(), key) != flags.end()) {
      if (!v.is_boolean()) throw ConfigError(fmt::format("config key '{}' must be a boolean", key));
      if (v.get<bool>()) out.push_back(flag);
    } else if (key == "param" && v.is_object()) {
      for (const auto& [name, value] : v.items()) {
        out.push_back(flag);
        out.push_back(name + "=" + scalar_token(value, key));
      }
    } else if (v.is_array()) {
      for (const auto& item : v) {
        out.push_back(flag);
        out.push_back(scalar_token(item, key));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar_token(v, key));
    }
  }
  return out;
}

// --- inputs ------------------------------------------------------------------

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("--param '{}' is not name=value", s));
    const std::string name = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(x))
      throw ConfigError(fmt::format("--param '{}': value is not a finite number", s));
    out[name] = x;
  }
  return out;
}

ScalarField parse_dsl(const std::string& what, const std::string& src, std::size_t dim, const ParamMap& params) {
  try {
    return compile_field(parse_field(src, dim, params)).with_label(src);
  } catch (const ParseError& e) {
    throw ConfigError(fmt::format("{}: parse error at offset {} in \"{}\": {}", what, e.offset(), src, e.what()));
  }
}

std::vector<double> parse_coords(const std::string& s, std::size_t dim) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || !std::isfinite(x)) throw ConfigError(fmt::format("--base '{}' is not a coordinate list", s));
    out.push_back(x);
  }
  if (out.size() != dim) throw ConfigError(fmt::format("--base has {} coordinates, dimension is {}", out.size(), dim));
  return out;
}

struct Inputs {
  std::optional<DiagonalSystem> system;
  std::optional<ScalarField> density;
  const CatalogEntry* entry = nullptr;
  std::size_t dim = 0;
  ParamMap params;
  json description = json::object();
};

Inputs resolve(const RunConfig& cfg, bool need_system, bool need_density) {
  Inputs in;
  in.params = parse_params(cfg.params);
  if (cfg.catalog) {
    try {
      in.entry = &catalog_entry(*cfg.catalog);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (cfg.density && in.entry) throw ConfigError("give either --density or --catalog, not both");
  if (!cfg.builtin.empty() && !cfg.velocities.empty()) throw ConfigError("give either --builtin or --velocity, not both");

  if (cfg.dim) {
    if (*cfg.dim < 2 || *cfg.dim > kMaxDim) throw ConfigError(fmt::format("--dim must lie in [2, {}]", kMaxDim));
    in.dim = *cfg.dim;
  } else if (!cfg.velocities.empty()) {
    in.dim = cfg.velocities.size();
  } else if (in.entry) {
    in.dim = in.entry->dim;
  }

  if (!cfg.builtin.empty()) {
    if (cfg.builtin != "eps-system") throw ConfigError(fmt::format("unknown builtin '{}'", cfg.builtin));
    if (!cfg.dim) throw ConfigError("--builtin eps-system needs --dim");
    if (!cfg.eps) throw ConfigError("--builtin eps-system needs --eps");
    in.system = epsilon_system(in.dim, *cfg.eps);
    in.description["system"] = {{"builtin", cfg.builtin}, {"dim", in.dim}, {"eps", *cfg.eps}};
  } else if (!cfg.velocities.empty()) {
    if (cfg.velocities.size() != in.dim)
      throw ConfigError(fmt::format("{} velocities given for dimension {}", cfg.velocities.size(), in.dim));
    std::vector<ScalarField> v;
    for (std::size_t i = 0; i < cfg.velocities.size(); ++i)
      v.push_back(parse_dsl(fmt::format("velocity {}", i + 1), cfg.velocities[i], in.dim, in.params));
    in.system = DiagonalSystem(std::move(v), "dsl");
    in.description["system"] = {{"velocities", cfg.velocities}, {"dim", in.dim}};
  } else if (in.entry && need_system) {
    in.system = in.entry->system();
    in.description["system"] = {{"builtin", "eps-system"}, {"dim", in.entry->dim}, {"eps", in.entry->eps}};
  }
  if (need_system && !in.system) throw ConfigError("no system given (use --builtin eps-system or --velocity)");

  if (in.entry) {
    if (in.dim != in.entry->dim)
      throw ConfigError(fmt::format("catalog entry '{}' has dimension {}, not {}", in.entry->id, in.entry->dim, in.dim));
    if (cfg.builtin == "eps-system" && cfg.eps && *cfg.eps != in.entry->eps)
      throw ConfigError(fmt::format("catalog entry '{}' belongs to eps = {}", in.entry->id, in.entry->eps));
    in.density = in.entry->A();
    json d{{"catalog", in.entry->id}, {"family", in.entry->family}, {"expr", in.entry->density_src}};
    d["h"] = in.entry->h;
    if (in.entry->k) d["k"] = *in.entry->k;
    in.description["density"] = d;
  } else if (cfg.density) {
    if (in.dim == 0) throw ConfigError("--density needs a dimension (--dim)");
    in.density = parse_dsl("density", *cfg.density, in.dim, in.params);
    in.description["density"] = {{"expr", *cfg.density}};
  }
  if (need_density && !in.density) throw ConfigError("no density given (use --density or --catalog)");
  if (!in.params.empty()) {
    json p = json::object();
    for (const auto& [k, v] : in.params) p[k] = v;
    in.description["params"] = p;
  }
  return in;
}

PointSampler make_sampler(const RunConfig& cfg, const Inputs& in) {
  PointSampler s(in.dim, cfg.seed);
  if (in.system) {
    const DiagonalSystem sys = *in.system;
    s.require([sys](const Point& p) {
      std::vector<double> v;
      for (std::size_t i = 0; i < sys.dim(); ++i) {
        v.push_back(sys.velocity(i).value(p));
        if (!std::isfinite(v.back())) return false;
      }
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
          if (std::abs(v[i] - v[j]) <= 1e-6 * std::max({1.0, std::abs(v[i]), std::abs(v[j])})) return false;
      return true;
    });
  }
  if (in.density) s.require_nonzero(*in.density);
  if (in.entry) {
    const CatalogEntry* e = in.entry;
    s.require([e](const Point& p) { return e->in_domain(p); });
  }
  return s;
}

std::vector<Point> draw(PointSampler& s, std::size_t count) {
  if (count == 0) throw ConfigError("--points must be positive");
  return s.draw(count);
}

// --- report ------------------------------------------------------------------

json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json point_json(const Point& p) {
  json a = json::array();
  for (double x : p.coords()) a.push_back(x);
  return a;
}

struct Report {
  json checks = json::array();
  bool pass = true;

  json& add(const std::string& name, const ResidualReport& r, bool counts = true) {
    json c{{"name", name}, {"max_abs", number(r.max_abs)}, {"tolerance", r.tolerance}, {"pass", r.pass},
           {"entries", r.entries.size()}};
    const ResidualEntry* worst = nullptr;
    for (const auto& e : r.entries) {
      const double a = std::isfinite(e.residual) ? std::abs(e.residual) : INFINITY;
      if (!worst || a > (std::isfinite(worst->residual) ? std::abs(worst->residual) : INFINITY)) worst = &e;
    }
    if (worst) c["worst"] = {{"point", worst->point}, {"indices", worst->indices}, {"residual", number(worst->residual)}};
    if (!counts) c["informational"] = true;
    if (counts) pass = pass && r.pass;
    checks.push_back(std::move(c));
    return checks.back();
  }

  json& add(const std::string& name, const GradingResult& g, bool counts = true) {
    json& c = add(name, g.report, counts);
    c["estimate"] = number(g.estimate);
    return c;
  }
};

double tol_or(const RunConfig& cfg, double fallback) { return cfg.tol.value_or(fallback); }

ResidualReport table_difference(const std::string& label, const ConnectionTable& a, const ConnectionTable& b,
                                std::span<const Point> pts, double tol) {
  ResidualReport r(label, pts, tol);
  const std::size_t n = a.dim();
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    const ChristoffelTable ta = a.at(pts[pi], 1), tb = b.at(pts[pi], 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const auto ca = ta(i, j, k).coeffs(), cb = tb(i, j, k).coeffs();
          double worst = 0.0;
          for (std::size_t m = 0; m < ca.size(); ++m)
            worst = std::max(worst, std::abs(ca[m] - cb[m]) / (1.0 + std::abs(ca[m])));
          r.add(pi, {i, j, k}, worst);
        }
  }
  r.finalize();
  return r;
}

json christoffel_json(const OffDiagonal& g) {
  json a = json::array();
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j)
      if (i != j) a.push_back({{"i", i + 1}, {"j", j + 1}, {"value", number(g(i, j).value())}});
  return a;
}

// --- commands ------------------------------------------------------------------

struct Outcome {
  json body = json::object();
  Report report;
  std::vector<Point> points;
};

std::optional<RotationFrame> parse_frame(const RunConfig& cfg, std::size_t dim, const ParamMap& params) {
  if (cfg.beta.empty() && cfg.lame.empty() && !cfg.d) return std::nullopt;
  if (dim == 0) throw ConfigError("a frame needs --dim");
  auto index = [&](const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 1 || static_cast<std::size_t>(v) > dim)
      throw ConfigError(fmt::format("{}: bad index '{}'", what, s));
    return static_cast<std::size_t>(v - 1);
  };
  std::vector<ScalarField> beta(dim * dim), H(dim);
  for (const auto& b : cfg.beta) {
    const auto colon = b.find(':');
    const auto comma = b.find(',');
    if (colon == std::string::npos || comma == std::string::npos || comma > colon)
      throw ConfigError(fmt::format("--beta '{}' is not i,j:expr", b));
    const std::size_t i = index(b.substr(0, comma), "--beta");
    const std::size_t j = index(b.substr(comma + 1, colon - comma - 1), "--beta");
    if (i == j) throw ConfigError(fmt::format("--beta '{}' is diagonal", b));
    beta[i * dim + j] = parse_dsl(fmt::format("beta{}{}", i + 1, j + 1), b.substr(colon + 1), dim, params);
  }
  for (const auto& l : cfg.lame) {
    const auto colon = l.find(':');
    if (colon == std::string::npos) throw ConfigError(fmt::format("--lame '{}' is not i:expr", l));
    const std::size_t i = index(l.substr(0, colon), "--lame");
    H[i] = parse_dsl(fmt::format("H{}", i + 1), l.substr(colon + 1), dim, params);
  }
  if (!cfg.d) throw ConfigError("a frame needs --d");
  try {
    return RotationFrame(dim, std::move(beta), std::move(H), *cfg.d);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

void require_frame_fields(PointSampler& s, const RotationFrame& f) {
  s.require([f](const Point& p) {
    for (std::size_t i = 0; i < f.dim(); ++i) {
      if (!std::isfinite(f.H(i).value(p))) return false;
      for (std::size_t j = 0; j < f.dim(); ++j)
        if (i != j && !std::isfinite(f.beta(i, j).value(p))) return false;
    }
    return true;
  });
}

Outcome cmd_check(const RunConfig& cfg) {
  Inputs in = resolve(cfg, false, false);
  const std::optional<RotationFrame> frame = parse_frame(cfg, in.dim, in.params);
  std::vector<std::string> suites = cfg.suites;
  if (suites.empty()) {
    if (in.system) {
      suites = {"flatness", "sh"};
      if (in.density) suites.insert(suites.end(), {"density", "grading-e"});
    }
    if (frame) suites.push_back("darboux");
  }
  if (suites.empty()) throw ConfigError("nothing to check (give a system, a frame or --suite)");
  static const std::vector<std::string> known{"flatness", "dual", "sh", "density", "a-system", "grading-e", "grading-E",
                                              "darboux"};
  for (const auto& s : suites) {
    if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError(fmt::format("unknown suite '{}'", s));
    const bool needs_system = s == "flatness" || s == "dual" || s == "sh" || s == "density" || s == "a-system";
    const bool needs_density = s == "density" || s == "a-system" || s == "grading-e" || s == "grading-E";
    if (needs_system && !in.system) throw ConfigError(fmt::format("suite '{}' needs a system", s));
    if (needs_density && !in.density) throw ConfigError(fmt::format("suite '{}' needs a density", s));
    if (s == "darboux" && !frame) throw ConfigError("suite 'darboux' needs a frame (--beta, --lame, --d)");
  }
  if (in.dim == 0) throw ConfigError("no dimension given");

  PointSampler sampler = make_sampler(cfg, in);
  if (frame) require_frame_fields(sampler, *frame);
  Outcome o;
  o.points = draw(sampler, cfg.points);
  const auto& pts = o.points;
  for (const auto& s : suites) {
    if (s == "flatness") {
      const ConnectionTable c = natural_connection(*in.system);
      o.report.add("flatness/curvature", curvature_natural_residual(c, pts, tol_or(cfg, kSecondOrderTol)));
      o.report.add("flatness/parallel-e", identity_parallel_residual(c, UnitField::e, pts, tol_or(cfg, kParallelTol)));
    } else if (s == "dual") {
      const ConnectionTable c = dual_connection(*in.system);
      o.report.add("dual/curvature", curvature_full_residual(c, pts, tol_or(cfg, kSecondOrderTol)));
      o.report.add("dual/parallel-E", identity_parallel_residual(c, UnitField::E, pts, tol_or(cfg, kParallelTol)));
    } else if (s == "sh") {
      o.report.add("sh", sh_residual(*in.system, pts, tol_or(cfg, kSecondOrderTol)));
    } else if (s == "density") {
      o.report.add("density", density_residual(*in.system, *in.density, pts, tol_or(cfg, kSecondOrderTol)));
    } else if (s == "a-system") {
      o.report.add("a-system", a_system_residual(*in.system, *in.density, pts, tol_or(cfg, kSecondOrderTol)));
      o.report.add("a-system/theta", theta_residual(*in.system, *in.density, pts, tol_or(cfg, kSecondOrderTol)));
    } else if (s == "grading-e") {
      o.report.add("grading-e", grading_residual(*in.density, UnitField::e, pts, tol_or(cfg, kSecondOrderTol)));
    } else if (s == "grading-E") {
      o.report.add("grading-E", grading_residual(*in.density, UnitField::E, pts, tol_or(cfg, kSecondOrderTol)));
    } else if (s == "darboux") {
      o.report.add("darboux", darboux_residual(*frame, pts, tol_or(cfg, kDarbouxTol)));
    }
  }
  o.body["inputs"] = in.description;
  o.body["inputs"]["suites"] = suites;
  return o;
}

Outcome cmd_transform(const RunConfig& cfg) {
  Inputs in = resolve(cfg, true, true);
  const DiagonalSystem& sys = *in.system;
  const ScalarField A = *in.density;
  PointSampler sampler = make_sampler(cfg, in);
  const Point base = cfg.base ? Point(parse_coords(*cfg.base, in.dim)) : sampler.next();
  sampler.require([sys, A, base](const Point& p) { return current_path_admissible(sys, A, base, p); });
  Outcome o;
  o.points = draw(sampler, cfg.points);
  const auto& pts = o.points;
  const double tol = tol_or(cfg, kSecondOrderTol);

  const ResidualReport dens = density_residual(sys, A, pts, tol);
  o.report.add("density", dens);
  const GradingResult ge = grading_residual(A, UnitField::e, pts, tol);
  const GradingResult gE = grading_residual(A, UnitField::E, pts, tol);
  o.report.add("grading-e", ge);
  o.report.add("grading-E", gE, cfg.biflat);
  o.body["generator"] = {{"h", number(ge.estimate)},
                         {"h_constant", ge.report.pass},
                         {"k", number(gE.estimate)},
                         {"k_constant", gE.report.pass}};

  const ConnectionTable nat = transformed_natural(sys, A);
  o.report.add("curvature", curvature_natural_residual(nat, pts, tol));
  o.report.add("curvature/oracle", curvature_full_residual(nat, pts, tol));
  o.report.add("parallel-e", identity_parallel_residual(nat, UnitField::e, pts, tol_or(cfg, kParallelTol)));
  o.report.add("intrinsic/natural",
               table_difference("intrinsic/natural", nat,
                                intrinsic_transform(natural_connection(sys), Product::circ, A, ConnectionKind::custom),
                                pts, kLawTol));

  const Point& probe = pts.front();
  json probe_json{{"point", point_json(probe)}, {"christoffel", christoffel_json(transformed_offdiagonal(offdiagonal_of(sys), A)(probe, 0))}};
  if (dens.pass) {
    const TransformResult r = transform(sys, {A, std::nullopt, std::nullopt, Provenance::user, A.label()}, base,
                                        cfg.biflat, pts, tol);
    o.report.add("christoffel-law", christoffel_law_residual(r, sys, pts, kLawTol));
    json v = json::array();
    for (std::size_t i = 0; i < in.dim; ++i) v.push_back(number(r.system.velocity(i).value(probe)));
    probe_json["velocities"] = v;
    probe_json["current"] = number(r.current.value(probe));
  }
  o.body["base"] = point_json(base);
  o.body["probe"] = probe_json;

  if (cfg.biflat) {
    const BiflatVerdict b = biflat_admissibility(sys, A, pts, tol);
    o.body["biflat"] = {{"pass", b.pass}, {"h", number(b.h)}, {"k", number(b.k)}};
    o.report.pass = o.report.pass && b.pass;
    const ConnectionTable dua = transformed_dual(sys, A);
    o.report.add("dual/curvature", curvature_full_residual(dua, pts, tol));
    o.report.add("dual/parallel-E", identity_parallel_residual(dua, UnitField::E, pts, tol_or(cfg, kParallelTol)));
    o.report.add("intrinsic/dual",
                 table_difference("intrinsic/dual", dua,
                                  intrinsic_transform(dual_connection(sys), Product::star, A, ConnectionKind::custom),
                                  pts, kLawTol));
  }
  o.body["inputs"] = in.description;
  o.body["inputs"]["biflat"] = cfg.biflat;
  return o;
}

Outcome cmd_orbit(const RunConfig& cfg) {
  Inputs in = resolve(cfg, true, false);
  if (!cfg.gen0) throw ConfigError("orbit needs --gen0");
  if (cfg.gen1.has_value() == cfg.composite.has_value()) throw ConfigError("orbit needs exactly one of --gen1, --composite");
  const DiagonalSystem& sys = *in.system;
  const ScalarField A0 = parse_dsl("gen0", *cfg.gen0, in.dim, in.params);
  ScalarField A1;
  ScalarField Ac;
  if (cfg.gen1) {
    A1 = parse_dsl("gen1", *cfg.gen1, in.dim, in.params);
    Ac = A0 * A1;
  } else {
    Ac = parse_dsl("composite", *cfg.composite, in.dim, in.params);
    A1 = (Ac / A0).with_label(fmt::format("({})/({})", *cfg.composite, *cfg.gen0));
  }
  PointSampler sampler = make_sampler(cfg, in);
  sampler.require_nonzero(A0);
  sampler.require_nonzero(A1);
  const Point base = cfg.base ? Point(parse_coords(*cfg.base, in.dim)) : sampler.next();
  sampler.require([sys, A0, Ac, base](const Point& p) {
    return current_path_admissible(sys, A0, base, p) && current_path_admissible(sys, Ac, base, p);
  });
  Outcome o;
  o.points = draw(sampler, cfg.points);
  const OrbitResult r = orbit_compose(sys, {A0, std::nullopt, std::nullopt, Provenance::user, *cfg.gen0},
                                      {A1, std::nullopt, std::nullopt, Provenance::user, A1.label()}, base, o.points,
                                      tol_or(cfg, 1e-10), kSecondOrderTol);
  o.report.add("christoffel", r.christoffel);
  o.report.add("grading", r.grading);
  o.report.pass = o.report.pass && r.pass;
  o.body["base"] = point_json(base);
  o.body["gradings"] = {{"h0", number(r.h0)}, {"h1", number(r.h1)}, {"h_composite", number(r.h_composite)}};
  o.body["inputs"] = in.description;
  o.body["inputs"]["gen0"] = *cfg.gen0;
  if (cfg.gen1) o.body["inputs"]["gen1"] = *cfg.gen1;
  if (cfg.composite) o.body["inputs"]["composite"] = *cfg.composite;
  return o;
}

Outcome cmd_darboux(const RunConfig& cfg) {
  Inputs in = resolve(cfg, false, true);
  const std::optional<RotationFrame> frame = parse_frame(cfg, in.dim, in.params);
  if (!frame) throw ConfigError("darboux needs a frame (--beta, --lame, --d)");
  PointSampler sampler = make_sampler(cfg, in);
  require_frame_fields(sampler, *frame);
  Outcome o;
  o.points = draw(sampler, cfg.points);
  const auto& pts = o.points;
  const double tol = tol_or(cfg, kDarbouxTol);
  o.report.add("before", darboux_residual(*frame, pts, tol));
  const ScalarField A = *in.density;
  const RotationFrame g = darboux_transform(*frame, {A, std::nullopt, std::nullopt, Provenance::user, A.label()}, pts,
                                            tol_or(cfg, kSecondOrderTol));
  o.report.add("after", darboux_residual(g, pts, tol));
  ResidualReport law("christoffel-law", pts, tol_or(cfg, 1e-10));
  const OffDiagonalFn want = transformed_offdiagonal(frame->offdiagonal(), A);
  const OffDiagonalFn got = g.offdiagonal();
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    const OffDiagonal a = want(pts[pi], 0), b = got(pts[pi], 0);
    for (std::size_t i = 0; i < in.dim; ++i)
      for (std::size_t j = 0; j < in.dim; ++j)
        if (i != j) law.add(pi, {i, j}, a(i, j).value() - b(i, j).value());
  }
  law.finalize();
  o.report.add("christoffel-law", law);
  o.body["d"] = frame->d();
  o.body["k"] = number(g.d() - frame->d());
  o.body["d_transformed"] = number(g.d());
  o.body["inputs"] = in.description;
  o.body["inputs"]["frame"] = {{"beta", cfg.beta}, {"lame", cfg.lame}, {"d", frame->d()}};
  return o;
}

// --- driver --------------------------------------------------------------------

void add_common(CLI::App* app, RunConfig& cfg) {
  auto last = [](CLI::Option* o) { o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
  last(app->add_option("--builtin", cfg.builtin, "built-in system (eps-system)"));
  last(app->add_option("--dim", cfg.dim, "dimension n"));
  last(app->add_option("--eps", cfg.eps, "epsilon of the eps-system"));
  app->add_option("--velocity", cfg.velocities, "characteristic velocity (repeat per component)");
  last(app->add_option("--density", cfg.density, "density A as an expression"));
  last(app->add_option("--catalog", cfg.catalog, "catalog density id"));
  app->add_option("--param", cfg.params, "expression parameter name=value");
  last(app->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str());
  last(app->add_option("--points", cfg.points, "number of sample points")->capture_default_str());
  last(app->add_option("--tol", cfg.tol, "override every tolerance"));
  last(app->add_option("--output", cfg.output, "write the JSON report here"));
  app->add_flag("--summary", cfg.summary, "print a one-line summary");
  app->add_option("--config", cfg.config, "JSON file of option values");
}

std::string summary_line(const std::string& command, const Report& r) {
  std::size_t passed = 0, counted = 0;
  std::string worst;
  for (const auto& c : r.checks) {
    if (c.contains("informational")) continue;
    ++counted;
    if (c["pass"].get<bool>()) {
      ++passed;
    } else if (worst.empty()) {
      worst = c["name"].get<std::string>();
    }
  }
  std::string line = fmt::format("{}: {} ({}/{} checks passed", command, r.pass ? "PASS" : "FAIL", passed, counted);
  if (!worst.empty()) line += ", first failure " + worst;
  return line + ")";
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Numerical checks for reciprocal transformations of diagonal systems", "recipfm"};
  app.require_subcommand(1);
  CLI::App* check = app.add_subcommand("check", "run residual suites on a system, density or frame");
  CLI::App* trans = app.add_subcommand("transform", "apply the reciprocal transformation generated by a density");
  CLI::App* orbit = app.add_subcommand("orbit", "compare two successive transformations with their composite");
  CLI::App* darb = app.add_subcommand("darboux", "transform a rotation frame and re-check it");
  for (CLI::App* a : {check, trans, orbit, darb}) add_common(a, cfg);
  check->add_option("--suite", cfg.suites, "flatness, dual, sh, density, a-system, grading-e, grading-E, darboux");
  trans->add_flag("--biflat", cfg.biflat, "add dual-connection and bi-flat checks");
  for (CLI::App* a : {trans, orbit}) a->add_option("--base", cfg.base, "base point u1,...,un (default: first sample)");
  orbit->add_option("--gen0", cfg.gen0, "first generator");
  orbit->add_option("--gen1", cfg.gen1, "second generator, a density of the transformed system");
  orbit->add_option("--composite", cfg.composite, "composite generator gen0*gen1");
  for (CLI::App* a : {check, darb}) {
    a->add_option("--beta", cfg.beta, "rotation coefficient i,j:expr");
    a->add_option("--lame", cfg.lame, "Lame coefficient i:expr");
    a->add_option("--d", cfg.d, "degree d of the Lame coefficients");
  }

  try {
    std::vector<std::string> args(raw.begin() + (raw.empty() ? 0 : 1), raw.end());
    // config file values go in front of the command-line options
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      std::size_t span = 0;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        span = 2;
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        span = 1;
      }
      if (span == 0) continue;
      std::vector<std::string> tokens = config_tokens(path);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
      const auto sub = std::find_if(args.begin(), args.end(),
                                    [](const std::string& s) { return !s.empty() && s[0] != '-'; });
      args.insert(sub == args.end() ? args.end() : sub + 1, tokens.begin(), tokens.end());
      cfg.config = path;
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  for (CLI::App* a : {check, trans, orbit, darb})
    if (a->parsed()) cfg.command = a->get_name();

  Outcome o;
  try {
    if (cfg.command == "check") o = cmd_check(cfg);
    else if (cfg.command == "transform") o = cmd_transform(cfg);
    else if (cfg.command == "orbit") o = cmd_orbit(cfg);
    else o = cmd_darboux(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: parse error at offset " << e.offset() << ": " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "error: precondition failed: " << e.what() << "\n";
    return 2;
  } catch (const ExhaustedError& e) {
    err << "error: sampling exhausted: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  json doc;
  doc["schema"] = kSchema;
  doc["command"] = cfg.command;
  doc["seed"] = cfg.seed;
  doc["inputs"] = o.body["inputs"];
  json pts = json::array();
  for (const auto& p : o.points) pts.push_back(point_json(p));
  doc["points"] = pts;
  for (const auto& [k, v] : o.body.items())
    if (k != "inputs") doc[k] = v;
  doc["checks"] = o.report.checks;
  doc["pass"] = o.report.pass;
  const std::string text = doc.dump(2) + "\n";

  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f || !(f << text)) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return 2;
    }
  }
  if (cfg.summary) out << summary_line(cfg.command, o.report) << "\n";
  return o.report.pass ? 0 : 1;
}

}  // namespace recipfm::cli
