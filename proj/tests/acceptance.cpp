#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli.hpp"
#include "recipfm/catalog.hpp"
#include "recipfm/darboux.hpp"
#include "recipfm/error.hpp"
#include "recipfm/expr.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/reciprocal.hpp"
#include "support.hpp"

using namespace recipfm;
using namespace recipfm::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// running maximum of a measured quantity against its bound
struct Worst {
  double value = 0.0;
  std::string where;
  bool ok = true;

  void at_most(double x, double bound, const std::string& label) {
    const double a = std::isfinite(x) ? std::abs(x) : INFINITY;
    if (!(a <= bound)) {
      if (ok) where = label;
      ok = false;
    }
    if (a > value || !std::isfinite(a)) {
      value = a;
      if (ok) where = label;
    }
  }
  void require(bool cond, const std::string& label) {
    if (!cond && ok) {
      ok = false;
      where = label;
    }
  }
  Verdict verdict(double tol) const {
    return {ok, fmt::format("worst {:.3e} (tol {:.0e}){}", value, tol, where.empty() ? "" : " at " + where)};
  }
};

ConservationDensity gen(const ScalarField& A, const std::string& label) {
  return {A, std::nullopt, std::nullopt, Provenance::user, label};
}

std::vector<Point> entry_points(const CatalogEntry& e, std::uint64_t seed, std::size_t count) {
  return sample_points(e.dim, seed, count, {e.A()}, [&](const Point& p) { return e.in_domain(p); });
}

Verdict c1() {
  Worst w;
  for (std::size_t n : {2u, 3u, 4u})
    for (double eps : {1.0, -1.0, 0.5}) {
      const auto pts = sample_points(n, 42, 50);
      const ConnectionTable c = natural_connection(epsilon_system(n, eps));
      w.at_most(curvature_natural_residual(c, pts, 1e-9).max_abs, 1e-9, fmt::format("n={} eps={}", n, eps));
    }
  return w.verdict(1e-9);
}

Verdict c2() {
  Worst w;
  for (std::size_t n : {2u, 3u, 4u})
    for (double eps : {1.0, -1.0, 0.5}) {
      const auto pts = sample_points(n, 42, 50);
      const ConnectionTable c = dual_connection(epsilon_system(n, eps));
      const std::string at = fmt::format("n={} eps={}", n, eps);
      w.at_most(curvature_full_residual(c, pts, 1e-9).max_abs, 1e-9, at + " curvature");
      w.at_most(identity_parallel_residual(c, UnitField::E, pts, 1e-9).max_abs, 1e-9, at + " nabla E");
    }
  return w.verdict(1e-9);
}

Verdict c3() {
  Worst w;
  for (const auto& e : catalog_entries()) {
    const auto pts = entry_points(e, 42, 20);
    w.at_most(curvature_natural_residual(transformed_natural(e.system(), e.A()), pts).max_abs, 1e-8, e.id);
  }
  Verdict v = w.verdict(1e-8);
  v.detail = fmt::format("{} densities, {}", catalog_entries().size(), v.detail);
  return v;
}

Verdict c4() {
  const DiagonalSystem sys = epsilon_system(2, 1.0);
  Verdict v;
  for (const char* s : {"u1*u2", "exp(u1*u2)"}) {
    const ScalarField A = make_field(s, 2);
    const auto pts = sample_points(2, 42, 20, {A});
    const GradingResult g = grading_residual(A, UnitField::e, pts);
    const double curv = curvature_full_residual(transformed_natural(sys, A), pts, 1e-3).max_abs;
    const bool ok = !g.report.pass && curv > 1e-3;
    v.pass = v.pass && ok;
    v.detail += fmt::format("{}{}: e-grading spread {:.3e}, max curvature {:.3e}", v.detail.empty() ? "" : "; ", s,
                            g.report.max_abs, curv);
  }
  return v;
}

double current_mismatch(const DiagonalSystem& sys, const ScalarField& A, const ScalarField& B, const Point& base,
                        PointSampler::Filter extra) {
  const auto pts = sample_points(sys.dim(), 42, 20, {A}, [&](const Point& p) {
    return (!extra || extra(p)) && current_path_admissible(sys, A, base, p);
  });
  const double c = B.value(base);
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, std::abs(current_value(sys, A, base, p) - B.value(p) + c));
  return worst;
}

Verdict c5() {
  Worst w;
  std::size_t n = 0, ok = 0;
  std::string failing;
  for (const auto& e : catalog_entries()) {
    if (!e.current_src) continue;
    const Point base = e.dim == 2 ? Point{1.5, 0.75} : Point{0.6, 1.6, 1.1};
    const double m =
        current_mismatch(e.system(), e.A(), *e.B(), base, [&](const Point& p) { return e.in_domain(p); });
    w.at_most(m, 1e-7, e.id);
    ++n;
    if (m <= 1e-7) ++ok;
    else failing += fmt::format(" {}={:.3e}", e.id, m);
  }
  Verdict v = w.verdict(1e-7);
  v.detail = fmt::format("{}/{} currents within tolerance, {}{}", ok, n, v.detail,
                         failing.empty() ? "" : "; off:" + failing);
  return v;
}

Verdict c6() {
  Worst w;
  for (const auto& e : catalog_entries()) {
    const auto pts = entry_points(e, 42, 20);
    const ResidualReport a = a_system_residual(e.system(), e.A(), pts);
    const ResidualReport t = theta_residual(e.system(), e.A(), pts);
    w.at_most(a.max_abs, 1e-8, e.id);
    w.require(a.pass == t.pass, e.id + " theta verdict");
  }
  return w.verdict(1e-8);
}

Verdict c7() {
  const CatalogEntry& e = catalog_entry("dim3-eps1-flatcoord");
  const ScalarField A = e.A();
  const ScalarField R = compile_field(*e.reduced());
  Worst w;
  for (const auto& p : entry_points(e, 42, 20)) {
    const Jet a = A(p, 1);
    w.at_most(a.value() - R.value(p), 1e-10, "reduction");
    double ea = 0.0, Ea = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
      ea += a.d(l);
      Ea += p[l] * a.d(l);
    }
    w.at_most(ea, 1e-9, "e(A1)");
    w.at_most(Ea + 2.0 * a.value(), 1e-9, "E(A1)+2A1");
  }
  return w.verdict(1e-10);
}

Verdict c8() {
  Worst w;
  std::size_t rejected = 0, accepted = 0;
  for (const auto& e : catalog_entries()) {
    const auto pts = entry_points(e, 42, 20);
    const BiflatVerdict b = biflat_admissibility(e.system(), e.A(), pts);
    if (e.h != 0.0) {
      w.require(!b.pass, e.id + " accepted");
      rejected += b.pass ? 0 : 1;
    }
    if (e.hypergeometric) {
      w.require(b.pass, e.id + " rejected");
      accepted += b.pass ? 1 : 0;
      if (e.eps == 1.0) w.at_most(b.k - (1.0 - 3.0 * e.eps), 1e-8, e.id + " k");
    }
  }
  Verdict v = w.verdict(1e-8);
  v.detail = fmt::format("{} h!=0 rejected, {} flat coordinates accepted, k {}", rejected, accepted, v.detail);
  return v;
}

Verdict c9() {
  struct Pair {
    double eps;
    std::string gen0;
    std::string composite;
    double h0, hc;
    Point base;
  };
  const std::vector<Pair> pairs{
      {1.0, "1/(u2-u1)", "exp(u1)/(u2-u1)", 0.0, 1.0, Point{2.0, 1.0}},
      {1.0, "exp(u1)/(u2-u1)", "exp(4*u1)/(u2-u1)", 1.0, 4.0, Point{2.0, 1.0}},
      {-1.0, "(u2-u1)^3", "exp(u1)*(u2-u1+2)", 0.0, 1.0, Point{1.5, 0.75}},
  };
  Worst w;
  Worst grading;
  std::uint64_t seed = 1;
  for (const auto& q : pairs) {
    const DiagonalSystem sys = epsilon_system(2, q.eps);
    const ScalarField A0 = make_field(q.gen0, 2), Ac = make_field(q.composite, 2);
    const ScalarField A1 = Ac / A0;
    const auto pts = sample_points(2, seed++, 10, {A0, A1}, [&](const Point& p) {
      return current_path_admissible(sys, A0, q.base, p) && current_path_admissible(sys, Ac, q.base, p);
    });
    const OrbitResult r = orbit_compose(sys, gen(A0, q.gen0), gen(A1, "composite/gen0"), q.base, pts);
    w.at_most(r.christoffel.max_abs, 1e-10, q.composite);
    w.require(r.pass, q.composite + " orbit");
    grading.at_most(r.h1 - (q.hc - q.h0), 1e-8, q.composite + " k-h");
    grading.at_most(r.h0 - q.h0, 1e-8, q.gen0 + " h0");
  }
  Verdict v = w.verdict(1e-10);
  v.pass = v.pass && grading.ok;
  v.detail += fmt::format("; grading {}", grading.verdict(1e-8).detail);
  return v;
}

Verdict c10() {
  const RotationFrame f = epsilon_frame(1.0);
  const auto pts = sample_points(2, 42, 20, {}, [](const Point& p) { return p[0] > p[1]; });
  const ScalarField A = make_field("1/(u2-u1)", 2);
  Worst w;
  w.at_most(darboux_residual(f, pts, 1e-10).max_abs, 1e-10, "frame");
  const RotationFrame g = darboux_transform(f, gen(A, "1/(u2-u1)"), pts);
  w.at_most(g.d() - (f.d() - 1.0), 1e-10, "d");
  w.at_most(darboux_residual(g, pts, 1e-10).max_abs, 1e-10, "image");
  const OffDiagonalFn want = transformed_offdiagonal(f.offdiagonal(), A), got = g.offdiagonal();
  for (const auto& p : pts) {
    const OffDiagonal a = want(p, 0), b = got(p, 0);
    w.at_most(a(0, 1).value() - b(0, 1).value(), 1e-10, "christoffel-law");
    w.at_most(a(1, 0).value() - b(1, 0).value(), 1e-10, "christoffel-law");
  }
  return w.verdict(1e-10);
}

Verdict c11() {
  Worst curv;
  std::vector<std::pair<std::string, ConnectionTable>> tables;
  for (std::size_t n : {2u, 3u, 4u})
    for (double eps : {1.0, -1.0, 0.5})
      tables.emplace_back(fmt::format("natural n={} eps={}", n, eps), natural_connection(epsilon_system(n, eps)));
  std::vector<std::function<bool(const Point&)>> domain(tables.size());
  for (const auto& e : catalog_entries()) {
    tables.emplace_back("transformed " + e.id, transformed_natural(e.system(), e.A()));
    const ScalarField A = e.A();
    domain.push_back([&e, A](const Point& p) { return e.in_domain(p) && std::abs(A.value(p)) >= 1e-6; });
  }
  for (const char* s : {"u1*u2", "exp(u1*u2)"}) {
    tables.emplace_back(std::string("transformed ") + s, transformed_natural(epsilon_system(2, 1.0), make_field(s, 2)));
    domain.push_back({});
  }
  std::size_t t = 0;
  for (const auto& [name, c] : tables) {
    const auto pts = sample_points(c.dim(), 11, 10, {}, domain[t++]);
    const ResidualReport special = curvature_natural_residual(c, pts, 0.0);
    for (const auto& e : special.entries) {
      const CurvatureTensor R = curvature_oracle(c, pts[e.point]);
      const auto& x = e.indices;
      curv.at_most(e.residual - R(x[0], x[1], x[2], x[3]), 1e-10, name);
    }
  }

  Worst fd;
  std::vector<std::pair<std::string, FieldExpr>> corpus;
  for (const char* s : {"exp(u1*u2) - u3", "ln(u1^2 + u2^2 + 1)", "pow(u1^2 + 1, 0.5)*u3", "1/(u1 - u2) + u3^3",
                        "pow(u2^2 + 2, -1.5)*exp(-u1)", "hyp2f1(0.5, 1.5, 2.5, u1/(u1^2 + 4))*u2"})
    corpus.emplace_back(s, parse_field(s, 3));
  for (const auto& e : catalog_entries()) {
    corpus.emplace_back(e.id, e.density());
    if (e.current()) corpus.emplace_back(e.id + " current", *e.current());
  }
  for (const auto& [name, ex] : corpus) {
    const ScalarField f = compile_field(ex);
    const QuadFunction q = hp_function(ex);
    const CatalogEntry* entry = nullptr;
    for (const auto& e : catalog_entries())
      if (name.rfind(e.id, 0) == 0 && (name.size() == e.id.size() || name[e.id.size()] == ' ')) entry = &e;
    const auto pts = sample_points(ex.dim(), 5, 10, {}, [&](const Point& p) {
      return (!entry || entry->in_domain(p)) && std::isfinite(f.value(p));
    });
    for (const auto& p : pts) {
      const Jet j = f(p, 3);
      for (const auto& a : multi_indices(ex.dim(), 3)) fd.at_most(rel_diff(j.partial(a), fd_partial(q, p, a)), 1e-5, name);
    }
  }
  Verdict v = curv.verdict(1e-10);
  v.detail = fmt::format("{} tables, curvature {}; jets vs FD over {} fields {}", tables.size(), v.detail, corpus.size(),
                         fd.verdict(1e-5).detail);
  v.pass = v.pass && fd.ok;
  return v;
}

Verdict c12() {
  const std::vector<std::vector<std::string>> commands{
      {"recipfm", "check", "--builtin", "eps-system", "--dim", "3", "--eps", "1", "--suite", "flatness", "--suite", "dual"},
      {"recipfm", "check", "--builtin", "eps-system", "--dim", "2", "--eps", "1", "--density", "u1*u2", "--suite",
       "grading-e"},
      {"recipfm", "transform", "--builtin", "eps-system", "--dim", "3", "--eps", "1", "--catalog",
       "dim3-eps1-flatcoord", "--biflat", "--seed", "7"},
      {"recipfm", "orbit", "--builtin", "eps-system", "--dim", "2", "--eps", "1", "--gen0", "1/(u2-u1)",
       "--composite", "exp(u1)/(u2-u1)", "--points", "5"},
      {"recipfm", "darboux", "--dim", "2", "--beta", "1,2:1/(u1-u2)", "--beta", "2,1:1/(u2-u1)", "--lame",
       "1:pow(u1-u2,-1)", "--lame", "2:pow(u1-u2,-1)", "--d", "1", "--density", "1/(u2-u1)"},
  };
  Verdict v;
  std::size_t same = 0;
  for (const auto& cmd : commands) {
    std::ostringstream o1, e1, o2, e2;
    const int r1 = cli::run(cmd, o1, e1);
    const int r2 = cli::run(cmd, o2, e2);
    const bool ok = r1 == r2 && o1.str() == o2.str() && e1.str() == e2.str() && !o1.str().empty() && r1 != 2;
    same += ok ? 1 : 0;
    v.pass = v.pass && ok;
  }
  v.detail = fmt::format("{}/{} commands byte-identical on rerun", same, commands.size());
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"eps-system natural connection flat", c1},
      {"eps-system dual connection flat, nabla E = 0", c2},
      {"flatness preserved by every catalog density", c3},
      {"flatness lost for non-constant e-grading", c4},
      {"quadrature currents reproduce closed forms", c5},
      {"A-system and theta form on every catalog density", c6},
      {"hypergeometric flat coordinate reduction and gradings", c7},
      {"bi-flat admissibility requires h = 0", c8},
      {"orbit composition and grading arithmetic", c9},
      {"Darboux-Egorov frame and its transform", c10},
      {"specialised curvature vs oracle, jets vs finite differences", c11},
      {"CLI determinism", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << fmt::format("criterion {:>2} {} {}: {}", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail)
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
