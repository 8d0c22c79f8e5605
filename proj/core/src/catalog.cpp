#include "recipfm/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"
#include "recipfm/special.hpp"

namespace recipfm {

DiagonalSystem epsilon_system(std::size_t n, double eps) {
  if (n < 2 || n > kMaxDim) throw InvalidArgument(fmt::format("epsilon system needs 2 <= n <= {}, got {}", kMaxDim, n));
  if (!std::isfinite(eps)) throw InvalidArgument("epsilon must be finite");
  std::vector<ScalarField> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.emplace_back(
        n,
        [i, n, eps](const Point& p, int order) {
          Jet s = Jet::constant(n, order, 0.0);
          for (std::size_t k = 0; k < n; ++k) s += Jet::coordinate(p, k, order);
          return Jet::coordinate(p, i, order) - eps * s;
        },
        fmt::format("u{} - {}*sum(u)", i + 1, eps));
  }
  return DiagonalSystem(std::move(v), fmt::format("eps-system(n={}, eps={})", n, eps));
}

FieldExpr CatalogEntry::density() const { return parse_field(density_src, dim, params); }

std::optional<FieldExpr> CatalogEntry::current() const {
  if (!current_src) return std::nullopt;
  return parse_field(*current_src, dim, params);
}

std::optional<FieldExpr> CatalogEntry::reduced() const {
  if (!reduced_src) return std::nullopt;
  return parse_field(*reduced_src, dim, params);
}

DiagonalSystem CatalogEntry::system() const { return epsilon_system(dim, eps); }

ScalarField CatalogEntry::A() const { return compile_field(density()).with_label(id); }

std::optional<ScalarField> CatalogEntry::B() const {
  auto c = current();
  if (!c) return std::nullopt;
  return compile_field(*c).with_label(id + "/current");
}

ConservationDensity CatalogEntry::generator() const {
  ConservationDensity g;
  g.A = A();
  g.h = h;
  g.k = k;
  g.provenance = Provenance::catalog;
  g.label = id;
  return g;
}

bool CatalogEntry::in_domain(const Point& p) const {
  if (!hypergeometric) return true;
  const double den = p[1] - p[0];
  if (den == 0.0) return false;
  return std::abs((p[2] - p[0]) / den) <= 0.9;
}

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// X21 = u2 - u1, X32 = u3 - u2
std::string in_u(std::string s) {
  s = replace_all(std::move(s), "X21", "(u2-u1)");
  return replace_all(std::move(s), "X32", "(u3-u2)");
}

struct Family {
  std::string id;
  std::string family;
  std::size_t dim;
  double eps;
  std::optional<double> h;  // parameter value for h != 0 families
  std::string density;
  std::optional<std::string> current;
  std::vector<std::string> constants;  // constants appearing in A
  std::vector<std::optional<double>> unit_k;  // E-grading of each unit instance
};

const ParamMap kGeneric{{"c0", 1.0}, {"c1", 2.0}, {"c2", -1.0}, {"c3", 0.5}};

void expand(const Family& f, std::vector<CatalogEntry>& out) {
  auto make = [&](std::string id, ParamMap params, std::optional<double> k) {
    CatalogEntry e;
    e.id = std::move(id);
    e.family = f.family;
    e.dim = f.dim;
    e.eps = f.eps;
    e.params = std::move(params);
    if (f.h) e.params["h"] = *f.h;
    e.params["eps"] = f.eps;
    e.density_src = f.density;
    e.current_src = f.current;
    e.h = f.h.value_or(0.0);
    e.k = k;
    out.push_back(std::move(e));
  };
  std::optional<double> generic_k;
  if (!f.unit_k.empty() && std::all_of(f.unit_k.begin(), f.unit_k.end(), [&](const auto& x) { return x == f.unit_k[0]; }))
    generic_k = f.unit_k[0];
  make(f.id, kGeneric, generic_k);
  for (std::size_t c = 0; c < f.constants.size(); ++c) {
    ParamMap p{{"c0", 0.0}, {"c1", 0.0}, {"c2", 0.0}, {"c3", 0.0}};
    p[f.constants[c]] = 1.0;
    make(fmt::format("{}/{}", f.id, f.constants[c]), std::move(p), f.unit_k.empty() ? std::nullopt : f.unit_k[c]);
  }
}

std::string h_tag(double h) { return fmt::format("h{}", h); }

std::vector<CatalogEntry> build_catalog() {
  std::vector<Family> fams;
  for (double h : {1.0, -0.5}) {
    fams.push_back({"dim2-eps1-" + h_tag(h), "n=2, eps=1, h!=0", 2, 1.0, h,
                    "c1*exp(h*u1)/(u2-u1) + c2*exp(h*u2)/(u2-u1)",
                    "c1*exp(h*u1)*u2/(u1-u2) + c2*exp(h*u2)*u1/(u1-u2) + c3",
                    {"c1", "c2"},
                    {}});
  }
  fams.push_back({"dim2-eps1-h0", "n=2, eps=1, h=0", 2, 1.0, std::nullopt, "c1 + c2/(u2-u1)", "c2*u2/(u1-u2) + c3",
                  {"c1", "c2"}, {0.0, -1.0}});
  for (double h : {1.0, -0.5}) {
    fams.push_back({"dim2-eps-1-" + h_tag(h), "n=2, eps=-1, h!=0", 2, -1.0, h,
                    "c1*exp(h*u1)*(h*u2-h*u1+2) + c2*exp(h*u2)*(h*u2-h*u1-2)",
                    "c1*exp(h*u1)*(6*u1-(2*u1+u2)*(u1-u2)*h-6/h) + c2*exp(h*u2)*(-6*u2-(2*u2+u1)*(u1-u2)*h+6/h) + c3",
                    {"c1", "c2"},
                    {}});
  }
  fams.push_back({"dim2-eps-1-h0", "n=2, eps=-1, h=0", 2, -1.0, std::nullopt, "c1 + c2*(u2-u1)^3",
                  "c2*(3/2)*(u1+u2)*(u2-u1)^3 + c3", {"c1", "c2"}, {0.0, 3.0}});
  for (double h : {1.0, -0.5}) {
    fams.push_back({"dim3-eps1-" + h_tag(h), "n=3, eps=1, h!=0", 3, 1.0, h,
                    in_u("(c0/(X32*X21) + c1*exp(h*X32)/(X32*(X32+X21)) + c2*exp(-h*X21)/(X21*(X32+X21)))*exp(h*u2)"),
                    std::nullopt,
                    {"c0", "c1", "c2"},
                    {}});
  }
  fams.push_back({"dim3-eps1-h0", "n=3, eps=1, h=0", 3, 1.0, std::nullopt,
                  in_u("c0/(X32*(X21+X32)) + c1/(X21*(X32+X21)) + c2"), std::nullopt, {"c0", "c1", "c2"},
                  {-2.0, -2.0, 0.0}});
  for (double h : {1.0, -0.5}) {
    fams.push_back({"dim3-eps-1-" + h_tag(h), "n=3, eps=-1, h!=0", 3, -1.0, h,
                    in_u("(c0*(h*X32/3 + 1 - h^2*X21*X32/6 - h*X21/3)"
                         " + c1*exp(-h*X21)*(6 + 4*h*X21 + h^2*X21^2 + 2*h*X32 + h^2*X32*X21)"
                         " + c2*exp(h*X32)*(6 + h^2*X32^2 + h^2*X32*X21 - 2*h*X21 - 4*h*X32)/h)*exp(h*u2)"),
                    std::nullopt,
                    {"c0", "c1", "c2"},
                    {}});
  }
  fams.push_back({"dim3-eps-1-h0", "n=3, eps=-1, h=0", 3, -1.0, std::nullopt,
                  in_u("c1 + c2*(X32*X21^3 + X21^4/2) + c3*(X32^4/12 + X21*X32^3/6)"), std::nullopt,
                  {"c1", "c2", "c3"}, {0.0, 4.0, 4.0}});

  std::vector<CatalogEntry> out;
  for (const auto& f : fams) expand(f, out);

  auto flat = [&](std::string id, double eps, std::string density, std::optional<std::string> current,
                  std::optional<std::string> reduced) {
    CatalogEntry e;
    e.id = std::move(id);
    e.family = "n=3 flat coordinate, e(A)=0";
    e.dim = 3;
    e.eps = eps;
    e.params = {{"eps", eps}, {"c3", 0.0}};
    e.density_src = std::move(density);
    e.current_src = std::move(current);
    e.reduced_src = std::move(reduced);
    e.h = 0.0;
    e.k = 1.0 - 3.0 * eps;
    e.hypergeometric = true;
    out.push_back(std::move(e));
  };
  const std::string a1 = "pow(u2-u1, 1-3*eps)*hyp2f1(eps, 3*eps-1, 2*eps, (u3-u1)/(u2-u1))";
  const std::string a2 =
      "pow(u2-u1, 1-3*eps)*pow((u3-u1)/(u2-u1), 1-2*eps)*hyp2f1(eps, 1-eps, 2-2*eps, (u3-u1)/(u2-u1))";
  flat("dim3-eps1-flatcoord", 1.0, a1, "(u1+u3)/((u1-u3)*(u2-u1)) + 1/(u1-u3) + c3", "1/((u2-u1)*(u2-u3))");
  flat("dim3-eps0.25-flatcoord1", 0.25, a1, std::nullopt, std::nullopt);
  flat("dim3-eps0.25-flatcoord2", 0.25, a2, std::nullopt, std::nullopt);
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(std::string_view id) {
  for (const auto& e : catalog_entries())
    if (e.id == id) return e;
  throw InvalidArgument(fmt::format("unknown catalog entry '{}'", id));
}

FlatCoordinates hypergeom_flat_coordinates(double eps) {
  if (!std::isfinite(eps)) throw InvalidArgument("epsilon must be finite");
  if (std::abs(eps - 1.0 / 3.0) < 1e-12) throw InvalidArgument("flat coordinates need eps != 1/3");
  auto nonpositive_int = [](double c) { return c <= 0.0 && c == std::round(c); };
  if (nonpositive_int(2.0 * eps)) throw InvalidArgument(fmt::format("2F1 parameter c = 2 eps = {} is not allowed", 2.0 * eps));
  const ParamMap params{{"eps", eps}};
  FlatCoordinates out{
      make_field("pow(u2-u1, 1-3*eps)*hyp2f1(eps, 3*eps-1, 2*eps, (u3-u1)/(u2-u1))", 3, params).with_label("A1"),
      std::nullopt};
  if (!nonpositive_int(2.0 - 2.0 * eps)) {
    out.A2 = make_field(
                 "pow(u2-u1, 1-3*eps)*pow((u3-u1)/(u2-u1), 1-2*eps)*hyp2f1(eps, 1-eps, 2-2*eps, (u3-u1)/(u2-u1))", 3,
                 params)
                 .with_label("A2");
  }
  return out;
}

RotationFrame epsilon_frame(double eps) {
  const ParamMap params{{"eps", eps}};
  const ScalarField H = make_field("pow(u1-u2, -eps)", 2, params);
  std::vector<ScalarField> beta(4);
  beta[1] = make_field("eps/(u1-u2)", 2, params).with_label("beta12");
  beta[2] = make_field("eps/(u2-u1)", 2, params).with_label("beta21");
  return RotationFrame(2, std::move(beta), {H.with_label("H1"), H.with_label("H2")}, eps);
}

}  // namespace recipfm
