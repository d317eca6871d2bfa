#pragma once

// Codimension 2 singularities of plane curves with respect to a horizontal
// direction: normal forms, two-parameter deformations, analytic loci and a
// numerical classifier of the deformed multi-germs.
//
// Events are found by solving polynomial conditions on the branches. The
// distance of a parameter point to an event locus is measured by Newton
// projection in the (a, b) plane, never by sampling curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "tgraph/errors.hpp"
#include "tgraph/numeric.hpp"

namespace tgraph {

enum class SingularityKind {
  QUADRUPLE,
  TANGENT_TRIPLE,
  INTERSECTED_CUSP,
  CUBIC_TANGENCY,
  RAMPHOIDAL_CUSP,
  HORIZONTAL_CUSP,
  MIXED_TANGENCY,
  EXTREME_TANGENCY,
  HORIZONTAL_TRIPLE_A,
  HORIZONTAL_TRIPLE_B,
};

inline const std::vector<SingularityKind>& all_singularity_kinds() {
  static const std::vector<SingularityKind> k{
      SingularityKind::QUADRUPLE,       SingularityKind::TANGENT_TRIPLE,      SingularityKind::INTERSECTED_CUSP,
      SingularityKind::CUBIC_TANGENCY,  SingularityKind::RAMPHOIDAL_CUSP,     SingularityKind::HORIZONTAL_CUSP,
      SingularityKind::MIXED_TANGENCY,  SingularityKind::EXTREME_TANGENCY,    SingularityKind::HORIZONTAL_TRIPLE_A,
      SingularityKind::HORIZONTAL_TRIPLE_B};
  return k;
}

inline std::string to_string(SingularityKind k) {
  switch (k) {
    case SingularityKind::QUADRUPLE: return "QUADRUPLE";
    case SingularityKind::TANGENT_TRIPLE: return "TANGENT_TRIPLE";
    case SingularityKind::INTERSECTED_CUSP: return "INTERSECTED_CUSP";
    case SingularityKind::CUBIC_TANGENCY: return "CUBIC_TANGENCY";
    case SingularityKind::RAMPHOIDAL_CUSP: return "RAMPHOIDAL_CUSP";
    case SingularityKind::HORIZONTAL_CUSP: return "HORIZONTAL_CUSP";
    case SingularityKind::MIXED_TANGENCY: return "MIXED_TANGENCY";
    case SingularityKind::EXTREME_TANGENCY: return "EXTREME_TANGENCY";
    case SingularityKind::HORIZONTAL_TRIPLE_A: return "HORIZONTAL_TRIPLE_A";
    case SingularityKind::HORIZONTAL_TRIPLE_B: return "HORIZONTAL_TRIPLE_B";
  }
  return "?";
}

inline std::optional<SingularityKind> parse_singularity_kind(std::string_view s) {
  for (auto k : all_singularity_kinds())
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Kinds classified up to all diffeomorphisms of the plane. For them the horizontal direction
/// carries no meaning and only triple points, tangencies and cusps are events.
inline bool extended_equivalence(SingularityKind k) {
  switch (k) {
    case SingularityKind::QUADRUPLE:
    case SingularityKind::TANGENT_TRIPLE:
    case SingularityKind::INTERSECTED_CUSP:
    case SingularityKind::CUBIC_TANGENCY:
    case SingularityKind::RAMPHOIDAL_CUSP: return true;
    default: return false;
  }
}

/// Codimension 1 singularities of a deformed germ.
enum class Tag { TRIPLE, TANGENCY, CUSP, CRITICAL_CROSSING, CUBICAL, MIXED_PAIR, EXTREME_PAIR, GENERAL };

inline std::string to_string(Tag t) {
  switch (t) {
    case Tag::TRIPLE: return "TRIPLE";
    case Tag::TANGENCY: return "TANGENCY";
    case Tag::CUSP: return "CUSP";
    case Tag::CRITICAL_CROSSING: return "CRITICAL_CROSSING";
    case Tag::CUBICAL: return "CUBICAL";
    case Tag::MIXED_PAIR: return "MIXED_PAIR";
    case Tag::EXTREME_PAIR: return "EXTREME_PAIR";
    case Tag::GENERAL: return "GENERAL";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Polynomials

/// Univariate polynomial, c[k] is the coefficient of r^k.
struct Poly {
  std::vector<double> c;

  Poly() = default;
  Poly(std::initializer_list<double> l) : c(l) {}
  explicit Poly(std::vector<double> v) : c(std::move(v)) {}

  int degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
      if (c[static_cast<std::size_t>(k)] != 0.0) return k;
    return -1;
  }
  double coef(int k) const { return k >= 0 && k < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(k)] : 0.0; }

  double operator()(double r) const {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
    return v;
  }

  Poly derivative() const {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return Poly(d);
  }

  bool is_linear() const { return degree() == 1; }
  bool is_even() const {
    if (degree() < 2) return false;
    for (std::size_t k = 1; k < c.size(); k += 2)
      if (c[k] != 0.0) return false;
    return true;
  }

  /// p(-r)
  Poly reflected() const {
    Poly p = *this;
    for (std::size_t k = 1; k < p.c.size(); k += 2) p.c[k] = -p.c[k];
    return p;
  }

  friend Poly operator+(const Poly& p, const Poly& q) {
    std::vector<double> v(std::max(p.c.size(), q.c.size()), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = p.coef(static_cast<int>(k)) + q.coef(static_cast<int>(k));
    return Poly(v);
  }
  friend Poly operator-(const Poly& p, const Poly& q) { return p + q * -1.0; }
  friend Poly operator*(const Poly& p, double s) {
    Poly q = p;
    for (auto& x : q.c) x *= s;
    return q;
  }
  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.c.empty() || q.c.empty()) return Poly{};
    std::vector<double> v(p.c.size() + q.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.c.size(); ++i)
      for (std::size_t j = 0; j < q.c.size(); ++j) v[i + j] += p.c[i] * q.c[j];
    return Poly(v);
  }

  /// p(inner(r))
  Poly compose(const Poly& inner) const {
    Poly out{0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) out = out * inner + Poly{*it};
    return out;
  }

  /// Real roots, sorted, each once. Near-real complex pairs count as real.
  std::vector<double> real_roots() const {
    const int d = degree();
    std::vector<double> out;
    if (d < 1) return out;
    double scale = 0;
    for (int k = 0; k <= d; ++k) scale = std::max(scale, std::abs(coef(k)));
    std::vector<double> cc(c.begin(), c.begin() + d + 1);
    // Drop negligible leading terms.
    int top = d;
    while (top > 0 && std::abs(cc[static_cast<std::size_t>(top)]) <= 1e-14 * scale) --top;
    cc.resize(static_cast<std::size_t>(top) + 1);
    if (top < 1) return out;
    if (top == 1) {
      out.push_back(-cc[0] / cc[1]);
    } else if (top == 2) {
      const double A = cc[2], B = cc[1], C = cc[0];
      double disc = B * B - 4 * A * C;
      const double dscale = B * B + std::abs(4 * A * C);
      if (disc < 0 && disc > -1e-12 * dscale) disc = 0;
      if (disc >= 0) {
        const double q = -0.5 * (B + (B >= 0 ? 1 : -1) * std::sqrt(disc));
        if (q != 0) {
          out.push_back(q / A);
          out.push_back(C / q);
        } else {
          out.push_back(0.0);
        }
      }
    } else {
      Eigen::VectorXd v(top + 1);
      for (int k = 0; k <= top; ++k) v[k] = cc[static_cast<std::size_t>(k)];
      Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(v);
      for (const auto& z : solver.roots())
        if (std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z.real()))) out.push_back(z.real());
      const Poly p(cc), dp = p.derivative();
      for (auto& r : out)
        for (int it = 0; it < 3; ++it) {
          const double g = dp(r);
          if (std::abs(g) < 1e-12) break;
          r -= p(r) / g;
        }
    }
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double r : out)
      if (uniq.empty() || std::abs(r - uniq.back()) > 1e-10 * std::max(1.0, std::abs(r))) uniq.push_back(r);
    return uniq;
  }
};

/// Polynomial in the deformation parameters, terms[{i, j}] multiplies a^i b^j.
struct Poly2 {
  std::map<std::pair<int, int>, double> terms;

  double operator()(double a, double b) const {
    double v = 0;
    for (const auto& [e, k] : terms) v += k * std::pow(a, e.first) * std::pow(b, e.second);
    return v;
  }
  std::array<double, 2> gradient(double a, double b) const {
    std::array<double, 2> g{0, 0};
    for (const auto& [e, k] : terms) {
      if (e.first > 0) g[0] += k * e.first * std::pow(a, e.first - 1) * std::pow(b, e.second);
      if (e.second > 0) g[1] += k * e.second * std::pow(a, e.first) * std::pow(b, e.second - 1);
    }
    return g;
  }
  /// The polynomial in b at fixed a (or in a at fixed b).
  Poly in_b(double a) const {
    std::vector<double> c;
    for (const auto& [e, k] : terms) {
      if (c.size() <= static_cast<std::size_t>(e.second)) c.resize(static_cast<std::size_t>(e.second) + 1, 0.0);
      c[static_cast<std::size_t>(e.second)] += k * std::pow(a, e.first);
    }
    return Poly(c);
  }
  Poly in_a(double b) const {
    std::vector<double> c;
    for (const auto& [e, k] : terms) {
      if (c.size() <= static_cast<std::size_t>(e.first)) c.resize(static_cast<std::size_t>(e.first) + 1, 0.0);
      c[static_cast<std::size_t>(e.first)] += k * std::pow(b, e.second);
    }
    return Poly(c);
  }
};

// ---------------------------------------------------------------------------
// Germs

struct Branch {
  Poly x, z;
};

struct MultiGerm {
  SingularityKind kind = SingularityKind::QUADRUPLE;
  std::vector<Branch> branches;
  double a = 0, b = 0;
  std::optional<double> modulus;
};

inline constexpr double kDefaultModulus = 2.0;

/// Coefficient of a in the first branch of the tangent triple point, x = r^2 - k a.
/// The deformation table writes k = 2; the locus a = b^2 belongs to k = 1, which is used here.
inline constexpr double kTangentTripleShift = 1.0;

inline MultiGerm versal_deformation(SingularityKind kind, double a, double b, double e = kDefaultModulus) {
  MultiGerm g;
  g.kind = kind;
  g.a = a;
  g.b = b;
  const Poly R{0, 1};
  auto add = [&](Poly x, Poly z) { g.branches.push_back({std::move(x), std::move(z)}); };
  switch (kind) {
    case SingularityKind::QUADRUPLE:
      if (e == 0 || std::abs(e) == 1) throw Error("quadruple point modulus must avoid 0 and +-1");
      g.modulus = e;
      add({0}, R);
      add({a, 1}, R);
      add({-b, -1}, R);
      add({0, e}, R);
      break;
    case SingularityKind::TANGENT_TRIPLE:
      add({-kTangentTripleShift * a, 0, 1}, R);
      add({0}, R);
      add({-b, 1}, R);
      break;
    case SingularityKind::INTERSECTED_CUSP:
      add({0, -b, 0, 1}, {0, 0, 1});
      add({-a, 1}, R);
      break;
    case SingularityKind::CUBIC_TANGENCY:
      add({a, -3 * b, 0, 1}, R);
      add({0}, R);
      break;
    case SingularityKind::RAMPHOIDAL_CUSP: add({0, b, 0, a, 0, 1}, {0, 0, 1}); break;
    case SingularityKind::HORIZONTAL_CUSP: add({0, 0, 1}, {0, -b, a, 1}); break;
    case SingularityKind::MIXED_TANGENCY:
      add(R, {-b, 0, 1});
      add({a, 1}, {0, 0, -1});
      break;
    case SingularityKind::EXTREME_TANGENCY:
      add(R, {b, 0, -2});
      add({a, 1}, {0, 0, -1});
      break;
    case SingularityKind::HORIZONTAL_TRIPLE_A:
      add(R, {0, 0, -1});
      add({a, 1}, R);
      add({-b, -1}, R);
      break;
    case SingularityKind::HORIZONTAL_TRIPLE_B:
      add(R, {0, 0, -1});
      add({a, 1}, R);
      add({-b, 0.5}, R);
      break;
  }
  return g;
}

inline MultiGerm normal_form(SingularityKind kind, double e = kDefaultModulus) { return versal_deformation(kind, 0, 0, e); }

// ---------------------------------------------------------------------------
// Events

namespace detail {

inline constexpr double kSamePointTol = 1e-7;

/// A smooth function of (a, b) vanishing where one codimension 1 condition holds.
struct Defect {
  Tag tag = Tag::GENERAL;
  std::string key;  // which branches are involved
  double r = 0, s = 0;
  double value = 0;
};

/// Points of branch j matched to points r of branch i through a linear coordinate of j
/// (or through r -> -r on one branch with an even coordinate). `gap` is the difference of
/// the other coordinate, so crossings are roots of gap and tangencies its double roots.
struct Matching {
  Poly partner;
  Poly gap;
};

inline std::optional<Matching> matching(const Branch& bi, const Branch& bj) {
  if (bj.z.is_linear()) {
    const Poly s = (bi.z - Poly{bj.z.coef(0)}) * (1.0 / bj.z.coef(1));
    return Matching{s, bi.x - bj.x.compose(s)};
  }
  if (bj.x.is_linear()) {
    const Poly s = (bi.x - Poly{bj.x.coef(0)}) * (1.0 / bj.x.coef(1));
    return Matching{s, bi.z - bj.z.compose(s)};
  }
  return std::nullopt;
}

inline std::optional<Matching> self_matching(const Branch& b) {
  if (b.x.is_linear() || b.z.is_linear()) return std::nullopt;
  const Poly minus{0, -1};
  if (b.z.is_even()) return Matching{minus, b.x - b.x.reflected()};
  if (b.x.is_even()) return Matching{minus, b.z - b.z.reflected()};
  throw Error("branch has neither a linear nor an even coordinate");
}

struct Crossing {
  int i = 0, j = 0;
  double r = 0, s = 0;
  double x = 0, z = 0;
};

/// Matching for the ordered pair (i, j), with the roles swapped when only i has a linear coordinate.
inline std::optional<std::pair<Matching, bool>> pair_matching(const MultiGerm& g, int i, int j) {
  const auto& bi = g.branches[static_cast<std::size_t>(i)];
  const auto& bj = g.branches[static_cast<std::size_t>(j)];
  if (i == j) {
    if (auto m = self_matching(bi)) return std::pair{*m, false};
    return std::nullopt;
  }
  if (auto m = matching(bi, bj)) return std::pair{*m, false};
  if (auto m = matching(bj, bi)) return std::pair{*m, true};
  throw Error("no branch of the pair has a linear coordinate");
}

inline std::vector<Crossing> crossings(const MultiGerm& g) {
  std::vector<Crossing> out;
  const int n = static_cast<int>(g.branches.size());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto pm = pair_matching(g, i, j);
      if (!pm) continue;
      const auto& [m, swapped] = *pm;
      for (double r : m.gap.real_roots()) {
        if (i == j && r <= kSamePointTol) continue;  // r and -r give the same crossing
        const double s = m.partner(r);
        Crossing c{i, j, swapped ? s : r, swapped ? r : s, 0, 0};
        const auto& bi = g.branches[static_cast<std::size_t>(i)];
        c.x = bi.x(c.r);
        c.z = bi.z(c.r);
        out.push_back(c);
      }
    }
  return out;
}

inline std::string key_of(char t, std::initializer_list<int> ids) {
  std::string k(1, t);
  for (int i : ids) k += ":" + std::to_string(i);
  return k;
}

inline std::vector<Defect> defects(const MultiGerm& g) {
  std::vector<Defect> out;
  const bool horizontal = !extended_equivalence(g.kind);
  const int n = static_cast<int>(g.branches.size());
  auto B = [&](int i) -> const Branch& { return g.branches[static_cast<std::size_t>(i)]; };

  // Cusps: both derivatives vanish.
  for (int i = 0; i < n; ++i) {
    const Poly dx = B(i).x.derivative(), dz = B(i).z.derivative();
    if (dx.degree() < 1 || dz.degree() < 1) continue;
    const bool by_x = dx.degree() <= dz.degree();
    const Poly& p = by_x ? dx : dz;
    const Poly& q = by_x ? dz : dx;
    for (double r : p.real_roots()) out.push_back({Tag::CUSP, key_of('C', {i}), r, 0, q(r)});
  }

  // Tangencies: double roots of a matching gap, tangent not horizontal.
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto pm = pair_matching(g, i, j);
      if (!pm) continue;
      const auto& [m, swapped] = *pm;
      const int first = swapped ? j : i;
      for (double r : m.gap.derivative().real_roots()) {
        if (i == j && std::abs(r) <= kSamePointTol) continue;
        if (horizontal && std::abs(B(first).z.derivative()(r)) <= 1e-9) continue;
        out.push_back({Tag::TANGENCY, key_of('G', {i, j}), r, m.partner(r), m.gap(r)});
      }
    }

  // Triple points: a third point at the height of a crossing.
  for (const auto& c : crossings(g))
    for (int k = 0; k < n; ++k)
      for (double u : (B(k).z - Poly{c.z}).real_roots()) {
        if (k == c.i && std::abs(u - c.r) <= kSamePointTol) continue;
        if (k == c.j && std::abs(u - c.s) <= kSamePointTol) continue;
        out.push_back({Tag::TRIPLE, key_of('T', {c.i, c.j, k}), c.r, u, B(k).x(u) - c.x});
      }

  if (!horizontal) return out;

  // Critical crossings: another point at a horizontal tangency.
  struct Extremum {
    int branch;
    double r;
    bool max;
  };
  std::vector<Extremum> ext;
  for (int i = 0; i < n; ++i) {
    const Poly dz = B(i).z.derivative(), ddz = dz.derivative();
    if (dz.degree() < 1) continue;
    for (double r0 : dz.real_roots()) {
      const double h = B(i).z(r0), x0 = B(i).x(r0);
      for (int j = 0; j < n; ++j)
        for (double u : (B(j).z - Poly{h}).real_roots()) {
          if (j == i && std::abs(u - r0) <= kSamePointTol) continue;
          out.push_back({Tag::CRITICAL_CROSSING, key_of('K', {i, j}), r0, u, B(j).x(u) - x0});
        }
      if (std::abs(ddz(r0)) > 1e-12) ext.push_back({i, r0, ddz(r0) < 0});
    }
    // Cubical points: inflection with horizontal tangent.
    if (ddz.degree() >= 1)
      for (double r0 : ddz.real_roots()) out.push_back({Tag::CUBICAL, key_of('U', {i}), r0, 0, dz(r0)});
  }

  // Pairs of extrema at one height. Consecutive extrema of one branch are never level.
  for (std::size_t p = 0; p < ext.size(); ++p)
    for (std::size_t q = p + 1; q < ext.size(); ++q) {
      if (ext[p].branch == ext[q].branch && q == p + 1) continue;
      const Tag t = ext[p].max == ext[q].max ? Tag::EXTREME_PAIR : Tag::MIXED_PAIR;
      out.push_back({t, key_of(t == Tag::MIXED_PAIR ? 'M' : 'E', {ext[p].branch, ext[q].branch}), ext[p].r, ext[q].r,
                     B(ext[p].branch).z(ext[p].r) - B(ext[q].branch).z(ext[q].r)});
    }
  return out;
}

inline std::optional<double> track(const std::vector<Defect>& ds, const Defect& ref) {
  const Defect* best = nullptr;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& d : ds) {
    if (d.key != ref.key || d.tag != ref.tag) continue;
    const double dist = std::abs(d.r - ref.r) + std::abs(d.s - ref.s);
    if (dist < bd) {
      bd = dist;
      best = &d;
    }
  }
  if (!best || bd > 1e-2) return std::nullopt;
  return best->value;
}

inline constexpr double kStep = 1e-6;

/// Distance in the (a, b) plane from the current parameters to the zero set of one defect,
/// by minimal-norm Newton steps. Infinity when the iteration loses the defect.
inline double defect_distance(SingularityKind kind, double e, double a, double b, Defect d, double limit) {
  const double a0 = a, b0 = b;
  for (int it = 0; it < 30; ++it) {
    if (std::abs(d.value) <= 1e-13) return std::hypot(a - a0, b - b0);
    auto at = [&](double da, double db) { return track(defects(versal_deformation(kind, a + da, b + db, e)), d); };
    const auto fa1 = at(kStep, 0), fa0 = at(-kStep, 0), fb1 = at(0, kStep), fb0 = at(0, -kStep);
    if (!fa1 || !fa0 || !fb1 || !fb0) return std::numeric_limits<double>::infinity();
    const double ga = (*fa1 - *fa0) / (2 * kStep), gb = (*fb1 - *fb0) / (2 * kStep);
    const double g2 = ga * ga + gb * gb;
    if (g2 < 1e-24) return std::numeric_limits<double>::infinity();
    const double sa = -d.value * ga / g2, sb = -d.value * gb / g2;
    // Far from the locus at first order: stop early.
    if (it == 0 && std::hypot(sa, sb) > 20 * limit) return std::numeric_limits<double>::infinity();
    a += sa;
    b += sb;
    if (std::hypot(a - a0, b - b0) > 20 * limit) return std::numeric_limits<double>::infinity();
    const auto ds = defects(versal_deformation(kind, a, b, e));
    const Defect* next = nullptr;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& x : ds)
      if (x.key == d.key && x.tag == d.tag) {
        const double dist = std::abs(x.r - d.r) + std::abs(x.s - d.s);
        if (dist < bd) {
          bd = dist;
          next = &x;
        }
      }
    if (!next || bd > 0.1) return std::numeric_limits<double>::infinity();
    if (std::abs(sa) + std::abs(sb) < 1e-15 && std::abs(next->value) > 1e-13) return std::numeric_limits<double>::infinity();
    d = *next;
  }
  return std::abs(d.value) <= 1e-10 ? std::hypot(a - a0, b - b0) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Tags of the codimension 1 conditions holding within parameter distance `tol` of (a, b);
/// {GENERAL} when there are none.
inline std::set<Tag> classify_deformed(SingularityKind kind, double a, double b, double tol, double e = kDefaultModulus) {
  using detail::kStep;
  std::set<Tag> tags;
  const auto ds = detail::defects(versal_deformation(kind, a, b, e));
  // First-order screening with one set of perturbed evaluations shared by all defects.
  std::array<std::vector<detail::Defect>, 4> nb{
      detail::defects(versal_deformation(kind, a + kStep, b, e)), detail::defects(versal_deformation(kind, a - kStep, b, e)),
      detail::defects(versal_deformation(kind, a, b + kStep, e)), detail::defects(versal_deformation(kind, a, b - kStep, e))};
  for (const auto& d : ds) {
    if (tags.count(d.tag)) continue;
    if (std::abs(d.value) <= 1e-13) {
      tags.insert(d.tag);
      continue;
    }
    std::array<std::optional<double>, 4> f;
    for (std::size_t k = 0; k < 4; ++k) f[k] = detail::track(nb[k], d);
    if (f[0] && f[1] && f[2] && f[3]) {
      const double ga = (*f[0] - *f[1]) / (2 * kStep), gb = (*f[2] - *f[3]) / (2 * kStep);
      if (std::abs(d.value) > 20 * tol * std::hypot(ga, gb)) continue;
    }
    if (detail::defect_distance(kind, e, a, b, d, tol) <= tol) tags.insert(d.tag);
  }
  if (tags.empty()) tags.insert(Tag::GENERAL);
  return tags;
}

// ---------------------------------------------------------------------------
// Loci

/// Half-plane ca a + cb b + c0 >= 0.
struct HalfPlane {
  double ca = 0, cb = 0, c0 = 0;
  bool contains(double a, double b) const { return ca * a + cb * b + c0 >= -1e-12; }
};

struct LocusCurve {
  std::string id;
  std::string equation;
  Poly2 p;
  std::vector<HalfPlane> region;  // empty: the whole curve
  std::optional<Tag> expected;    // none: no codimension 1 singularity of the germ lies there
  bool quoted = true;             // false for curves found by the same elimination

  bool in_region(double a, double b) const {
    return std::all_of(region.begin(), region.end(), [&](const HalfPlane& h) { return h.contains(a, b); });
  }
};

namespace detail {

inline Poly2 poly2(std::initializer_list<std::tuple<int, int, double>> t) {
  Poly2 p;
  for (const auto& [i, j, k] : t) p.terms[{i, j}] += k;
  return p;
}

}  // namespace detail

inline std::vector<LocusCurve> bifurcation_loci(SingularityKind kind, double e = kDefaultModulus) {
  using detail::poly2;
  const double k = kTangentTripleShift;
  switch (kind) {
    case SingularityKind::QUADRUPLE:
      return {{"branches-124", "a = 0", poly2({{1, 0, 1}}), {}, Tag::TRIPLE},
              {"branches-134", "b = 0", poly2({{0, 1, 1}}), {}, Tag::TRIPLE},
              {"branches-123", "a = b", poly2({{1, 0, 1}, {0, 1, -1}}), {}, Tag::TRIPLE},
              {"branches-234", "e(a + b) = b - a", poly2({{1, 0, e + 1}, {0, 1, e - 1}}), {}, Tag::TRIPLE}};
    case SingularityKind::TANGENT_TRIPLE:
      return {{"tangency", "a = 0", poly2({{1, 0, 1}}), {}, Tag::TANGENCY},
              {"triple", "a = b^2", poly2({{1, 0, k}, {0, 2, -1}}), {}, Tag::TRIPLE},
              {"far-tangency", "b = a + 1/4", poly2({{0, 1, 1}, {1, 0, -k}, {0, 0, -0.25}}), {}, Tag::TANGENCY, false}};
    case SingularityKind::INTERSECTED_CUSP:
      return {{"cusp", "b = 0", poly2({{0, 1, 1}}), {}, Tag::CUSP},
              {"triple", "a = b, b >= 0", poly2({{1, 0, 1}, {0, 1, -1}}), {{0, 1, 0}}, Tag::TRIPLE},
              {"tangency-quoted", "b^2 + 3a = 0", poly2({{0, 2, 1}, {1, 0, 3}}), {}, Tag::TANGENCY},
              {"tangency", "27a^2 - 18ab - 4a - 4b^3 - b^2 = 0",
               poly2({{2, 0, 27}, {1, 1, -18}, {1, 0, -4}, {0, 3, -4}, {0, 2, -1}}), {}, Tag::TANGENCY, false}};
    case SingularityKind::CUBIC_TANGENCY:
      return {{"tangency", "a^2 = 4b^3", poly2({{2, 0, 1}, {0, 3, -4}}), {}, Tag::TANGENCY}};
    case SingularityKind::RAMPHOIDAL_CUSP:
      return {{"cusp", "b = 0", poly2({{0, 1, 1}}), {}, Tag::CUSP},
              {"self-tangency-quoted", "9a^2 = 20b", poly2({{2, 0, 9}, {0, 1, -20}}), {}, Tag::TANGENCY},
              {"self-tangency", "a^2 = 4b, a <= 0", poly2({{2, 0, 1}, {0, 1, -4}}), {{-1, 0, 0}}, Tag::TANGENCY, false}};
    case SingularityKind::HORIZONTAL_CUSP:
      return {{"critical", "b = a^2, b > 0", poly2({{0, 1, 1}, {2, 0, -1}}), {{0, 1, 0}}, Tag::CRITICAL_CROSSING},
              {"cubical", "b = -a^2/3", poly2({{0, 1, 3}, {2, 0, 1}}), {}, Tag::CUBICAL},
              {"cusp", "b = 0", poly2({{0, 1, 1}}), {}, Tag::CUSP}};
    case SingularityKind::MIXED_TANGENCY:
      return {{"mixed-pair", "b = 0", poly2({{0, 1, 1}}), {}, Tag::MIXED_PAIR},
              {"tangency", "a^2 = 2b", poly2({{2, 0, 1}, {0, 1, -2}}), {}, Tag::TANGENCY},
              {"critical", "b = a^2", poly2({{0, 1, 1}, {2, 0, -1}}), {}, Tag::CRITICAL_CROSSING, false}};
    case SingularityKind::EXTREME_TANGENCY:
      return {{"extreme-pair", "b = 0", poly2({{0, 1, 1}}), {}, Tag::EXTREME_PAIR},
              {"tangency", "2a^2 + b = 0", poly2({{2, 0, 2}, {0, 1, 1}}), {}, Tag::TANGENCY},
              {"critical-1", "b = 2a^2", poly2({{0, 1, 1}, {2, 0, -2}}), {}, Tag::CRITICAL_CROSSING},
              {"critical-2", "b = -a^2", poly2({{0, 1, 1}, {2, 0, 1}}), {}, Tag::CRITICAL_CROSSING}};
    case SingularityKind::HORIZONTAL_TRIPLE_A:
      return {{"critical-2", "a = 0", poly2({{1, 0, 1}}), {}, Tag::CRITICAL_CROSSING},
              {"critical-3", "b = 0", poly2({{0, 1, 1}}), {}, Tag::CRITICAL_CROSSING},
              {"level", "a + b = 0", poly2({{1, 0, 1}, {0, 1, 1}}), {}, std::nullopt},
              {"triple", "(a - b)^2 = 2(a + b)", poly2({{2, 0, 1}, {1, 1, -2}, {0, 2, 1}, {1, 0, -2}, {0, 1, -2}}), {}, Tag::TRIPLE},
              {"tangency-2", "a = -1/4", poly2({{1, 0, 1}, {0, 0, 0.25}}), {}, Tag::TANGENCY, false},
              {"tangency-3", "b = -1/4", poly2({{0, 1, 1}, {0, 0, 0.25}}), {}, Tag::TANGENCY, false}};
    case SingularityKind::HORIZONTAL_TRIPLE_B:
      return {{"critical-2", "a = 0", poly2({{1, 0, 1}}), {}, Tag::CRITICAL_CROSSING, false},
              {"critical-3", "b = 0", poly2({{0, 1, 1}}), {}, Tag::CRITICAL_CROSSING, false},
              {"level", "a + b = 0", poly2({{1, 0, 1}, {0, 1, 1}}), {}, std::nullopt, false},
              {"triple", "(a + 2b)^2 = 2(a + b)", poly2({{2, 0, 1}, {1, 1, 4}, {0, 2, 4}, {1, 0, -2}, {0, 1, -2}}), {}, Tag::TRIPLE, false},
              {"tangency-2", "a = -1/4", poly2({{1, 0, 1}, {0, 0, 0.25}}), {}, Tag::TANGENCY, false},
              {"tangency-3", "b = 1/2", poly2({{0, 1, 1}, {0, 0, -0.5}}), {}, Tag::TANGENCY, false}};
  }
  return {};
}

/// Distance from (a, b) to the part of a locus inside its region, by Newton projection.
/// Infinity if the projection does not settle within `limit`.
inline double locus_distance(const LocusCurve& c, double a, double b, double limit) {
  double x = a, y = b;
  for (int it = 0; it < 60; ++it) {
    const double f = c.p(x, y);
    const auto g = c.p.gradient(x, y);
    const double g2 = g[0] * g[0] + g[1] * g[1];
    if (std::abs(f) <= 1e-14) break;
    if (g2 < 1e-30) return std::numeric_limits<double>::infinity();
    x -= f * g[0] / g2;
    y -= f * g[1] / g2;
    if (std::hypot(x - a, y - b) > 10 * limit + 1) return std::numeric_limits<double>::infinity();
  }
  if (std::abs(c.p(x, y)) > 1e-10 || !c.in_region(x, y)) return std::numeric_limits<double>::infinity();
  return std::hypot(x - a, y - b);
}

/// Points of a locus inside [-1, 1]^2 and its region: p(a, b) = 0 solved along n vertical and
/// n horizontal lines.
inline std::vector<std::pair<double, double>> locus_samples(const LocusCurve& c, int n) {
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < n; ++k) {
    const double v = -1.0 + 2.0 * (k + 0.5) / n;
    for (double b : c.p.in_b(v).real_roots())
      if (std::abs(b) <= 1 && c.in_region(v, b)) out.push_back({v, b});
    for (double a : c.p.in_a(v).real_roots())
      if (std::abs(a) <= 1 && c.in_region(a, v)) out.push_back({a, v});
  }
  return out;
}

struct CurveCheck {
  std::string id, equation;
  std::optional<Tag> expected;
  bool quoted = true;
  int samples = 0, detected = 0;
  bool pass() const { return samples > 0 && detected == samples; }
};

struct LocusReport {
  SingularityKind kind{};
  int grid = 0;
  double tol = 0;
  int flagged = 0;                                          // grid points not GENERAL
  std::vector<std::pair<double, double>> unexplained;       // flagged points far from every locus
  std::vector<CurveCheck> curves;
  bool detected_near_loci() const { return unexplained.empty(); }
  bool loci_detected() const {
    return std::all_of(curves.begin(), curves.end(), [](const CurveCheck& c) { return c.pass(); });
  }
  bool pass() const { return detected_near_loci() && loci_detected(); }
};

namespace detail {

template <class F>
void parallel_for(int n, F&& f) {
  const int workers = std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), 16));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Two-sided check on a grid x grid lattice of [-1, 1]^2: every non-GENERAL point lies within tol of
/// some locus, and sampled points of every locus carry its expected tag.
inline LocusReport locus_consistency(SingularityKind kind, int grid, double tol, double e = kDefaultModulus,
                                     int samples_per_axis = 24) {
  if (grid < 2) throw Error("grid needs at least 2 points per axis");
  LocusReport rep;
  rep.kind = kind;
  rep.grid = grid;
  rep.tol = tol;
  const auto loci = bifurcation_loci(kind, e);

  std::vector<std::set<Tag>> tags(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid));
  auto coord = [&](int k) { return -1.0 + 2.0 * k / (grid - 1); };
  detail::parallel_for(grid, [&](int i) {
    for (int j = 0; j < grid; ++j)
      tags[static_cast<std::size_t>(i * grid + j)] = classify_deformed(kind, coord(i), coord(j), tol, e);
  });
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const auto& t = tags[static_cast<std::size_t>(i * grid + j)];
      if (t.count(Tag::GENERAL)) continue;
      ++rep.flagged;
      const double a = coord(i), b = coord(j);
      const bool near = std::any_of(loci.begin(), loci.end(), [&](const LocusCurve& c) { return locus_distance(c, a, b, tol) <= tol; });
      if (!near) rep.unexplained.push_back({a, b});
    }

  for (const auto& c : loci) {
    CurveCheck cc{c.id, c.equation, c.expected, c.quoted, 0, 0};
    const auto pts = locus_samples(c, samples_per_axis);
    std::vector<char> hit(pts.size(), 0);
    detail::parallel_for(static_cast<int>(pts.size()), [&](int k) {
      const auto& [a, b] = pts[static_cast<std::size_t>(k)];
      hit[static_cast<std::size_t>(k)] = c.expected && classify_deformed(kind, a, b, tol, e).count(*c.expected) ? 1 : 0;
    });
    cc.samples = static_cast<int>(pts.size());
    cc.detected = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
    rep.curves.push_back(cc);
  }
  return rep;
}

}  // namespace tgraph
