#pragma once

// Labelled trace graphs on the thickened torus A_xz x S^1_t, stored as (t, z)
// polylines. Besides the four vertex kinds of a generic graph there is a
// SEAM pseudo-vertex of degree 2 where a trace arc passes z = +-1 and the arc
// numbering of both strands changes.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tgraph/errors.hpp"
#include "tgraph/link_geometry.hpp"
#include "tgraph/numeric.hpp"

namespace tgraph {

enum class VertexKind { TRIPLE, TANGENT, HANGING, CRITICAL, SEAM };

inline std::string to_string(VertexKind k) {
  switch (k) {
    case VertexKind::TRIPLE: return "TRIPLE";
    case VertexKind::TANGENT: return "TANGENT";
    case VertexKind::HANGING: return "HANGING";
    case VertexKind::CRITICAL: return "CRITICAL";
    case VertexKind::SEAM: return "SEAM";
  }
  return "?";
}

inline std::optional<VertexKind> parse_vertex_kind(const std::string& s) {
  for (auto k : {VertexKind::TRIPLE, VertexKind::TANGENT, VertexKind::HANGING, VertexKind::CRITICAL, VertexKind::SEAM})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct TVertex {
  VertexKind kind = VertexKind::TRIPLE;
  double t = 0;  // [0, 2pi)
  double z = 0;  // [-1, 1); SEAM vertices sit at -1
  int sign = 0;  // TRIPLE only
};

struct TPoint {
  double t = 0;  // unwrapped along the arc
  double z = 0;
  friend bool operator==(const TPoint&, const TPoint&) = default;
};

/// A trace arc between two vertices, stored from its lower to its upper end.
struct TArc {
  int from = -1;  // vertex at the lower end, -1 for a closed circle
  int to = -1;
  CrossingLabel label;
  std::vector<TPoint> points;
};

/// z-range and direction of each monotone arc of the underlying link.
struct ArcInfo {
  ArcRef ref;
  int direction = 1;
  double z_lo = -1, z_hi = 1;
  ArcEnd start = ArcEnd::Seam, end = ArcEnd::Seam;
};

struct ArcStructure {
  std::vector<int> arcs_per_component;
  std::vector<ArcInfo> arcs;  // component-major, arc index ascending

  int components() const { return static_cast<int>(arcs_per_component.size()); }
  int total() const { return static_cast<int>(arcs.size()); }

  int id(ArcRef r) const {
    int base = 0;
    for (int c = 1; c < r.component; ++c) base += arcs_per_component[static_cast<std::size_t>(c - 1)];
    return base + r.index - 1;
  }
  bool valid(ArcRef r) const {
    return r.component >= 1 && r.component <= components() && r.index >= 1 &&
           r.index <= arcs_per_component[static_cast<std::size_t>(r.component - 1)];
  }
  const ArcInfo& at(ArcRef r) const { return arcs[static_cast<std::size_t>(id(r))]; }
  ArcRef next(ArcRef r) const {
    return {r.component, r.index % arcs_per_component[static_cast<std::size_t>(r.component - 1)] + 1};
  }
  ArcRef prev(ArcRef r) const {
    const int n = arcs_per_component[static_cast<std::size_t>(r.component - 1)];
    return {r.component, (r.index + n - 2) % n + 1};
  }
  /// Number of arc joins at extrema (2e).
  int extremum_count() const {
    int c = 0;
    for (const auto& a : arcs) c += a.end != ArcEnd::Seam;
    return c;
  }

  static ArcStructure from(const ArcDecomposition& d) {
    ArcStructure s;
    s.arcs_per_component = d.arcs_per_component;
    for (const auto& a : d.arcs) s.arcs.push_back({a.ref, a.direction, a.z_lo(), a.z_hi(), a.start, a.end});
    return s;
  }

  friend bool operator==(const ArcStructure& a, const ArcStructure& b) {
    if (a.arcs_per_component != b.arcs_per_component || a.arcs.size() != b.arcs.size()) return false;
    for (std::size_t k = 0; k < a.arcs.size(); ++k) {
      const auto &x = a.arcs[k], &y = b.arcs[k];
      if (x.ref != y.ref || x.direction != y.direction || x.z_lo != y.z_lo || x.z_hi != y.z_hi ||
          x.start != y.start || x.end != y.end)
        return false;
    }
    return true;
  }
};

struct TraceGraph {
  ArcStructure structure;
  std::vector<TVertex> vertices;
  std::vector<TArc> arcs;

  int count(VertexKind k) const {
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(), [&](const TVertex& v) { return v.kind == k; }));
  }
  bool knot() const { return structure.components() == 1; }

  /// Incident arcs of every vertex.
  std::vector<std::vector<int>> incidence() const {
    std::vector<std::vector<int>> inc(vertices.size());
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (arcs[a].from >= 0) inc[static_cast<std::size_t>(arcs[a].from)].push_back(static_cast<int>(a));
      if (arcs[a].to >= 0) inc[static_cast<std::size_t>(arcs[a].to)].push_back(static_cast<int>(a));
    }
    return inc;
  }
};

inline constexpr double kVertexTimeTol = 1e-8;

namespace detail {

/// Canonical order: vertices by (t, z, kind), arcs by endpoints, label and first height.
inline void sort_canonical(TraceGraph& g) {
  std::vector<int> order(g.vertices.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const auto &a = g.vertices[static_cast<std::size_t>(x)], &b = g.vertices[static_cast<std::size_t>(y)];
    return std::tie(a.t, a.z, a.kind) < std::tie(b.t, b.z, b.kind);
  });
  std::vector<int> rank(g.vertices.size());
  std::vector<TVertex> vs;
  vs.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    rank[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
    vs.push_back(g.vertices[static_cast<std::size_t>(order[k])]);
  }
  g.vertices = std::move(vs);
  for (auto& a : g.arcs) {
    if (a.from >= 0) a.from = rank[static_cast<std::size_t>(a.from)];
    if (a.to >= 0) a.to = rank[static_cast<std::size_t>(a.to)];
  }
  std::sort(g.arcs.begin(), g.arcs.end(), [](const TArc& a, const TArc& b) {
    return std::tie(a.from, a.to, a.label, a.points.front().z) < std::tie(b.from, b.to, b.label, b.points.front().z);
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;  // flagged, not failed
  bool pass() const { return violations.empty(); }
};

namespace detail {

inline bool adjacent_arcs(const ArcStructure& s, ArcRef a, ArcRef b) {
  return a.component == b.component && a != b && (s.next(a) == b || s.next(b) == a);
}

/// Direction (dt, dz) of an arc leaving vertex `v`.
inline std::array<double, 2> leaving_direction(const TArc& a, bool from_start) {
  const auto& p = from_start ? a.points.front() : a.points.back();
  const auto& q = from_start ? a.points[1] : a.points[a.points.size() - 2];
  const double dt = q.t - p.t, dz = q.z - p.z;
  const double n = std::hypot(dt, dz);
  return {dt / n, dz / n};
}

}  // namespace detail

inline ValidationReport validate_generic(const TraceGraph& g) {
  ValidationReport r;
  auto fail = [&](const std::string& clause, const std::string& what) { r.violations.push_back(clause + ": " + what); };
  const auto& s = g.structure;
  const auto inc = g.incidence();
  const int nv = static_cast<int>(g.vertices.size());

  // Arcs: labels, endpoints, monotonicity.
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const auto& arc = g.arcs[a];
    const std::string name = "arc " + std::to_string(a);
    if (!s.valid(arc.label.over) || !s.valid(arc.label.under) || arc.label.over == arc.label.under)
      fail("label", name + " has an invalid label");
    if (arc.from >= nv || arc.to >= nv || (arc.from < 0) != (arc.to < 0)) fail("endpoints", name);
    if (arc.points.size() < 2) {
      fail("monotonic", name + " has fewer than two points");
      continue;
    }
    for (std::size_t k = 1; k < arc.points.size(); ++k)
      if (!(arc.points[k].z > arc.points[k - 1].z)) {
        fail("monotonic", name + " is not monotonic in z");
        break;
      }
    auto check_end = [&](int v, const TPoint& p, bool top) {
      if (v < 0) return;
      const auto& V = g.vertices[static_cast<std::size_t>(v)];
      const double z = V.kind == VertexKind::SEAM && top ? 1.0 : V.z;
      if (angle_dist(V.t, p.t) > 1e-9 || std::abs(z - p.z) > 1e-9) fail("endpoints", name + " does not end at its vertex");
    };
    check_end(arc.from, arc.points.front(), false);
    check_end(arc.to, arc.points.back(), true);
  }

  // Vertices: degree and local shape.
  for (int v = 0; v < nv; ++v) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    const auto& I = inc[static_cast<std::size_t>(v)];
    const std::string name = to_string(V.kind) + " vertex " + std::to_string(v);
    const std::size_t want = V.kind == VertexKind::TRIPLE ? 6 : V.kind == VertexKind::HANGING ? 1 : 2;
    if (I.size() != want) {
      fail("degree", name + " has degree " + std::to_string(I.size()));
      continue;
    }
    if (V.kind == VertexKind::TRIPLE && V.sign == 0) fail("transversal", name + " has no sign");
    std::vector<std::array<double, 2>> dirs;
    std::vector<CrossingLabel> labels;
    for (std::size_t k = 0; k < I.size(); ++k) {
      const auto& A = g.arcs[static_cast<std::size_t>(I[k])];
      if (A.points.size() < 2) continue;
      // A loop at v is listed twice: once from its start, once from its end.
      const bool repeat = k > 0 && I[k - 1] == I[k];
      dirs.push_back(detail::leaving_direction(A, A.from == v && !repeat));
      labels.push_back(A.label);
    }
    if (dirs.size() != I.size()) continue;
    switch (V.kind) {
      case VertexKind::CRITICAL:
        if ((dirs[0][1] > 0) != (dirs[1][1] > 0)) fail("critical", name + " is not an extremum of z");
        if (!(labels[0].over == labels[1].over && detail::adjacent_arcs(s, labels[0].under, labels[1].under)) &&
            !(labels[0].under == labels[1].under && detail::adjacent_arcs(s, labels[0].over, labels[1].over)))
          fail("critical-label", name + " joins " + labels[0].display(false) + " and " + labels[1].display(false));
        break;
      case VertexKind::TANGENT:
        if ((dirs[0][1] > 0) == (dirs[1][1] > 0)) fail("tangent", name + " is not interior to a monotone arc");
        if (labels[0] != labels[1]) fail("label", name + " changes the label");
        break;
      case VertexKind::SEAM:
        if ((dirs[0][1] > 0) == (dirs[1][1] > 0)) fail("seam", name + " does not cross the seam");
        break;
      case VertexKind::HANGING:
        if (!detail::adjacent_arcs(s, labels[0].over, labels[0].under))
          fail("hanging-label", name + " has label " + labels[0].display(false));
        break;
      case VertexKind::TRIPLE: {
        // Pair incident arcs into three curves by label.
        std::map<CrossingLabel, std::vector<std::size_t>> by_label;
        for (std::size_t k = 0; k < labels.size(); ++k) by_label[labels[k]].push_back(k);
        bool ok = by_label.size() == 3;
        for (auto& [l, ks] : by_label) ok = ok && ks.size() == 2 && (dirs[ks[0]][1] > 0) != (dirs[ks[1]][1] > 0);
        if (!ok) {
          fail("triplet", name + " does not carry three crossing curves");
          break;
        }
        std::vector<CrossingLabel> ls;
        for (auto& [l, ks] : by_label) ls.push_back(l);
        // Form (q s), (s r), (q r).
        bool form = false;
        std::array<int, 3> perm{0, 1, 2};
        do {
          const auto &x = ls[static_cast<std::size_t>(perm[0])], &y = ls[static_cast<std::size_t>(perm[1])],
                     &w = ls[static_cast<std::size_t>(perm[2])];
          form = form || (x.under == y.over && w.over == x.over && w.under == y.under && x.over != y.under);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!form) fail("triplet", name + " labels are not of the form (q s), (s r), (q r)");
        // Transversality: three distinct tangent slopes dt/dz.
        std::vector<double> slopes;
        for (auto& [l, ks] : by_label) {
          const auto& d = dirs[ks[0]][1] > 0 ? dirs[ks[0]] : dirs[ks[1]];
          slopes.push_back(d[0] / d[1]);
        }
        for (std::size_t a = 0; a < 3; ++a)
          for (std::size_t b = a + 1; b < 3; ++b)
            if (std::abs(slopes[a] - slopes[b]) < 1e-9 * (1 + std::abs(slopes[a]))) fail("transversal", name);
        break;
      }
    }
  }

  // Distinct vertex times.
  {
    std::vector<std::pair<double, int>> ts;
    for (int v = 0; v < nv; ++v)
      if (g.vertices[static_cast<std::size_t>(v)].kind != VertexKind::SEAM)
        ts.push_back({g.vertices[static_cast<std::size_t>(v)].t, v});
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k)
      if (ts[k + 1].first - ts[k].first < kVertexTimeTol)
        fail("distinct-times", "vertices " + std::to_string(ts[k].second) + " and " + std::to_string(ts[k + 1].second));
    if (ts.size() > 1 && ts.front().first + kTwoPi - ts.back().first < kVertexTimeTol)
      fail("distinct-times", "vertices " + std::to_string(ts.back().second) + " and " + std::to_string(ts.front().second));
  }

  // Symmetry under t -> t + pi with reversed labels.
  std::vector<int> partner(static_cast<std::size_t>(nv), -1);
  {
    std::multimap<double, int> by_z;
    for (int v = 0; v < nv; ++v) by_z.insert({g.vertices[static_cast<std::size_t>(v)].z, v});
    for (int v = 0; v < nv; ++v) {
      const auto& V = g.vertices[static_cast<std::size_t>(v)];
      for (auto it = by_z.lower_bound(V.z - 1e-9); it != by_z.end() && it->first <= V.z + 1e-9; ++it) {
        const auto& W = g.vertices[static_cast<std::size_t>(it->second)];
        if (W.kind == V.kind && angle_dist(W.t, V.t + kPi) < 1e-7) {
          partner[static_cast<std::size_t>(v)] = it->second;
          break;
        }
      }
      if (partner[static_cast<std::size_t>(v)] < 0)
        fail("symmetry", to_string(V.kind) + " vertex " + std::to_string(v) + " has no partner at t + pi");
      else if (V.kind == VertexKind::TRIPLE && g.vertices[static_cast<std::size_t>(partner[static_cast<std::size_t>(v)])].sign != -V.sign)
        fail("symmetry", "triple vertex " + std::to_string(v) + " and its partner do not carry opposite signs");
    }
    std::multiset<std::tuple<int, int, CrossingLabel>> keys;
    for (const auto& a : g.arcs) keys.insert({a.from, a.to, a.label});
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
      const auto& A = g.arcs[a];
      const int pf = A.from >= 0 ? partner[static_cast<std::size_t>(A.from)] : -1;
      const int pt = A.to >= 0 ? partner[static_cast<std::size_t>(A.to)] : -1;
      if ((A.from >= 0 && pf < 0) || (A.to >= 0 && pt < 0)) continue;
      if (!keys.count({pf, pt, A.label.reversed()}))
        fail("symmetry", "arc " + std::to_string(a) + " " + A.label.display(false) + " has no reversed partner");
    }
  }

  // Hanging vertices: two per pair of arcs joined at an extremum.
  {
    std::map<CrossingLabel, int> hanging;
    for (int v = 0; v < nv; ++v)
      if (g.vertices[static_cast<std::size_t>(v)].kind == VertexKind::HANGING && inc[static_cast<std::size_t>(v)].size() == 1)
        ++hanging[g.arcs[static_cast<std::size_t>(inc[static_cast<std::size_t>(v)][0])].label];
    for (const auto& info : s.arcs) {
      if (info.end == ArcEnd::Seam) continue;
      const ArcRef q = info.ref, q1 = s.next(info.ref);
      for (const CrossingLabel& l : {CrossingLabel{q1, q}, CrossingLabel{q, q1}}) {
        const int c = hanging.count(l) ? hanging.at(l) : 0;
        if (c != 1)
          fail("hanging-count", std::to_string(c) + " hanging vertices labelled " + l.display(false));
      }
    }
    const int e2 = s.extremum_count();
    if (g.count(VertexKind::HANGING) != e2)
      r.warnings.push_back("hanging vertex count " + std::to_string(g.count(VertexKind::HANGING)) +
                           " differs from 2e = " + std::to_string(e2));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Slices

struct SlicePoint {
  double z = 0;
  CrossingLabel label;
};

struct SliceSet {
  double t = 0;
  std::vector<SlicePoint> points;
};

inline SliceSet slice(const TraceGraph& g, double t, double tol = kVertexTimeTol) {
  t = wrap_angle(t);
  for (const auto& v : g.vertices)
    if (v.kind != VertexKind::SEAM && angle_dist(v.t, t) < tol)
      throw VertexOnSlice("vertex of kind " + to_string(v.kind) + " at t = " + format_sig(v.t, 12));
  SliceSet out;
  out.t = t;
  for (const auto& a : g.arcs)
    for (std::size_t k = 0; k + 1 < a.points.size(); ++k) {
      const auto &p = a.points[k], &q = a.points[k + 1];
      const double lo = std::min(p.t, q.t), hi = std::max(p.t, q.t);
      for (double tt = t + kTwoPi * std::floor((lo - t) / kTwoPi); tt <= hi; tt += kTwoPi) {
        if (tt < lo || p.t == q.t) continue;
        const double u = (tt - p.t) / (q.t - p.t);
        const double z = p.z + u * (q.z - p.z);
        // Half-open in z so shared endpoints count once.
        if (z < p.z || z >= q.z) continue;
        out.points.push_back({z >= 1.0 ? z - 2.0 : z, a.label});
      }
    }
  std::sort(out.points.begin(), out.points.end(),
            [](const SlicePoint& a, const SlicePoint& b) { return std::tie(a.z, a.label) < std::tie(b.z, b.label); });
  return out;
}

/// Gauss diagram of a slice: points sit on arc q of circle i in the order
/// they are met along the orientation of that arc.
inline GaussDiagram slice_to_gauss(const SliceSet& s, const ArcStructure& st) {
  std::vector<CrossingLabel> labels;
  std::vector<std::array<double, 2>> pos;
  auto place = [&](ArcRef r, double z) {
    const auto& info = st.at(r);
    const double span = info.z_hi - info.z_lo;
    const double f = info.direction > 0 ? (z - info.z_lo) / span : (info.z_hi - z) / span;
    return static_cast<double>(r.index - 1) + std::clamp(f, 0.0, 1.0);
  };
  for (const auto& p : s.points) {
    if (!st.valid(p.label.over) || !st.valid(p.label.under) || p.label.over == p.label.under)
      throw InconsistentLabels("label " + p.label.display(false) + " does not match the arc structure");
    auto lift = [&](ArcRef r) {
      const auto& info = st.at(r);
      double z = p.z;
      if (z < info.z_lo && z + 2.0 <= info.z_hi) z += 2.0;
      if (z < info.z_lo - 1e-9 || z > info.z_hi + 1e-9)
        throw InconsistentLabels("point " + p.label.display(false) + " lies outside arc " + std::to_string(r.index));
      return place(r, z);
    };
    labels.push_back(p.label);
    pos.push_back({lift(p.label.over), lift(p.label.under)});
  }
  return make_gauss_diagram(st.components(), labels, pos);
}

// ---------------------------------------------------------------------------
// Reconstruction

/// A planar diagram realizing the slice at t: strands ordered left to right in
/// the annulus, crossings at the slice heights.
inline PlanarDiagram reconstruct_diagram(const TraceGraph& g, double t) {
  const SliceSet s = slice(g, t);
  const auto& st = g.structure;
  // Sweep events in z: births at minima, deaths at maxima, crossings.
  struct Sweep {
    double z;
    int kind;  // 0 birth, 1 crossing, 2 death
    int a, b;
  };
  std::vector<Sweep> ev;
  std::vector<int> bottom;  // arcs alive at z = -1
  for (int id = 0; id < st.total(); ++id) {
    const auto& info = st.arcs[static_cast<std::size_t>(id)];
    if (info.z_lo == -1.0) bottom.push_back(id);
    // Register each extremum once, from the arc that ends there.
    if (info.end != ArcEnd::Seam) {
      const int nxt = st.id(st.next(info.ref));
      const bool max = info.end == ArcEnd::Maximum;
      ev.push_back({max ? info.z_hi : info.z_lo, max ? 2 : 0, id, nxt});
    }
  }
  for (const auto& p : s.points) {
    const int a = st.id(p.label.over), b = st.id(p.label.under);
    double z = p.z;
    const auto &ia = st.arcs[static_cast<std::size_t>(a)];
    if (z < ia.z_lo) z += 2.0;
    ev.push_back({z, 1, a, b});
  }
  std::sort(ev.begin(), ev.end(), [](const Sweep& x, const Sweep& y) { return std::tie(x.z, x.kind) < std::tie(y.z, y.kind); });

  // Successor across the seam for arcs reaching the top.
  auto across = [&](int id) {
    const auto& info = st.arcs[static_cast<std::size_t>(id)];
    const ArcRef r = info.direction > 0 ? st.next(info.ref) : st.prev(info.ref);
    return st.id(r);
  };

  std::vector<std::vector<int>> orders_at;  // order before each event
  std::vector<int> best;
  std::vector<std::vector<int>> trail;
  std::function<bool(std::vector<int>&, std::size_t)> dfs = [&](std::vector<int>& order, std::size_t k) -> bool {
    if (k == ev.size()) {
      std::vector<int> top;
      for (int id : order) top.push_back(across(id));
      if (top.size() != best.size()) return false;
      for (std::size_t i = 0; i < top.size(); ++i)
        if (top[i] != best[i]) return false;
      return true;
    }
    const auto& e = ev[k];
    auto find = [&](int id) { return static_cast<int>(std::find(order.begin(), order.end(), id) - order.begin()); };
    if (e.kind == 1) {
      const int i = find(e.a), j = find(e.b);
      if (i >= static_cast<int>(order.size()) || j >= static_cast<int>(order.size()) || std::abs(i - j) != 1) return false;
      trail.push_back(order);
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
      if (dfs(order, k + 1)) return true;
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
      trail.pop_back();
      return false;
    }
    if (e.kind == 2) {
      const int i = find(e.a), j = find(e.b);
      if (i >= static_cast<int>(order.size()) || j >= static_cast<int>(order.size()) || std::abs(i - j) != 1) return false;
      trail.push_back(order);
      auto saved = order;
      order.erase(order.begin() + std::max(i, j));
      order.erase(order.begin() + std::min(i, j));
      if (dfs(order, k + 1)) return true;
      order = saved;
      trail.pop_back();
      return false;
    }
    for (std::size_t pos = 0; pos <= order.size(); ++pos)
      for (int flip = 0; flip < 2; ++flip) {
        trail.push_back(order);
        auto saved = order;
        order.insert(order.begin() + static_cast<long>(pos), flip ? e.a : e.b);
        order.insert(order.begin() + static_cast<long>(pos), flip ? e.b : e.a);
        if (dfs(order, k + 1)) return true;
        order = saved;
        trail.pop_back();
      }
    return false;
  };

  std::vector<int> start = bottom;
  std::sort(start.begin(), start.end());
  bool found = false;
  std::vector<int> order;
  std::size_t guard = 0;
  do {
    best = start;
    order = start;
    trail.clear();
    if (dfs(order, 0)) {
      found = true;
      break;
    }
  } while (++guard < 50000 && std::next_permutation(start.begin(), start.end()));
  if (!found) throw NonRealizable("slice admits no planar realization in the annulus");

  PlanarDiagram pd;
  pd.t = s.t;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    if (ev[k].kind != 1) continue;
    const auto& ord = trail[k];
    const int i = static_cast<int>(std::find(ord.begin(), ord.end(), ev[k].a) - ord.begin());
    const int j = static_cast<int>(std::find(ord.begin(), ord.end(), ev[k].b) - ord.begin());
    const double w = 2.0 / static_cast<double>(ord.size() + 1);
    PlanarCrossing c;
    c.x = -1.0 + w * (0.5 * (i + j) + 1.0);
    c.z = ev[k].z >= 1.0 ? ev[k].z - 2.0 : ev[k].z;
    c.over_arc = ev[k].a;
    c.under_arc = ev[k].b;
    c.label = {st.arcs[static_cast<std::size_t>(ev[k].a)].ref, st.arcs[static_cast<std::size_t>(ev[k].b)].ref};
    auto place = [&](int id) {
      const auto& info = st.arcs[static_cast<std::size_t>(id)];
      const double span = info.z_hi - info.z_lo;
      const double f = info.direction > 0 ? (ev[k].z - info.z_lo) / span : (info.z_hi - ev[k].z) / span;
      return static_cast<double>(info.ref.index - 1) + std::clamp(f, 0.0, 1.0);
    };
    c.over_position = place(ev[k].a);
    c.under_position = place(ev[k].b);
    pd.crossings.push_back(c);
  }
  return pd;
}

/// Gauss diagram of a reconstructed diagram (positions are arc parameters).
inline GaussDiagram gauss_diagram(const ArcStructure& st, const PlanarDiagram& p) {
  std::vector<CrossingLabel> labels;
  std::vector<std::array<double, 2>> pos;
  for (const auto& x : p.crossings) {
    labels.push_back(x.label);
    pos.push_back({x.over_position, x.under_position});
  }
  return make_gauss_diagram(st.components(), labels, pos);
}

// ---------------------------------------------------------------------------
// File format

inline std::string to_string(ArcEnd e) {
  switch (e) {
    case ArcEnd::Maximum: return "MAX";
    case ArcEnd::Minimum: return "MIN";
    case ArcEnd::Seam: return "SEAM";
  }
  return "?";
}

inline std::string format_graph(const TraceGraph& g) {
  std::ostringstream out;
  const auto& st = g.structure;
  out << "TRACEGRAPH " << st.components() << "\n";
  for (int i = 0; i < st.components(); ++i) out << "COMPONENT " << i + 1 << " " << st.arcs_per_component[static_cast<std::size_t>(i)] << "\n";
  for (const auto& a : st.arcs)
    out << "ARCINFO " << a.ref.component << " " << a.ref.index << " " << a.direction << " " << format_double(a.z_lo) << " "
        << format_double(a.z_hi) << " " << to_string(a.start) << " " << to_string(a.end) << "\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& V = g.vertices[v];
    out << "VERTEX " << v << " " << to_string(V.kind) << " " << format_double(V.t) << " " << format_double(V.z);
    if (V.kind == VertexKind::TRIPLE) out << " " << V.sign;
    out << "\n";
  }
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const auto& A = g.arcs[a];
    out << "ARC " << a << " " << A.from << " " << A.to << " label over=(" << A.label.over.component << "," << A.label.over.index
        << ") under=(" << A.label.under.component << "," << A.label.under.index << ")\n";
  }
  for (std::size_t a = 0; a < g.arcs.size(); ++a)
    for (const auto& p : g.arcs[a].points) out << "POINT " << a << " " << format_double(p.t) << " " << format_double(p.z) << "\n";
  return out.str();
}

inline TraceGraph parse_graph(const std::string& text, const std::string& source = "<graph>") {
  TraceGraph g;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& what) { throw ParseError(source, lineno, what); };
  auto num = [&](const std::string& tok) {
    auto v = parse_double(tok);
    if (!v) fail("bad number '" + tok + "'");
    return *v;
  };
  auto integer = [&](const std::string& tok) {
    auto v = parse_long(tok);
    if (!v) fail("bad integer '" + tok + "'");
    return static_cast<int>(*v);
  };
  auto arc_end = [&](const std::string& tok) {
    if (tok == "MAX") return ArcEnd::Maximum;
    if (tok == "MIN") return ArcEnd::Minimum;
    if (tok == "SEAM") return ArcEnd::Seam;
    fail("bad arc end '" + tok + "'");
    return ArcEnd::Seam;
  };
  auto ref = [&](const std::string& tok, const std::string& key) {
    const std::string pre = key + "=(";
    if (tok.rfind(pre, 0) != 0 || tok.back() != ')') fail("expected " + key + "=(i,q)");
    const std::string body = tok.substr(pre.size(), tok.size() - pre.size() - 1);
    const auto comma = body.find(',');
    if (comma == std::string::npos) fail("expected " + key + "=(i,q)");
    return ArcRef{integer(body.substr(0, comma)), integer(body.substr(comma + 1))};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "TRACEGRAPH") {
      if (tok.size() != 2) fail("expected TRACEGRAPH m");
      g.structure.arcs_per_component.assign(static_cast<std::size_t>(integer(tok[1])), 0);
      header = true;
      continue;
    }
    if (!header) fail("missing TRACEGRAPH header");
    if (key == "COMPONENT") {
      if (tok.size() != 3) fail("expected COMPONENT i n_i");
      const int i = integer(tok[1]);
      if (i < 1 || i > g.structure.components()) fail("component out of range");
      g.structure.arcs_per_component[static_cast<std::size_t>(i - 1)] = integer(tok[2]);
    } else if (key == "ARCINFO") {
      if (tok.size() != 8) fail("expected ARCINFO i q dir z_lo z_hi start end");
      g.structure.arcs.push_back({{integer(tok[1]), integer(tok[2])}, integer(tok[3]), num(tok[4]), num(tok[5]),
                                  arc_end(tok[6]), arc_end(tok[7])});
    } else if (key == "VERTEX") {
      if (tok.size() != 5 && tok.size() != 6) fail("expected VERTEX id kind t z [sign]");
      if (integer(tok[1]) != static_cast<int>(g.vertices.size())) fail("vertex ids must be consecutive");
      auto kind = parse_vertex_kind(tok[2]);
      if (!kind) fail("unknown vertex kind '" + tok[2] + "'");
      TVertex v{*kind, num(tok[3]), num(tok[4]), 0};
      if (tok.size() == 6) v.sign = integer(tok[5]);
      g.vertices.push_back(v);
    } else if (key == "ARC") {
      if (tok.size() != 7 || tok[4] != "label") fail("expected ARC id v_from v_to label over=(i,q) under=(j,s)");
      if (integer(tok[1]) != static_cast<int>(g.arcs.size())) fail("arc ids must be consecutive");
      TArc a;
      a.from = integer(tok[2]);
      a.to = integer(tok[3]);
      a.label = {ref(tok[5], "over"), ref(tok[6], "under")};
      g.arcs.push_back(a);
    } else if (key == "POINT") {
      if (tok.size() != 4) fail("expected POINT arc_id t z");
      const int a = integer(tok[1]);
      if (a < 0 || a >= static_cast<int>(g.arcs.size())) fail("point on unknown arc");
      g.arcs[static_cast<std::size_t>(a)].points.push_back({num(tok[2]), num(tok[3])});
    } else {
      fail("unknown record '" + key + "'");
    }
  }
  if (!header) throw ParseError(source, lineno, "missing TRACEGRAPH header");
  int expect = 0;
  for (int n : g.structure.arcs_per_component) expect += n;
  if (expect != g.structure.total()) throw ParseError(source, lineno, "ARCINFO count does not match COMPONENT records");
  for (const auto& a : g.arcs)
    if (a.from >= static_cast<int>(g.vertices.size()) || a.to >= static_cast<int>(g.vertices.size()))
      throw ParseError(source, lineno, "arc references an unknown vertex");
  return g;
}

inline TraceGraph load_graph(const std::string& path) { return parse_graph(read_text_file(path), path); }
inline void save_graph(const std::string& path, const TraceGraph& g) { write_text_file(path, format_graph(g)); }

inline bool operator==(const TVertex& a, const TVertex& b) {
  return a.kind == b.kind && a.t == b.t && a.z == b.z && a.sign == b.sign;
}
inline bool operator==(const TArc& a, const TArc& b) {
  return a.from == b.from && a.to == b.to && a.label == b.label && a.points == b.points;
}
inline bool operator==(const TraceGraph& a, const TraceGraph& b) {
  return a.structure == b.structure && a.vertices == b.vertices && a.arcs == b.arcs;
}

// ---------------------------------------------------------------------------
// Fault injection

enum class MutationFault { LabelFlip, DeletedHanging, BrokenSymmetry, NonMonotonicArc, DuplicateVertexTime, BadTriplet };

inline const std::array<MutationFault, 6>& all_faults() {
  static const std::array<MutationFault, 6> f{MutationFault::LabelFlip,       MutationFault::DeletedHanging,
                                              MutationFault::BrokenSymmetry,  MutationFault::NonMonotonicArc,
                                              MutationFault::DuplicateVertexTime, MutationFault::BadTriplet};
  return f;
}

inline std::string to_string(MutationFault f) {
  switch (f) {
    case MutationFault::LabelFlip: return "label flip";
    case MutationFault::DeletedHanging: return "deleted hanging vertex";
    case MutationFault::BrokenSymmetry: return "broken symmetry";
    case MutationFault::NonMonotonicArc: return "non-monotonic arc";
    case MutationFault::DuplicateVertexTime: return "duplicate vertex time";
    case MutationFault::BadTriplet: return "bad triple triplet";
  }
  return "?";
}

/// A copy of `g` with one fault injected. Throws Error when `g` has no place
/// for the fault (e.g. no hanging vertex).
inline TraceGraph inject_fault(TraceGraph g, MutationFault f) {
  auto first_vertex = [&](auto pred) {
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
      if (pred(g.vertices[v])) return static_cast<int>(v);
    throw Error("graph has no vertex for the fault '" + to_string(f) + "'");
  };
  auto incident = [&](int v) {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < g.arcs.size(); ++a)
      if (g.arcs[a].from == v || g.arcs[a].to == v) out.push_back(a);
    return out;
  };
  switch (f) {
    case MutationFault::LabelFlip: {
      if (g.arcs.empty()) throw Error("graph has no arc to flip");
      g.arcs.front().label = g.arcs.front().label.reversed();
      break;
    }
    case MutationFault::DeletedHanging: {
      const int v = first_vertex([](const TVertex& x) { return x.kind == VertexKind::HANGING; });
      const auto inc = incident(v);
      for (auto it = inc.rbegin(); it != inc.rend(); ++it) g.arcs.erase(g.arcs.begin() + static_cast<long>(*it));
      g.vertices.erase(g.vertices.begin() + v);
      for (auto& a : g.arcs) {
        if (a.from > v) --a.from;
        if (a.to > v) --a.to;
      }
      break;
    }
    case MutationFault::BrokenSymmetry: {
      const int v = first_vertex([](const TVertex& x) { return x.kind != VertexKind::SEAM; });
      const double d = 1e-3;
      g.vertices[static_cast<std::size_t>(v)].t = wrap_angle(g.vertices[static_cast<std::size_t>(v)].t + d);
      for (auto a : incident(v)) {
        auto& A = g.arcs[a];
        if (A.from == v) A.points.front().t += d;
        if (A.to == v) A.points.back().t += d;
      }
      break;
    }
    case MutationFault::NonMonotonicArc: {
      if (g.arcs.empty()) throw Error("graph has no arc to bend");
      auto& pts = g.arcs.front().points;
      const TPoint lo = pts.front(), hi = pts.back();
      // A zig-zag in z between the two ends.
      pts = {lo, {lo.t + 0.25 * (hi.t - lo.t), lo.z + 0.75 * (hi.z - lo.z)},
             {lo.t + 0.5 * (hi.t - lo.t), lo.z + 0.25 * (hi.z - lo.z)}, hi};
      break;
    }
    case MutationFault::DuplicateVertexTime: {
      const int v = first_vertex([](const TVertex& x) { return x.kind != VertexKind::SEAM; });
      int w = -1;
      for (std::size_t k = 0; k < g.vertices.size(); ++k)
        if (static_cast<int>(k) != v && g.vertices[k].kind != VertexKind::SEAM) w = static_cast<int>(k);
      if (w < 0) throw Error("graph needs two vertices for the fault '" + to_string(f) + "'");
      auto& W = g.vertices[static_cast<std::size_t>(w)];
      const double d = angle_diff(W.t, g.vertices[static_cast<std::size_t>(v)].t);
      W.t = g.vertices[static_cast<std::size_t>(v)].t;
      for (auto a : incident(w)) {
        auto& A = g.arcs[a];
        if (A.from == w) A.points.front().t += d;
        if (A.to == w) A.points.back().t += d;
      }
      break;
    }
    case MutationFault::BadTriplet: {
      const int v = first_vertex([](const TVertex& x) { return x.kind == VertexKind::TRIPLE; });
      const auto inc = incident(v);
      const CrossingLabel old = g.arcs[inc.front()].label;
      // Reverse one of the three crossing curves through the vertex.
      for (auto a : inc)
        if (g.arcs[a].label == old) g.arcs[a].label = old.reversed();
      break;
    }
  }
  return g;
}

}  // namespace tgraph
