#pragma once

// Sampled links in the solid torus V = D_xy x S^1_z, their rotation about the
// core circle, projection to the annulus A_xz, monotone arc decomposition and
// Gauss diagrams.
//
// Conventions:
//  * z lives on the circle [-1, 1) with -1 ~ 1.
//  * rot_t maps (x, y, z) to (x cos t - y sin t, x sin t + y cos t, z).
//  * The viewer of pr_xz sits at y -> -inf: at a crossing the point with the
//    smaller rotated y is the over-strand.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tgraph/errors.hpp"
#include "tgraph/numeric.hpp"

namespace tgraph {

struct Point3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

struct Point2 {
  double x = 0, y = 0;
};

inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

/// Rotated x coordinate of a horizontal point.
inline double rotated_x(Point2 p, double t) { return p.x * std::cos(t) - p.y * std::sin(t); }
inline double rotated_y(Point2 p, double t) { return p.x * std::sin(t) + p.y * std::cos(t); }

/// The time t in [0, 2pi) at which the horizontal chord c points straight
/// away from the viewer, so its start is the over-point. The reverse order
/// happens at t + pi.
inline double view_time(Point2 c) { return wrap_angle(std::atan2(c.x, c.y)); }

struct SampledLink {
  std::vector<std::vector<Point3>> components;

  friend bool operator==(const SampledLink&, const SampledLink&) = default;

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size();
    return n;
  }
};

/// (component, arc) with both indices 1-based.
struct ArcRef {
  int component = 1;
  int index = 1;
  friend auto operator<=>(const ArcRef&, const ArcRef&) = default;
};

struct CrossingLabel {
  ArcRef over;
  ArcRef under;

  friend auto operator<=>(const CrossingLabel&, const CrossingLabel&) = default;

  CrossingLabel reversed() const { return {under, over}; }

  /// "(q s)" for knots, "(q_i s_j)" otherwise.
  std::string display(bool knot) const {
    if (knot) return "(" + std::to_string(over.index) + " " + std::to_string(under.index) + ")";
    return "(" + std::to_string(over.index) + "_" + std::to_string(over.component) + " " +
           std::to_string(under.index) + "_" + std::to_string(under.component) + ")";
  }
};

enum class ArcEnd { Maximum, Minimum, Seam };

/// A maximal z-monotone run of one component. Heights are unwrapped so the
/// whole arc lies inside [-1, 1].
struct MonotoneArc {
  ArcRef ref;
  int direction = 1;  // +1 when z increases along the orientation
  ArcEnd start = ArcEnd::Seam;
  ArcEnd end = ArcEnd::Seam;
  int start_extremum = -1;  // index into ArcDecomposition::extrema, or -1
  int end_extremum = -1;
  // Nodes sorted by ascending z.
  std::vector<double> z;
  std::vector<Point2> xy;
  std::vector<double> position;  // component parameter (sample index + fraction), unwrapped

  double z_lo() const { return z.front(); }
  double z_hi() const { return z.back(); }

  std::size_t piece(double h) const {
    auto it = std::upper_bound(z.begin(), z.end(), h);
    std::size_t k = it == z.begin() ? 0 : static_cast<std::size_t>(it - z.begin()) - 1;
    return std::min(k, z.size() - 2);
  }

  Point2 at(double h) const {
    const std::size_t k = piece(h);
    const double s = (h - z[k]) / (z[k + 1] - z[k]);
    // Exact at the nodes, so arcs meeting at an extremum agree there.
    return {(1 - s) * xy[k].x + s * xy[k + 1].x, (1 - s) * xy[k].y + s * xy[k + 1].y};
  }

  /// dxy/dz on the piece containing h (from above when `upper`).
  Point2 slope(double h, bool upper = true) const {
    auto it = upper ? std::upper_bound(z.begin(), z.end(), h) : std::lower_bound(z.begin(), z.end(), h);
    std::size_t k = it == z.begin() ? 0 : static_cast<std::size_t>(it - z.begin()) - 1;
    k = std::min(k, z.size() - 2);
    const double dz = z[k + 1] - z[k];
    return {(xy[k + 1].x - xy[k].x) / dz, (xy[k + 1].y - xy[k].y) / dz};
  }

  double position_at(double h) const {
    const std::size_t k = piece(h);
    const double s = (h - z[k]) / (z[k + 1] - z[k]);
    return position[k] + s * (position[k + 1] - position[k]);
  }
};

struct Extremum {
  int component = 0;  // 0-based
  std::size_t sample = 0;
  bool maximum = true;
  double z = 0;
  Point2 xy;
  int arc_in = -1;   // arc ending at the extremum (along orientation)
  int arc_out = -1;  // arc starting at it
};

struct ArcDecomposition {
  std::vector<MonotoneArc> arcs;
  std::vector<int> arcs_per_component;  // n_i
  std::vector<int> first_arc;           // global id of arc 1 of each component
  std::vector<Extremum> extrema;
  std::vector<std::size_t> samples_per_component;

  int total_arcs() const { return static_cast<int>(arcs.size()); }
  int half_extrema() const { return static_cast<int>(extrema.size()) / 2; }
  int components() const { return static_cast<int>(arcs_per_component.size()); }

  int arc_id(ArcRef r) const { return first_arc[static_cast<std::size_t>(r.component - 1)] + r.index - 1; }

  /// Successor arc along the orientation.
  int next_arc(int id) const {
    const auto& r = arcs[static_cast<std::size_t>(id)].ref;
    const int n = arcs_per_component[static_cast<std::size_t>(r.component - 1)];
    return arc_id({r.component, r.index % n + 1});
  }
};

inline SampledLink rotate(const SampledLink& link, double t) {
  const double c = std::cos(t), s = std::sin(t);
  SampledLink out;
  for (const auto& comp : link.components) {
    auto& oc = out.components.emplace_back();
    oc.reserve(comp.size());
    for (const auto& p : comp) oc.push_back({p.x * c - p.y * s, p.x * s + p.y * c, p.z});
  }
  return out;
}

/// Samples a closed curve f : [0, 1) -> V at n equally spaced parameters.
/// Heights are wrapped onto [-1, 1).
template <class F>
std::vector<Point3> sample_curve(F&& f, std::size_t n) {
  std::vector<Point3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Point3 p = f(static_cast<double>(k) / static_cast<double>(n));
    p.z = wrap_z(p.z);
    out.push_back(p);
  }
  return out;
}

inline void validate_link(const SampledLink& link) {
  if (link.components.empty()) throw InvalidLink("link has no components");
  for (std::size_t ci = 0; ci < link.components.size(); ++ci) {
    const auto& comp = link.components[ci];
    const std::string where = "component " + std::to_string(ci + 1);
    if (comp.size() < 3) throw InvalidLink(where + ": fewer than 3 samples");
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const auto& p = comp[k];
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw InvalidLink(where + ": non-finite sample");
      if (p.x * p.x + p.y * p.y > 1.0 + 1e-12) throw InvalidLink(where + ": sample outside the unit disk");
      if (p.z < -1.0 || p.z >= 1.0) throw InvalidLink(where + ": z outside [-1, 1)");
      const auto& q = comp[(k + 1) % comp.size()];
      const double dz = wrap_dz(q.z - p.z);
      if (p.x == q.x && p.y == q.y && dz == 0.0) throw InvalidLink(where + ": repeated sample");
      if (dz == 0.0) throw InvalidLink(where + ": degenerate flat segment at sample " + std::to_string(k));
      if (std::abs(dz) >= 0.5) throw InvalidLink(where + ": samples too sparse at sample " + std::to_string(k));
    }
  }
}

inline ArcDecomposition arc_decomposition(const SampledLink& link) {
  validate_link(link);
  ArcDecomposition out;
  for (std::size_t ci = 0; ci < link.components.size(); ++ci) {
    const auto& comp = link.components[ci];
    const std::size_t n = comp.size();
    out.samples_per_component.push_back(n);
    std::vector<double> dz(n);
    for (std::size_t k = 0; k < n; ++k) dz[k] = wrap_dz(comp[(k + 1) % n].z - comp[k].z);

    // Split points: (position, kind, extremum index).
    struct Split {
      double pos;
      ArcEnd kind;
      int extremum;
    };
    std::vector<Split> splits;
    for (std::size_t k = 0; k < n; ++k) {
      const double before = dz[(k + n - 1) % n];
      if ((before > 0) != (dz[k] > 0)) {
        Extremum e;
        e.component = static_cast<int>(ci);
        e.sample = k;
        e.maximum = before > 0;
        e.z = comp[k].z;
        e.xy = {comp[k].x, comp[k].y};
        out.extrema.push_back(e);
        splits.push_back({static_cast<double>(k), e.maximum ? ArcEnd::Maximum : ArcEnd::Minimum,
                          static_cast<int>(out.extrema.size()) - 1});
      }
      const double z0 = comp[k].z, z1 = z0 + dz[k];
      if (dz[k] > 0 && z1 >= 1.0) {
        double s = (1.0 - z0) / dz[k];
        splits.push_back({s >= 1.0 ? static_cast<double>((k + 1) % n) : static_cast<double>(k) + s, ArcEnd::Seam, -1});
      } else if (dz[k] < 0 && z1 < -1.0) {
        const double s = (-1.0 - z0) / dz[k];
        splits.push_back({static_cast<double>(k) + s, ArcEnd::Seam, -1});
      }
    }
    if (splits.empty()) throw InvalidLink("component " + std::to_string(ci + 1) + " has no monotone structure");
    std::sort(splits.begin(), splits.end(), [](const Split& a, const Split& b) { return a.pos < b.pos; });
    for (std::size_t k = 1; k < splits.size(); ++k)
      if (splits[k].pos - splits[k - 1].pos <= 0.0)
        throw InvalidLink("component " + std::to_string(ci + 1) + ": extremum on the seam");

    const int narcs = static_cast<int>(splits.size());
    out.first_arc.push_back(static_cast<int>(out.arcs.size()));
    out.arcs_per_component.push_back(narcs);
    for (int q = 0; q < narcs; ++q) {
      const Split& a = splits[static_cast<std::size_t>(q)];
      const Split& b = splits[static_cast<std::size_t>((q + 1) % narcs)];
      double end_pos = b.pos;
      if (end_pos <= a.pos) end_pos += static_cast<double>(n);

      MonotoneArc arc;
      arc.ref = {static_cast<int>(ci) + 1, q + 1};
      arc.start = a.kind;
      arc.end = b.kind;
      arc.start_extremum = a.extremum;
      arc.end_extremum = b.extremum;

      // Walk from a.pos to end_pos collecting nodes along the orientation.
      auto point_at = [&](double pos) {
        const double wpos = std::fmod(pos, static_cast<double>(n));
        std::size_t k = static_cast<std::size_t>(std::floor(wpos));
        if (k >= n) k = n - 1;
        const double s = wpos - static_cast<double>(k);
        const auto& p = comp[k];
        const auto& q2 = comp[(k + 1) % n];
        return std::tuple<Point2, double>{Point2{p.x + s * (q2.x - p.x), p.y + s * (q2.y - p.y)}, s * dz[k]};
      };
      std::vector<double> pos{a.pos};
      for (double k = std::floor(a.pos) + 1.0; k < end_pos; k += 1.0) pos.push_back(k);
      pos.push_back(end_pos);

      const int dir = dz[static_cast<std::size_t>(std::floor(std::fmod(a.pos, static_cast<double>(n))))] > 0 ? 1 : -1;
      double h0;
      if (a.kind == ArcEnd::Seam)
        h0 = dir > 0 ? -1.0 : 1.0;
      else
        h0 = comp[static_cast<std::size_t>(a.pos)].z;
      std::vector<double> hs{h0};
      std::vector<Point2> pts{std::get<0>(point_at(a.pos))};
      for (std::size_t m = 1; m < pos.size(); ++m) {
        const double p0 = pos[m - 1], p1 = pos[m];
        const std::size_t k0 = static_cast<std::size_t>(std::floor(p0)) % n;
        const double frac0 = p0 - std::floor(p0);
        const double frac1 = p1 - std::floor(p0);  // in (0, 1]
        hs.push_back(hs.back() + (frac1 - frac0) * dz[k0]);
        pts.push_back(std::get<0>(point_at(p1)));
      }
      if (b.kind == ArcEnd::Seam)
        hs.back() = dir > 0 ? 1.0 : -1.0;
      else
        hs.back() = comp[static_cast<std::size_t>(std::fmod(end_pos, static_cast<double>(n)))].z;
      arc.direction = dir;
      if (dir < 0) {
        std::reverse(hs.begin(), hs.end());
        std::reverse(pts.begin(), pts.end());
        std::reverse(pos.begin(), pos.end());
      }
      // Drop zero-length pieces produced by splits that fall on samples.
      MonotoneArc& A = arc;
      for (std::size_t m = 0; m < hs.size(); ++m) {
        if (!A.z.empty() && hs[m] <= A.z.back()) {
          if (hs[m] == A.z.back()) continue;
          throw InvalidLink("component " + std::to_string(ci + 1) + ": arc is not monotone");
        }
        A.z.push_back(hs[m]);
        A.xy.push_back(pts[m]);
        A.position.push_back(pos[m]);
      }
      if (A.z.size() < 2) throw InvalidLink("component " + std::to_string(ci + 1) + ": degenerate arc");
      out.arcs.push_back(std::move(arc));
    }
    for (int q = 0; q < narcs; ++q) {
      const int id = out.first_arc.back() + q;
      const auto& arc = out.arcs[static_cast<std::size_t>(id)];
      if (arc.end_extremum >= 0) out.extrema[static_cast<std::size_t>(arc.end_extremum)].arc_in = id;
      if (arc.start_extremum >= 0) out.extrema[static_cast<std::size_t>(arc.start_extremum)].arc_out = id;
    }
  }
  for (const auto& e : out.extrema)
    if (e.arc_in < 0 || e.arc_out < 0) throw InvalidLink("extremum without adjacent arcs");
  return out;
}


/// Two extrema at the same height (within tol on the z-circle).
inline bool has_extreme_pair(const ArcDecomposition& d, double tol = 1e-9) {
  for (std::size_t a = 0; a < d.extrema.size(); ++a)
    for (std::size_t b = a + 1; b < d.extrema.size(); ++b)
      if (std::abs(wrap_dz(d.extrema[a].z - d.extrema[b].z)) < tol) return true;
  return false;
}

struct PlanarCrossing {
  double x = 0;
  double z = 0;
  int over_arc = -1;
  int under_arc = -1;
  CrossingLabel label;
  double over_position = 0;   // component parameter, reduced mod sample count
  double under_position = 0;
};

struct PlanarDiagram {
  double t = 0;
  std::vector<PlanarCrossing> crossings;
};

namespace detail {

inline bool share_extremum(const MonotoneArc& a, const MonotoneArc& b) {
  auto has = [](const MonotoneArc& m, int e) { return e >= 0 && (m.start_extremum == e || m.end_extremum == e); };
  return has(b, a.start_extremum) || has(b, a.end_extremum);
}

}  // namespace detail

/// Crossings of pr_xz(rot_t(L)). Throws NonGenericSlice when t is too close
/// to an event for the crossings to be well defined.
inline PlanarDiagram project_diagram(const ArcDecomposition& d, double t, double eps = 1e-10) {
  PlanarDiagram out;
  out.t = t;
  const double c = std::cos(t), s = std::sin(t);
  auto rx = [&](Point2 p) { return p.x * c - p.y * s; };
  auto ry = [&](Point2 p) { return p.x * s + p.y * c; };

  const int na = d.total_arcs();
  for (int ia = 0; ia < na; ++ia) {
    const auto& A = d.arcs[static_cast<std::size_t>(ia)];
    for (int ib = ia + 1; ib < na; ++ib) {
      const auto& B = d.arcs[static_cast<std::size_t>(ib)];
      const double lo = std::max(A.z_lo(), B.z_lo());
      const double hi = std::min(A.z_hi(), B.z_hi());
      if (hi <= lo) continue;
      std::vector<double> hs{lo, hi};
      for (double h : A.z)
        if (h > lo && h < hi) hs.push_back(h);
      for (double h : B.z)
        if (h > lo && h < hi) hs.push_back(h);
      std::sort(hs.begin(), hs.end());
      hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
      std::vector<double> ds(hs.size());
      for (std::size_t k = 0; k < hs.size(); ++k) ds[k] = rx(A.at(hs[k])) - rx(B.at(hs[k]));

      const bool shared = detail::share_extremum(A, B);
      auto emit = [&](double h) {
        const Point2 pa = A.at(h), pb = B.at(h);
        const double ya = ry(pa), yb = ry(pb);
        if (ya == yb) throw InvalidLink("strands intersect at z = " + format_double(h));
        const bool a_over = ya < yb;
        PlanarCrossing x;
        x.x = 0.5 * (rx(pa) + rx(pb));
        x.z = h;
        x.over_arc = a_over ? ia : ib;
        x.under_arc = a_over ? ib : ia;
        const auto& O = d.arcs[static_cast<std::size_t>(x.over_arc)];
        const auto& U = d.arcs[static_cast<std::size_t>(x.under_arc)];
        x.label = {O.ref, U.ref};
        const auto no = static_cast<double>(d.samples_per_component[static_cast<std::size_t>(O.ref.component - 1)]);
        const auto nu = static_cast<double>(d.samples_per_component[static_cast<std::size_t>(U.ref.component - 1)]);
        x.over_position = std::fmod(O.position_at(h), no);
        x.under_position = std::fmod(U.position_at(h), nu);
        out.crossings.push_back(x);
      };

      const std::size_t m = hs.size();
      for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(ds[k]) > eps) continue;
        const bool endpoint = k == 0 || k + 1 == m;
        if (endpoint && shared) {
          const std::size_t nb = k == 0 ? 1 : m - 2;
          if (std::abs(ds[nb]) <= eps) throw NonGenericSlice("overlapping strands near a cusp");
          continue;
        }
        if (endpoint) throw NonGenericSlice("crossing at an arc end, z = " + format_double(hs[k]));
        if (std::abs(ds[k - 1]) <= eps || std::abs(ds[k + 1]) <= eps || (ds[k - 1] > 0) == (ds[k + 1] > 0))
          throw NonGenericSlice("non-transverse crossing at z = " + format_double(hs[k]));
        emit(hs[k]);
      }
      for (std::size_t k = 0; k + 1 < m; ++k) {
        if (std::abs(ds[k]) <= eps || std::abs(ds[k + 1]) <= eps) continue;
        if ((ds[k] > 0) == (ds[k + 1] > 0)) continue;
        emit(hs[k] + (hs[k + 1] - hs[k]) * ds[k] / (ds[k] - ds[k + 1]));
      }
    }
  }
  std::sort(out.crossings.begin(), out.crossings.end(),
            [](const PlanarCrossing& a, const PlanarCrossing& b) { return std::tie(a.z, a.x) < std::tie(b.z, b.x); });
  const auto& cs = out.crossings;
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a + 1; b < cs.size() && cs[b].z - cs[a].z <= eps; ++b)
      if (std::abs(cs[b].x - cs[a].x) <= eps) throw NonGenericSlice("triple point at z = " + format_double(cs[a].z));
  return out;
}

inline PlanarDiagram project_diagram(const SampledLink& link, double t, double eps = 1e-10) {
  return project_diagram(arc_decomposition(link), t, eps);
}

/// Gauss diagram: one circle per component, each chord a labelled crossing.
struct GaussEndpoint {
  int chord = 0;
  bool over = false;
  friend bool operator==(const GaussEndpoint&, const GaussEndpoint&) = default;
};

struct GaussDiagram {
  std::vector<std::vector<GaussEndpoint>> circles;
  std::vector<CrossingLabel> chords;
};

/// Endpoints sorted along each component by the parameter in `positions`.
inline GaussDiagram make_gauss_diagram(int components, const std::vector<CrossingLabel>& labels,
                                       const std::vector<std::array<double, 2>>& positions) {
  GaussDiagram g;
  g.circles.resize(static_cast<std::size_t>(components));
  g.chords = labels;
  std::vector<std::vector<std::pair<double, GaussEndpoint>>> tmp(g.circles.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    tmp[static_cast<std::size_t>(labels[k].over.component - 1)].push_back({positions[k][0], {static_cast<int>(k), true}});
    tmp[static_cast<std::size_t>(labels[k].under.component - 1)].push_back({positions[k][1], {static_cast<int>(k), false}});
  }
  for (std::size_t c = 0; c < tmp.size(); ++c) {
    std::stable_sort(tmp[c].begin(), tmp[c].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [p, e] : tmp[c]) g.circles[c].push_back(e);
  }
  return g;
}

inline GaussDiagram gauss_diagram(const ArcDecomposition& d, const PlanarDiagram& p) {
  std::vector<CrossingLabel> labels;
  std::vector<std::array<double, 2>> pos;
  for (const auto& x : p.crossings) {
    labels.push_back(x.label);
    pos.push_back({x.over_position, x.under_position});
  }
  return make_gauss_diagram(d.components(), labels, pos);
}

/// Encoding invariant under rotation of each circle and renumbering of chords.
inline std::vector<int> canonical_gauss(const GaussDiagram& g) {
  using Token = std::array<int, 5>;
  auto token = [&](const GaussEndpoint& e) {
    const auto& l = g.chords[static_cast<std::size_t>(e.chord)];
    return Token{e.over ? 1 : 0, l.over.component, l.over.index, l.under.component, l.under.index};
  };
  // Minimal rotations of each circle under the label-only token order.
  std::vector<std::vector<std::size_t>> starts(g.circles.size());
  for (std::size_t c = 0; c < g.circles.size(); ++c) {
    const auto& circ = g.circles[c];
    const std::size_t n = circ.size();
    if (n == 0) {
      starts[c] = {0};
      continue;
    }
    std::vector<Token> toks;
    for (const auto& e : circ) toks.push_back(token(e));
    std::vector<Token> best;
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<Token> rot;
      for (std::size_t k = 0; k < n; ++k) rot.push_back(toks[(r + k) % n]);
      if (best.empty() || rot < best) {
        best = rot;
        starts[c] = {r};
      } else if (rot == best) {
        starts[c].push_back(r);
      }
    }
  }
  std::vector<int> best;
  std::vector<std::size_t> choice(g.circles.size(), 0);
  for (std::size_t guard = 0; guard < 4096; ++guard) {
    std::vector<int> code;
    std::vector<int> number(g.chords.size(), -1);
    int next = 0;
    for (std::size_t c = 0; c < g.circles.size(); ++c) {
      const auto& circ = g.circles[c];
      code.push_back(-1 - static_cast<int>(circ.size()));
      for (std::size_t k = 0; k < circ.size(); ++k) {
        const auto& e = circ[(starts[c][choice[c]] + k) % circ.size()];
        auto& num = number[static_cast<std::size_t>(e.chord)];
        if (num < 0) num = next++;
        const Token t = token(e);
        code.push_back(num);
        code.insert(code.end(), t.begin(), t.end());
      }
    }
    if (best.empty() || code < best) best = code;
    std::size_t c = 0;
    for (; c < choice.size(); ++c) {
      if (++choice[c] < starts[c].size()) break;
      choice[c] = 0;
    }
    if (c == choice.size()) break;
  }
  return best;
}

inline bool equivalent(const GaussDiagram& a, const GaussDiagram& b) {
  return a.circles.size() == b.circles.size() && canonical_gauss(a) == canonical_gauss(b);
}

/// Same diagram with arc indices of each component shifted cyclically.
inline GaussDiagram shift_arc_labels(GaussDiagram g, const std::vector<int>& shift, const std::vector<int>& arcs) {
  auto fix = [&](ArcRef& r) {
    const auto c = static_cast<std::size_t>(r.component - 1);
    r.index = (r.index - 1 + shift[c]) % arcs[c] + 1;
  };
  for (auto& l : g.chords) {
    fix(l.over);
    fix(l.under);
  }
  return g;
}

/// Equivalence allowing the arc numbering of each component to start at a
/// different arc. `arcs` holds the arc count per component.
inline bool equivalent_up_to_arc_shift(const GaussDiagram& a, const GaussDiagram& b, const std::vector<int>& arcs) {
  if (a.circles.size() != b.circles.size() || a.circles.size() != arcs.size()) return false;
  const auto ca = canonical_gauss(a);
  std::vector<int> shift(arcs.size(), 0);
  while (true) {
    if (canonical_gauss(shift_arc_labels(b, shift, arcs)) == ca) return true;
    std::size_t c = 0;
    for (; c < shift.size(); ++c) {
      if (++shift[c] < arcs[c]) break;
      shift[c] = 0;
    }
    if (c == shift.size()) return false;
  }
}

// Link file: "component k" headers followed by "x y z" lines. '#' starts a comment.
inline SampledLink parse_link(const std::string& text, const std::string& source = "<link>") {
  SampledLink link;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty()) continue;
    if (f[0] == "component") {
      if (f.size() != 2) throw ParseError(source, lineno, "expected 'component <k>'");
      auto k = parse_long(f[1]);
      if (!k || *k != static_cast<long>(link.components.size()) + 1)
        throw ParseError(source, lineno, "components must be numbered 1, 2, ... in order");
      link.components.emplace_back();
      continue;
    }
    if (link.components.empty()) throw ParseError(source, lineno, "sample before any component header");
    if (f.size() != 3) throw ParseError(source, lineno, "expected 'x y z'");
    Point3 p;
    double* dst[3] = {&p.x, &p.y, &p.z};
    for (int k = 0; k < 3; ++k) {
      auto v = parse_double(f[static_cast<std::size_t>(k)]);
      if (!v) throw ParseError(source, lineno, "bad number '" + f[static_cast<std::size_t>(k)] + "'");
      *dst[k] = *v;
    }
    link.components.back().push_back(p);
  }
  if (link.components.empty()) throw ParseError(source, lineno, "no components");
  return link;
}

inline std::string format_link(const SampledLink& link) {
  std::string out;
  for (std::size_t c = 0; c < link.components.size(); ++c) {
    out += "component " + std::to_string(c + 1) + "\n";
    for (const auto& p : link.components[c])
      out += format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes regular files through a temporary sibling renamed over the target.
inline void write_text_file(const std::string& path, const std::string& text) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && !std::filesystem::is_regular_file(path, ec)) {
    std::ofstream out(path, std::ios::binary);
    if (!(out << text)) throw Error("cannot write " + path);
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out.flush()) throw Error("cannot write " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot write " + path);
  }
}

inline SampledLink load_link(const std::string& path) { return parse_link(read_text_file(path), path); }
inline void save_link(const std::string& path, const SampledLink& link) { write_text_file(path, format_link(link)); }

}  // namespace tgraph
