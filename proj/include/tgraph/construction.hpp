#pragma once

// Trace graph builders: numerically from a sampled link through its events,
// and from a braid word through an explicit block scheme for the closed braid.

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "tgraph/braid.hpp"
#include "tgraph/errors.hpp"
#include "tgraph/event_detection.hpp"
#include "tgraph/link_geometry.hpp"
#include "tgraph/numeric.hpp"
#include "tgraph/trace_graph.hpp"

namespace tgraph {

struct PredictedCounts {
  long triple = 0;
  long critical = 0;
  long hanging = 0;
  friend bool operator==(const PredictedCounts&, const PredictedCounts&) = default;
};

inline PredictedCounts predicted_counts(long l, long n, long e) {
  if (l < 0 || n < 1 || e < 0 || 2 * e > n) throw Error("predicted_counts: need l >= 0, n >= 1, 0 <= 2e <= n");
  return {2 * l * (n - 2), 4 * (n - e - 1) * e, 2 * e};
}

namespace detail {

/// Trace curve of arcs a < b, oriented as (a over b): t = view_time(P_b - P_a).
struct PairSamples {
  int a = 0, b = 0;
  std::vector<TPoint> pts;  // ascending z, t unwrapped
};

struct CurveSplit {
  int over = 0, under = 0;
  double z = 0;
  int vertex = 0;
};

inline double unwrap_near(double t, double ref) { return ref + angle_diff(ref, t); }

inline void unwrap(std::vector<TPoint>& pts) {
  for (std::size_t k = 1; k < pts.size(); ++k) pts[k].t = unwrap_near(pts[k].t, pts[k - 1].t);
}

/// Glue oriented trace curves into a graph. Curve ends become hanging,
/// critical or seam vertices according to the arc structure; `splits` cut
/// curves at the given (triple, tangent) vertices.
inline TraceGraph assemble(const ArcStructure& st, const std::vector<PairSamples>& pairs, std::vector<TVertex> vertices,
                           const std::vector<CurveSplit>& splits) {
  TraceGraph g;
  g.structure = st;
  const int total = st.total();

  // Bottom arc reached from each top arc across the seam.
  std::vector<int> across(static_cast<std::size_t>(total), -1), below(static_cast<std::size_t>(total), -1);
  for (int id = 0; id < total; ++id) {
    const auto& info = st.arcs[static_cast<std::size_t>(id)];
    if (info.z_hi != 1.0) continue;
    const int nxt = st.id(info.direction > 0 ? st.next(info.ref) : st.prev(info.ref));
    across[static_cast<std::size_t>(id)] = nxt;
    below[static_cast<std::size_t>(nxt)] = id;
  }
  // Extremum keys: the arc whose orientation ends there.
  auto bottom_extremum = [&](int id) {
    const auto& info = st.arcs[static_cast<std::size_t>(id)];
    return info.direction > 0 ? st.id(st.prev(info.ref)) : id;
  };
  auto top_extremum = [&](int id) {
    const auto& info = st.arcs[static_cast<std::size_t>(id)];
    return info.direction > 0 ? id : st.id(st.prev(info.ref));
  };

  std::map<std::pair<int, int>, int> seam;                  // (over, under) at the bottom -> vertex
  std::map<std::tuple<int, int, bool, bool>, int> critical;  // (extremum, passing arc, passing over, top)
  auto add_vertex = [&](VertexKind k, double t, double z) {
    vertices.push_back({k, wrap_angle(t), z, 0});
    return static_cast<int>(vertices.size()) - 1;
  };

  struct Oriented {
    int over, under;
    std::vector<TPoint> pts;
  };
  std::vector<Oriented> curves;
  for (const auto& p : pairs) {
    curves.push_back({p.a, p.b, p.pts});
    auto rev = p.pts;
    for (auto& q : rev) q.t += kPi;
    curves.push_back({p.b, p.a, rev});
  }

  auto end_vertex = [&](const Oriented& c, bool top) -> int {
    const auto& io = st.arcs[static_cast<std::size_t>(c.over)];
    const auto& iu = st.arcs[static_cast<std::size_t>(c.under)];
    const TPoint& p = top ? c.pts.back() : c.pts.front();
    const double eo = top ? io.z_hi : io.z_lo, eu = top ? iu.z_hi : iu.z_lo;
    if (eo == eu && std::abs(eo) == 1.0) {
      std::pair<int, int> key = top ? std::pair{across[static_cast<std::size_t>(c.over)], across[static_cast<std::size_t>(c.under)]}
                                    : std::pair{c.over, c.under};
      auto it = seam.find(key);
      if (it != seam.end()) return it->second;
      return seam[key] = add_vertex(VertexKind::SEAM, p.t, -1.0);
    }
    if (eo == eu) {
      const int ko = top ? top_extremum(c.over) : bottom_extremum(c.over);
      const int ku = top ? top_extremum(c.under) : bottom_extremum(c.under);
      if (ko != ku) throw InvalidLink("extreme pair at z = " + format_double(eo));
      return add_vertex(VertexKind::HANGING, p.t, p.z);
    }
    // The arc with the nearer end stops at an extremum, the other passes.
    const bool over_ends = top ? eo < eu : eo > eu;
    const int ending = over_ends ? c.over : c.under;
    const int passing = over_ends ? c.under : c.over;
    const int ext = top ? top_extremum(ending) : bottom_extremum(ending);
    const auto key = std::tuple{ext, passing, !over_ends, top};
    auto it = critical.find(key);
    if (it != critical.end()) return it->second;
    return critical[key] = add_vertex(VertexKind::CRITICAL, p.t, p.z);
  };

  std::map<std::pair<int, int>, std::vector<const CurveSplit*>> by_curve;
  for (const auto& s : splits) by_curve[{s.over, s.under}].push_back(&s);

  for (auto& c : curves) {
    if (c.pts.size() < 2) continue;
    const int v0 = end_vertex(c, false);
    const int v1 = end_vertex(c, true);
    auto cuts = by_curve[{c.over, c.under}];
    std::sort(cuts.begin(), cuts.end(), [](const CurveSplit* a, const CurveSplit* b) { return a->z < b->z; });
    const CrossingLabel label{st.arcs[static_cast<std::size_t>(c.over)].ref, st.arcs[static_cast<std::size_t>(c.under)].ref};
    TArc cur;
    cur.from = v0;
    cur.label = label;
    std::size_t k = 0;
    for (const auto* s : cuts) {
      while (k < c.pts.size() && c.pts[k].z < s->z - 1e-13) cur.points.push_back(c.pts[k++]);
      while (k < c.pts.size() && c.pts[k].z <= s->z + 1e-13) ++k;
      const double ref = cur.points.empty() ? c.pts.front().t : cur.points.back().t;
      const TPoint at{unwrap_near(vertices[static_cast<std::size_t>(s->vertex)].t, ref), s->z};
      cur.points.push_back(at);
      cur.to = s->vertex;
      g.arcs.push_back(cur);
      cur = TArc{};
      cur.from = s->vertex;
      cur.label = label;
      cur.points.push_back(at);
    }
    for (; k < c.pts.size(); ++k) cur.points.push_back(c.pts[k]);
    cur.to = v1;
    g.arcs.push_back(cur);
  }

  // Snap arc ends onto their vertices.
  for (auto& a : g.arcs) {
    const auto& V0 = vertices[static_cast<std::size_t>(a.from)];
    const auto& V1 = vertices[static_cast<std::size_t>(a.to)];
    a.points.front() = {unwrap_near(V0.t, a.points.front().t), V0.z};
    a.points.back() = {unwrap_near(V1.t, a.points.back().t), V1.kind == VertexKind::SEAM ? 1.0 : V1.z};
    // Keep the first point in [0, 2pi).
    const double shift = a.points.front().t - wrap_angle(a.points.front().t);
    for (auto& p : a.points) p.t -= shift;
  }

  g.vertices = std::move(vertices);
  sort_canonical(g);
  return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Numeric builder

inline TraceGraph build_numeric(const ArcDecomposition& d, const EventOptions& opt = {}) {
  if (has_extreme_pair(d)) throw InvalidLink("link has an extreme pair");
  const auto events = find_events(d, opt);
  const ArcStructure st = ArcStructure::from(d);
  const int total = d.total_arcs();
  auto arc = [&](int id) -> const MonotoneArc& { return d.arcs[static_cast<std::size_t>(id)]; };

  std::vector<detail::PairSamples> pairs;
  for (int a = 0; a < total; ++a)
    for (int b = a + 1; b < total; ++b) {
      const double lo = std::max(arc(a).z_lo(), arc(b).z_lo()), hi = std::min(arc(a).z_hi(), arc(b).z_hi());
      if (!(hi > lo)) continue;
      const auto breaks = detail::merged_breaks(arc(a), arc(b), lo, hi);
      detail::PairSamples ps{a, b, {}};
      auto push = [&](double z) { ps.pts.push_back({view_time(arc(b).at(z) - arc(a).at(z)), z}); };
      for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double z0 = breaks[k], z1 = breaks[k + 1];
        const Point2 c0 = arc(b).at(z0) - arc(a).at(z0), c1 = arc(b).at(z1) - arc(a).at(z1);
        // Refine pieces along which the direction turns fast.
        const double turn = std::abs(std::atan2(cross(c0, c1), c0.x * c1.x + c0.y * c1.y));
        const int sub = std::clamp(static_cast<int>(std::ceil(turn / 0.02)), 1, 64);
        for (int j = 0; j < sub; ++j) push(z0 + (z1 - z0) * j / sub);
      }
      push(breaks.back());
      // At a shared extremum the chord vanishes; its direction is that of the adjacent piece.
      auto fix = [&](std::size_t k, std::size_t nb) {
        const double zm = 0.5 * (ps.pts[k].z + ps.pts[nb].z);
        ps.pts[k].t = view_time(arc(b).at(zm) - arc(a).at(zm));
      };
      if (arc(a).z_lo() == arc(b).z_lo() && lo > -1.0) fix(0, 1);
      if (arc(a).z_hi() == arc(b).z_hi() && hi < 1.0) fix(ps.pts.size() - 1, ps.pts.size() - 2);
      detail::unwrap(ps.pts);
      pairs.push_back(std::move(ps));
    }

  std::vector<TVertex> vertices;
  std::vector<detail::CurveSplit> splits;
  auto check_curve = [&](int over, int under, double z, double t) {
    const double tc = view_time(arc(under).at(z) - arc(over).at(z));
    if (angle_dist(tc, t) > 1e-6)
      throw TrackingLoss("trace curve " + CrossingLabel{arc(over).ref, arc(under).ref}.display(false) +
                         " misses the event at t = " + format_sig(t, 12));
  };
  int cusps = 0, criticals = 0;
  std::vector<double> cusp_times;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::TRIPLE_III: {
        vertices.push_back({VertexKind::TRIPLE, e.t, e.z, e.sign});
        const int v = static_cast<int>(vertices.size()) - 1;
        const int P = e.arcs[0], Q = e.arcs[1], R = e.arcs[2];
        for (auto [o, u] : {std::pair{P, Q}, std::pair{Q, R}, std::pair{P, R}}) {
          check_curve(o, u, e.z, e.t);
          splits.push_back({o, u, e.z, v});
        }
        break;
      }
      case EventKind::TANGENCY_II: {
        vertices.push_back({VertexKind::TANGENT, e.t, e.z, 0});
        check_curve(e.arcs[0], e.arcs[1], e.z, e.t);
        splits.push_back({e.arcs[0], e.arcs[1], e.z, static_cast<int>(vertices.size()) - 1});
        break;
      }
      case EventKind::CUSP_I:
        ++cusps;
        cusp_times.push_back(e.t);
        break;
      case EventKind::CRITICAL_IV: ++criticals; break;
    }
  }
  TraceGraph g = detail::assemble(st, pairs, std::move(vertices), splits);
  if (g.count(VertexKind::HANGING) != cusps || g.count(VertexKind::CRITICAL) != criticals)
    throw TrackingLoss("curve ends do not match the cusp and critical events");
  for (const auto& v : g.vertices)
    if (v.kind == VertexKind::HANGING &&
        std::none_of(cusp_times.begin(), cusp_times.end(), [&](double t) { return angle_dist(t, v.t) < 1e-6; }))
      throw TrackingLoss("hanging vertex at t = " + format_sig(v.t, 12) + " matches no cusp");
  return g;
}

inline TraceGraph build_numeric(const SampledLink& link, std::size_t grid_size = 0, double tol = 1e-10) {
  validate_link(link);
  const auto d = arc_decomposition(link);
  std::size_t samples = 0;
  for (const auto& c : link.components) samples += c.size();
  if (grid_size != 0 && grid_size < 4 * samples) throw Error("grid_size must be at least 4 x the sample count");
  EventOptions opt;
  opt.grid_size = grid_size;
  opt.tol = tol;
  return build_numeric(d, opt);
}

// ---------------------------------------------------------------------------
// Block scheme for closed braids

/// Closed braid in the solid torus. Position k < n sits at angle 2^(1-k) pi
/// and position n at angle 0, on a circle of radius `radius`. In the block of
/// a letter on positions i, i+1 one strand crosses along the chord and the
/// other along the boundary arc; for a positive letter the strand leaving
/// position i takes the chord. The whole picture is twisted by a small
/// periodic rotation in z so that strands standing still give no vertical
/// trace arcs.
struct BlockScheme {
  BraidWord word;
  double radius = 0.7;
  double twist = 0.1;
  double twist_phase = 0.1234567891;
  std::vector<std::vector<int>> position_of;  // [block][strand-1] position at the block start

  explicit BlockScheme(BraidWord w) : word(std::move(w)) {
    const int n = word.strands;
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) pos[static_cast<std::size_t>(s)] = s + 1;
    for (const auto& L : word.letters) {
      position_of.push_back(pos);
      for (auto& p : pos) {
        if (p == L.generator) p = L.generator + 1;
        else if (p == L.generator + 1) p = L.generator;
      }
    }
    position_of.push_back(pos);
  }

  int strands() const { return word.strands; }
  int blocks() const { return static_cast<int>(word.letters.size()); }
  double block_height() const { return 2.0 / std::max(blocks(), 1); }

  double angle(int p) const { return p == strands() ? 0.0 : kPi * std::ldexp(1.0, 1 - p); }
  Point2 point(int p) const { return {radius * std::cos(angle(p)), radius * std::sin(angle(p))}; }
  double twist_at(double z) const { return twist * std::sin(kPi * (z - twist_phase)); }

  /// Strand that starts at position p at z = -1 ends at this position at z = 1.
  int final_position(int strand) const { return position_of.back()[static_cast<std::size_t>(strand - 1)]; }

  /// Horizontal position of a strand (numbered by its position at z = -1).
  Point2 at(int strand, double z) const {
    Point2 p;
    if (blocks() == 0) {
      p = point(strand);
    } else {
      const double h = block_height();
      const int b = std::clamp(static_cast<int>(std::floor((z + 1.0) / h)), 0, blocks() - 1);
      const double u = std::clamp((z + 1.0 - b * h) / h, 0.0, 1.0);
      const Letter& L = word.letters[static_cast<std::size_t>(b)];
      const int pos = position_of[static_cast<std::size_t>(b)][static_cast<std::size_t>(strand - 1)];
      const int i = L.generator;
      if (pos != i && pos != i + 1) {
        p = point(pos);
      } else {
        const int from = pos, to = pos == i ? i + 1 : i;
        const bool chord = (pos == i) == (L.sign > 0);
        if (chord) {
          const Point2 a = point(from), c = point(to);
          p = {a.x + u * (c.x - a.x), a.y + u * (c.y - a.y)};
        } else {
          const double th = angle(from) + u * (angle(to) - angle(from));
          p = {radius * std::cos(th), radius * std::sin(th)};
        }
      }
    }
    const double r = twist_at(z), c = std::cos(r), s = std::sin(r);
    return {p.x * c - p.y * s, p.x * s + p.y * c};
  }

  /// Arc structure: one arc per strand, numbered along each cycle starting
  /// from its smallest start position.
  ArcStructure structure() const {
    ArcStructure st;
    for (const auto& cyc : cycles()) {
      st.arcs_per_component.push_back(static_cast<int>(cyc.size()));
      const int comp = static_cast<int>(st.arcs_per_component.size());
      for (std::size_t q = 0; q < cyc.size(); ++q)
        st.arcs.push_back({{comp, static_cast<int>(q) + 1}, 1, -1.0, 1.0, ArcEnd::Seam, ArcEnd::Seam});
    }
    return st;
  }

  /// Strands of each component in the order of the closure's orientation.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(static_cast<std::size_t>(strands()) + 1, false);
    for (int s = 1; s <= strands(); ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      std::vector<int> cyc;
      for (int q = s; !seen[static_cast<std::size_t>(q)]; q = final_position(q)) {
        seen[static_cast<std::size_t>(q)] = true;
        cyc.push_back(q);
      }
      out.push_back(cyc);
    }
    return out;
  }

  /// Arc id (structure order) of each strand.
  std::vector<int> arc_of_strand() const {
    std::vector<int> out(static_cast<std::size_t>(strands()) + 1, -1);
    int id = 0;
    for (const auto& cyc : cycles())
      for (int s : cyc) out[static_cast<std::size_t>(s)] = id++;
    return out;
  }
};

/// Sampled geometric realization of the block scheme.
inline SampledLink braid_link(const BraidWord& w, int samples_per_block = 24) {
  const BlockScheme bs(w);
  const int per = samples_per_block * std::max(bs.blocks(), 1);
  SampledLink link;
  for (const auto& cyc : bs.cycles()) {
    std::vector<Point3> comp;
    for (int s : cyc)
      for (int k = 0; k < per; ++k) {
        const double z = -1.0 + 2.0 * k / per;
        const Point2 p = bs.at(s, z);
        comp.push_back({p.x, p.y, z});
      }
    link.components.push_back(std::move(comp));
  }
  return link;
}

inline TraceGraph build_from_braid(const BraidWord& w) {
  const BlockScheme bs(w);
  const int n = w.strands;
  const ArcStructure st = bs.structure();
  const auto arc_of = bs.arc_of_strand();
  const int nb = std::max(bs.blocks(), 1);
  const double h = bs.block_height();
  constexpr int K = 64;
  auto zs = [&](int b, double u) { return -1.0 + h * (b + u); };
  auto tcurve = [&](int sa, int sb, double z) { return view_time(bs.at(sb, z) - bs.at(sa, z)); };

  std::vector<TVertex> vertices;
  std::vector<detail::CurveSplit> splits;
  std::vector<detail::PairSamples> pairs;

  // Trace curves with tangent vertices at the interior t-extrema.
  for (int sa = 1; sa <= n; ++sa)
    for (int sb = 1; sb <= n; ++sb) {
      const int a = arc_of[static_cast<std::size_t>(sa)], b = arc_of[static_cast<std::size_t>(sb)];
      if (a >= b) continue;
      detail::PairSamples ps{a, b, {}};
      for (int blk = 0; blk < nb; ++blk)
        for (int k = 0; k < K; ++k) ps.pts.push_back({tcurve(sa, sb, zs(blk, double(k) / K)), zs(blk, double(k) / K)});
      ps.pts.push_back({tcurve(sa, sb, 1.0), 1.0});
      detail::unwrap(ps.pts);
      const std::size_t m = ps.pts.size();
      for (std::size_t k = 1; k + 1 < m; ++k) {
        const double d0 = ps.pts[k].t - ps.pts[k - 1].t, d1 = ps.pts[k + 1].t - ps.pts[k].t;
        if ((d0 > 0) == (d1 > 0)) continue;
        const double sgn = d0 > 0 ? 1.0 : -1.0;  // +1 at a maximum
        // Golden-section search on each side of the sample, which may be a block boundary.
        auto f = [&](double z) { return sgn * detail::unwrap_near(tcurve(sa, sb, z), ps.pts[k].t); };
        auto golden = [&](double lo, double hi) {
          const double g = 0.5 * (std::sqrt(5.0) - 1.0);
          double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
          double f1 = f(x1), f2 = f(x2);
          for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
            if (f1 > f2) {
              hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = f(x1);
            } else {
              lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = f(x2);
            }
          }
          const double z = 0.5 * (lo + hi);
          return std::pair{z, f(z)};
        };
        auto left = golden(ps.pts[k - 1].z, ps.pts[k].z), right = golden(ps.pts[k].z, ps.pts[k + 1].z);
        const double zk = ps.pts[k].z, fk = f(zk);
        double z = fk >= left.second && fk >= right.second ? zk : left.second > right.second ? left.first : right.first;
        const double t = tcurve(sa, sb, z);
        vertices.push_back({VertexKind::TANGENT, wrap_angle(t), z, 0});
        splits.push_back({a, b, z, static_cast<int>(vertices.size()) - 1});
        vertices.push_back({VertexKind::TANGENT, wrap_angle(t + kPi), z, 0});
        splits.push_back({b, a, z, static_cast<int>(vertices.size()) - 1});
      }
      pairs.push_back(std::move(ps));
    }

  // Trisecants through the two crossing strands and each standing strand.
  for (int blk = 0; blk < bs.blocks(); ++blk) {
    const Letter& L = w.letters[static_cast<std::size_t>(blk)];
    const auto& pos = bs.position_of[static_cast<std::size_t>(blk)];
    int s1 = 0, s2 = 0;
    for (int s = 1; s <= n; ++s) {
      if (pos[static_cast<std::size_t>(s - 1)] == L.generator) s1 = s;
      if (pos[static_cast<std::size_t>(s - 1)] == L.generator + 1) s2 = s;
    }
    for (int sj = 1; sj <= n; ++sj) {
      if (sj == s1 || sj == s2) continue;
      auto col = [&](double u) {
        const double z = zs(blk, u);
        const Point2 p1 = bs.at(s1, z);
        return cross(bs.at(s2, z) - p1, bs.at(sj, z) - p1);
      };
      for (int k = 0; k < K; ++k) {
        const double u0 = double(k) / K, u1 = double(k + 1) / K;
        const double f0 = col(u0), f1 = col(u1);
        if (f0 == 0.0 || (f0 > 0) == (f1 > 0)) continue;
        const double u = bisect(col, u0, u1, 1e-15);
        const double z = zs(blk, u);
        // Order the three strands from the viewer at one of the two views.
        std::array<int, 3> ss{s1, s2, sj};
        const double t0 = view_time(bs.at(s2, z) - bs.at(s1, z));
        for (double t : {t0, wrap_angle(t0 + kPi)}) {
          std::sort(ss.begin(), ss.end(), [&](int x, int y) { return rotated_y(bs.at(x, z), t) < rotated_y(bs.at(y, z), t); });
          const double dz = 1e-7;
          auto chord = [&](int x, int y, double zz) { return bs.at(y, zz) - bs.at(x, zz); };
          auto deriv = [&](int x, int y) {
            const Point2 p = chord(x, y, z + dz), q = chord(x, y, z - dz);
            return Point2{(p.x - q.x) / (2 * dz), (p.y - q.y) / (2 * dz)};
          };
          const int sign = detail::passage_sign(chord(ss[0], ss[1], z), deriv(ss[0], ss[1]), chord(ss[0], ss[2], z),
                                                deriv(ss[0], ss[2]), t);
          vertices.push_back({VertexKind::TRIPLE, t, z, sign});
          const int v = static_cast<int>(vertices.size()) - 1;
          const int P = arc_of[static_cast<std::size_t>(ss[0])], Q = arc_of[static_cast<std::size_t>(ss[1])],
                    R = arc_of[static_cast<std::size_t>(ss[2])];
          for (auto [o, u2] : {std::pair{P, Q}, std::pair{Q, R}, std::pair{P, R}}) splits.push_back({o, u2, z, v});
        }
      }
    }
  }
  return detail::assemble(st, pairs, std::move(vertices), splits);
}

}  // namespace tgraph
