#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tgraph/braid.hpp"
#include "tgraph/construction.hpp"
#include "tgraph/errors.hpp"
#include "tgraph/numeric.hpp"
#include "tgraph/trace_graph.hpp"

namespace tgraph {

enum class MoveKind {
  TETRAHEDRAL,
  TANGENT_TRIPLE,
  INTERSECTED_CUSP,
  CUBIC_TANGENCY,
  RAMPHOIDAL,
  HORIZONTAL_CUSP,
  MIXED_TANGENCY,
  EXTREME_TANGENCY,
  HORIZONTAL_TRIPLE_A,
  HORIZONTAL_TRIPLE_B,
  TRIHEDRAL
};

inline const std::array<MoveKind, 11>& all_move_kinds() {
  static const std::array<MoveKind, 11> k{
      MoveKind::TETRAHEDRAL,      MoveKind::TANGENT_TRIPLE,      MoveKind::INTERSECTED_CUSP, MoveKind::CUBIC_TANGENCY,
      MoveKind::RAMPHOIDAL,       MoveKind::HORIZONTAL_CUSP,     MoveKind::MIXED_TANGENCY,   MoveKind::EXTREME_TANGENCY,
      MoveKind::HORIZONTAL_TRIPLE_A, MoveKind::HORIZONTAL_TRIPLE_B, MoveKind::TRIHEDRAL};
  return k;
}

inline std::string to_string(MoveKind k) {
  switch (k) {
    case MoveKind::TETRAHEDRAL: return "TETRAHEDRAL";
    case MoveKind::TANGENT_TRIPLE: return "TANGENT_TRIPLE";
    case MoveKind::INTERSECTED_CUSP: return "INTERSECTED_CUSP";
    case MoveKind::CUBIC_TANGENCY: return "CUBIC_TANGENCY";
    case MoveKind::RAMPHOIDAL: return "RAMPHOIDAL";
    case MoveKind::HORIZONTAL_CUSP: return "HORIZONTAL_CUSP";
    case MoveKind::MIXED_TANGENCY: return "MIXED_TANGENCY";
    case MoveKind::EXTREME_TANGENCY: return "EXTREME_TANGENCY";
    case MoveKind::HORIZONTAL_TRIPLE_A: return "HORIZONTAL_TRIPLE_A";
    case MoveKind::HORIZONTAL_TRIPLE_B: return "HORIZONTAL_TRIPLE_B";
    case MoveKind::TRIHEDRAL: return "TRIHEDRAL";
  }
  return "?";
}

inline std::optional<MoveKind> parse_move_kind(const std::string& s) {
  for (auto k : all_move_kinds())
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Moves with an executable rewrite; the rest are checked against templates only.
inline bool executable(MoveKind k) { return k == MoveKind::TETRAHEDRAL || k == MoveKind::TRIHEDRAL; }

enum class MoveVariant { Any, Parallel, Antiparallel };

inline std::string to_string(MoveVariant v) {
  switch (v) {
    case MoveVariant::Any: return "any";
    case MoveVariant::Parallel: return "parallel";
    case MoveVariant::Antiparallel: return "antiparallel";
  }
  return "?";
}

/// Vertices naming a move site.
/// TETRAHEDRAL: two triple vertices on a common curve.
/// TRIHEDRAL: one triple vertex to insert a cancelling pair above, or the pair itself to delete it.
struct MoveSite {
  std::vector<int> vertices;
  friend bool operator==(const MoveSite&, const MoveSite&) = default;
};

namespace detail {

inline constexpr double kPartnerZTol = 1e-9;
inline constexpr double kPartnerTTol = 1e-7;

/// Vertex of the same kind at t + pi and the same height; -1 if none.
inline std::vector<int> vertex_partners(const TraceGraph& g) {
  const int nv = static_cast<int>(g.vertices.size());
  std::vector<int> partner(static_cast<std::size_t>(nv), -1);
  std::multimap<double, int> by_z;
  for (int v = 0; v < nv; ++v) by_z.insert({g.vertices[static_cast<std::size_t>(v)].z, v});
  for (int v = 0; v < nv; ++v) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    for (auto it = by_z.lower_bound(V.z - kPartnerZTol); it != by_z.end() && it->first <= V.z + kPartnerZTol; ++it) {
      const auto& W = g.vertices[static_cast<std::size_t>(it->second)];
      if (it->second != v && W.kind == V.kind && angle_dist(W.t, V.t + kPi) < kPartnerTTol) {
        partner[static_cast<std::size_t>(v)] = it->second;
        break;
      }
    }
  }
  return partner;
}

/// Arc reversed under t -> t + pi; -1 if none.
inline std::vector<int> arc_partners(const TraceGraph& g, const std::vector<int>& vp) {
  std::multimap<std::tuple<int, int, CrossingLabel>, int> keys;
  for (std::size_t a = 0; a < g.arcs.size(); ++a) keys.insert({{g.arcs[a].from, g.arcs[a].to, g.arcs[a].label}, static_cast<int>(a)});
  std::vector<int> out(g.arcs.size(), -1);
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const auto& A = g.arcs[a];
    if (A.from < 0 || A.to < 0) continue;
    const int pf = vp[static_cast<std::size_t>(A.from)], pt = vp[static_cast<std::size_t>(A.to)];
    if (pf < 0 || pt < 0) continue;
    auto [lo, hi] = keys.equal_range({pf, pt, A.label.reversed()});
    for (auto it = lo; it != hi; ++it) {
      const auto& B = g.arcs[static_cast<std::size_t>(it->second)];
      if (std::abs(B.points.front().z - A.points.front().z) < kPartnerZTol &&
          angle_dist(B.points.front().t, A.points.front().t + kPi) < kPartnerTTol) {
        out[a] = it->second;
        break;
      }
    }
  }
  return out;
}

/// Next arc up along the same curve through a TANGENT or SEAM vertex; -1 elsewhere.
inline int next_up(const TraceGraph& g, const std::vector<std::vector<int>>& inc, int a) {
  const int v = g.arcs[static_cast<std::size_t>(a)].to;
  if (v < 0) return -1;
  const auto k = g.vertices[static_cast<std::size_t>(v)].kind;
  if (k != VertexKind::TANGENT && k != VertexKind::SEAM) return -1;
  for (int b : inc[static_cast<std::size_t>(v)])
    if (b != a && g.arcs[static_cast<std::size_t>(b)].from == v) return b;
  return -1;
}

inline int next_down(const TraceGraph& g, const std::vector<std::vector<int>>& inc, int a) {
  const int v = g.arcs[static_cast<std::size_t>(a)].from;
  if (v < 0) return -1;
  const auto k = g.vertices[static_cast<std::size_t>(v)].kind;
  if (k != VertexKind::TANGENT && k != VertexKind::SEAM) return -1;
  for (int b : inc[static_cast<std::size_t>(v)])
    if (b != a && g.arcs[static_cast<std::size_t>(b)].to == v) return b;
  return -1;
}

/// Arcs at a triple vertex leaving upward (or arriving from below), one per curve, sorted by label.
inline std::vector<int> triple_arcs(const TraceGraph& g, const std::vector<std::vector<int>>& inc, int v, bool up) {
  std::vector<int> out;
  for (int a : inc[static_cast<std::size_t>(v)]) {
    const auto& A = g.arcs[static_cast<std::size_t>(a)];
    if (up ? A.from == v : A.to == v) out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [&](int x, int y) { return g.arcs[static_cast<std::size_t>(x)].label < g.arcs[static_cast<std::size_t>(y)].label; });
  return out;
}

inline int arc_with_label(const TraceGraph& g, const std::vector<int>& arcs, const CrossingLabel& l) {
  for (int a : arcs)
    if (g.arcs[static_cast<std::size_t>(a)].label == l) return a;
  return -1;
}

inline std::set<ArcRef> strands_at(const TraceGraph& g, const std::vector<std::vector<int>>& inc, int v) {
  std::set<ArcRef> s;
  for (int a : inc[static_cast<std::size_t>(v)]) {
    s.insert(g.arcs[static_cast<std::size_t>(a)].label.over);
    s.insert(g.arcs[static_cast<std::size_t>(a)].label.under);
  }
  return s;
}

/// Strands (q, s, r) of a triple vertex with labels (q s), (s r), (q r).
inline std::array<ArcRef, 3> triple_roles(const std::vector<CrossingLabel>& labels) {
  std::map<ArcRef, int> over;
  for (const auto& l : labels) {
    over[l.over] += 1;
    over[l.under] += 0;
  }
  std::array<ArcRef, 3> out{};
  for (const auto& [r, c] : over) out[static_cast<std::size_t>(2 - std::min(c, 2))] = r;
  return out;
}

/// Curves of a triple vertex ordered by dz/dt of their upward tangents.
inline std::vector<CrossingLabel> slope_order(const std::vector<CrossingLabel>& labels, const std::vector<double>& slopes) {
  std::vector<std::pair<double, CrossingLabel>> dz;
  for (std::size_t k = 0; k < labels.size(); ++k) dz.push_back({1.0 / slopes[k], labels[k]});
  std::sort(dz.begin(), dz.end());
  std::vector<CrossingLabel> out;
  for (const auto& [u, l] : dz) out.push_back(l);
  return out;
}

/// Sign of a triple vertex from the upward slopes dt/dz of its curves: positive when, just after the
/// vertex in t, the (q s) point of the slice lies between the other two.
inline int slope_sign(const std::vector<CrossingLabel>& labels, const std::vector<double>& slopes) {
  const auto qsr = triple_roles(labels);
  return slope_order(labels, slopes)[1] == CrossingLabel{qsr[0], qsr[1]} ? 1 : -1;
}

/// Which curve comes first in the slope order: 0 for (q s), 1 for (s r), 2 for (q r).
/// Reflecting t reverses the order, so this separates a vertex from its mirror image.
inline int slope_lead(const std::vector<CrossingLabel>& labels, const std::vector<double>& slopes) {
  const auto qsr = triple_roles(labels);
  const auto first = slope_order(labels, slopes)[0];
  if (first == CrossingLabel{qsr[0], qsr[1]}) return 0;
  if (first == CrossingLabel{qsr[1], qsr[2]}) return 1;
  return 2;
}

/// Labels and upward slopes dt/dz of the curves leaving a triple vertex.
inline std::pair<std::vector<CrossingLabel>, std::vector<double>> vertex_slopes(const TraceGraph& g,
                                                                                const std::vector<std::vector<int>>& inc, int v) {
  std::vector<CrossingLabel> labels;
  std::vector<double> slopes;
  for (int a : triple_arcs(g, inc, v, true)) {
    const auto& P = g.arcs[static_cast<std::size_t>(a)].points;
    if (P.size() < 2) continue;
    labels.push_back(g.arcs[static_cast<std::size_t>(a)].label);
    slopes.push_back((P[1].t - P[0].t) / (P[1].z - P[0].z));
  }
  return {labels, slopes};
}

inline double shift_to(double t, double ref) { return kTwoPi * std::round((ref - t) / kTwoPi); }

/// t-direction reverses at the middle point.
inline bool reverses(const TPoint& a, const TPoint& b, const TPoint& c) { return (b.t - a.t) * (c.t - b.t) < 0; }

/// Point of a rewritten arc: an original point (possibly shifted by a multiple of 2pi) or a new one.
/// `arc` names the original arc whose frame a new point lives in.
struct PRef {
  int arc = -1;
  int index = -1;  // -1 for a new point
  TPoint p;
  double dt = 0;
};

inline PRef orig(int arc, int index, double dt = 0) { return {arc, index, {}, dt}; }
inline PRef fresh(int arc, TPoint p) { return {arc, -1, p, 0}; }

/// A local rewrite on one side of the half-period symmetry. New vertices get ids from the vertex count up.
struct Rewrite {
  struct Piece {
    int from = -1, to = -1;
    CrossingLabel label;
    std::vector<PRef> pts;
  };
  std::vector<int> kill_vertices, kill_arcs;
  std::vector<TVertex> add_vertices;
  std::vector<Piece> pieces;

  int new_vertex(int base, const TVertex& v) {
    add_vertices.push_back(v);
    return base + static_cast<int>(add_vertices.size()) - 1;
  }
};

inline TPoint point_of(const TraceGraph& g, const PRef& r) {
  if (r.index < 0) return r.p;
  const auto& P = g.arcs[static_cast<std::size_t>(r.arc)].points[static_cast<std::size_t>(r.index)];
  return {P.t + r.dt, P.z};
}

/// Splits a piece at interior points where t reverses, adding TANGENT vertices. Only the listed
/// positions are tested.
inline void emit_piece(const TraceGraph& g, Rewrite& rw, Rewrite::Piece piece, const std::set<std::size_t>& check) {
  const int base = static_cast<int>(g.vertices.size());
  std::vector<TPoint> pts;
  for (const auto& r : piece.pts) pts.push_back(point_of(g, r));
  Rewrite::Piece cur{piece.from, -1, piece.label, {}};
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cur.pts.push_back(piece.pts[k]);
    if (k == 0 || k + 1 == pts.size() || !check.count(k) || !reverses(pts[k - 1], pts[k], pts[k + 1])) continue;
    const int v = rw.new_vertex(base, {VertexKind::TANGENT, wrap_angle(pts[k].t), pts[k].z, 0});
    cur.to = v;
    rw.pieces.push_back(cur);
    cur = Rewrite::Piece{v, -1, piece.label, {piece.pts[k]}};
  }
  cur.to = piece.to;
  rw.pieces.push_back(cur);
}

/// Applies a rewrite and its mirror image under t -> t + pi, then restores canonical order.
inline TraceGraph apply_symmetric(const TraceGraph& g, const Rewrite& rw) {
  const int nv = static_cast<int>(g.vertices.size());
  const auto vp = vertex_partners(g);
  const auto ap = arc_partners(g, vp);
  const int na = static_cast<int>(rw.add_vertices.size());

  std::set<int> kv(rw.kill_vertices.begin(), rw.kill_vertices.end()), ka(rw.kill_arcs.begin(), rw.kill_arcs.end());
  for (int v : rw.kill_vertices) {
    const int p = vp[static_cast<std::size_t>(v)];
    if (p < 0) throw SymmetryViolation("vertex " + std::to_string(v) + " has no partner");
    if (kv.count(p)) throw PatternMismatch("site overlaps its own mirror image");
    kv.insert(p);
  }
  for (int a : rw.kill_arcs) {
    const int p = ap[static_cast<std::size_t>(a)];
    if (p < 0) throw SymmetryViolation("arc " + std::to_string(a) + " has no partner");
    if (ka.count(p)) throw PatternMismatch("site overlaps its own mirror image");
    ka.insert(p);
  }
  auto mirror_vertex = [&](int v) {
    if (v >= nv) return v + na;
    const int p = vp[static_cast<std::size_t>(v)];
    if (p < 0) throw SymmetryViolation("vertex " + std::to_string(v) + " has no partner");
    return p;
  };
  // Shift taking arc r onto its partner: pi plus a multiple of 2pi.
  auto sigma = [&](int r) {
    const int pa = ap[static_cast<std::size_t>(r)];
    if (pa < 0) throw SymmetryViolation("arc " + std::to_string(r) + " has no partner");
    const double t0 = g.arcs[static_cast<std::size_t>(r)].points.front().t;
    return kPi + shift_to(t0 + kPi, g.arcs[static_cast<std::size_t>(pa)].points.front().t);
  };
  // A mirrored piece is the primary piece shifted rigidly by the frame shift of its first point.
  auto mirror_point = [&](const PRef& r, double frame) -> TPoint {
    if (r.index < 0) return {r.p.t + frame, r.p.z};
    const int pa = ap[static_cast<std::size_t>(r.arc)];
    const auto& A = g.arcs[static_cast<std::size_t>(r.arc)];
    const auto& B = g.arcs[static_cast<std::size_t>(pa)];
    if (A.points.size() != B.points.size()) throw SymmetryViolation("mirror arcs are sampled differently");
    const auto& P = B.points[static_cast<std::size_t>(r.index)];
    return {P.t + r.dt + (frame - sigma(r.arc)), P.z};
  };

  TraceGraph out;
  out.structure = g.structure;
  std::vector<int> id(static_cast<std::size_t>(nv + 2 * na), -1);
  for (int v = 0; v < nv; ++v)
    if (!kv.count(v)) {
      id[static_cast<std::size_t>(v)] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(g.vertices[static_cast<std::size_t>(v)]);
    }
  for (int k = 0; k < na; ++k) {
    id[static_cast<std::size_t>(nv + k)] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(rw.add_vertices[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < na; ++k) {
    TVertex m = rw.add_vertices[static_cast<std::size_t>(k)];
    m.t = wrap_angle(m.t + kPi);
    m.sign = -m.sign;
    id[static_cast<std::size_t>(nv + na + k)] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(m);
  }
  for (std::size_t a = 0; a < g.arcs.size(); ++a)
    if (!ka.count(static_cast<int>(a))) {
      TArc A = g.arcs[a];
      A.from = A.from >= 0 ? id[static_cast<std::size_t>(A.from)] : -1;
      A.to = A.to >= 0 ? id[static_cast<std::size_t>(A.to)] : -1;
      if ((g.arcs[a].from >= 0 && A.from < 0) || (g.arcs[a].to >= 0 && A.to < 0))
        throw PatternMismatch("rewrite removes a vertex of an untouched arc");
      out.arcs.push_back(std::move(A));
    }
  for (const auto& pc : rw.pieces) {
    TArc A, M;
    A.from = id[static_cast<std::size_t>(pc.from)];
    A.to = id[static_cast<std::size_t>(pc.to)];
    A.label = pc.label;
    M.from = id[static_cast<std::size_t>(mirror_vertex(pc.from))];
    M.to = id[static_cast<std::size_t>(mirror_vertex(pc.to))];
    M.label = pc.label.reversed();
    if (A.from < 0 || A.to < 0 || M.from < 0 || M.to < 0) throw PatternMismatch("rewrite ends on a removed vertex");
    const double frame = sigma(pc.pts.front().arc);
    for (const auto& r : pc.pts) {
      A.points.push_back(point_of(g, r));
      M.points.push_back(mirror_point(r, frame));
    }
    out.arcs.push_back(std::move(A));
    out.arcs.push_back(std::move(M));
  }
  detail::sort_canonical(out);
  const auto rep = validate_generic(out);
  if (!rep.pass()) throw PatternMismatch("rewritten graph is not generic: " + rep.violations.front());
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trihedral moves

namespace detail {

/// Cancelling pair of triple vertices just above triple vertex `v`, inside one sample segment of each
/// of its three upward arcs. The lens keeps every original point.
inline TraceGraph trihedral_insert(const TraceGraph& g, int v) {
  const auto inc = g.incidence();
  const auto& V = g.vertices[static_cast<std::size_t>(v)];
  if (V.kind != VertexKind::TRIPLE) throw PatternMismatch("trihedral insert needs a triple vertex");
  const auto up = triple_arcs(g, inc, v, true);
  if (up.size() != 3) throw PatternMismatch("triple vertex without three upward arcs");
  double top = 1.0;
  for (int a : up) top = std::min(top, g.arcs[static_cast<std::size_t>(a)].points.back().z);
  std::vector<CrossingLabel> labels;
  for (int a : up) labels.push_back(g.arcs[static_cast<std::size_t>(a)].label);

  for (double f : {0.5, 0.35, 0.65, 0.2, 0.8}) {
    const double zs = V.z + f * (top - V.z);
    std::array<std::size_t, 3> seg{};
    double lo = -1e300, hi = 1e300;
    bool ok = true;
    for (std::size_t k = 0; k < 3 && ok; ++k) {
      const auto& P = g.arcs[static_cast<std::size_t>(up[k])].points;
      std::size_t j = 0;
      while (j + 1 < P.size() && P[j + 1].z <= zs) ++j;
      // Away from v, with a kept neighbour on each side.
      if (j < 1 || j + 2 >= P.size() || reverses(P[j - 1], P[j], P[j + 1]) || reverses(P[j], P[j + 1], P[j + 2])) ok = false;
      else {
        seg[k] = j;
        lo = std::max(lo, P[j].z);
        hi = std::min(hi, P[j + 1].z);
      }
    }
    if (!ok || !(hi - lo > 1e-7)) continue;
    const double w = hi - lo;
    const double z1 = lo + 0.35 * w, z2 = lo + 0.65 * w, d = 0.1 * w;

    std::array<double, 3> tk{}, sk{};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& P = g.arcs[static_cast<std::size_t>(up[k])].points;
      const auto &a = P[seg[k]], &b = P[seg[k] + 1];
      sk[k] = (b.t - a.t) / (b.z - a.z);
      tk[k] = a.t + sk[k] * (z1 - a.z);
    }
    const double tau = (tk[0] + unwrap_near(tk[1], tk[0]) + unwrap_near(tk[2], tk[0])) / 3.0;
    // Slopes mu - 1, mu, mu + 1 of one sign, so the middle curve is the same at both vertices.
    double mu = (sk[0] + sk[1] + sk[2]) / 3.0;
    if (std::abs(mu) < 2.0) mu = mu < 0 ? -2.0 : 2.0;
    std::vector<double> s1(3), s2(3);
    for (std::size_t k = 0; k < 3; ++k) {
      s1[k] = mu + (static_cast<double>(k) - 1.0);
      s2[k] = mu - (static_cast<double>(k) - 1.0);
    }
    const double t2 = tau + mu * (z2 - z1);

    Rewrite rw;
    const int base = static_cast<int>(g.vertices.size());
    const int T1 = rw.new_vertex(base, {VertexKind::TRIPLE, wrap_angle(tau), z1, slope_sign(labels, s1)});
    const int T2 = rw.new_vertex(base, {VertexKind::TRIPLE, wrap_angle(t2), z2, slope_sign(labels, s2)});
    rw.kill_arcs = up;
    for (std::size_t k = 0; k < 3; ++k) {
      const int a = up[k];
      const auto& A = g.arcs[static_cast<std::size_t>(a)];
      const auto& P = A.points;
      const std::size_t j = seg[k];
      const double off = unwrap_near(tau, P[j].t) - tau;
      const TPoint T1p{tau + off, z1}, T2p{t2 + off, z2};
      // Leave and rejoin the old segment along its own direction; reversals fall on new points.
      const TPoint r0{P[j].t + sk[k] * (lo + 0.1 * w - P[j].z), lo + 0.1 * w};
      const TPoint r1{P[j].t + sk[k] * (hi - 0.1 * w - P[j].z), hi - 0.1 * w};
      const TPoint pb{T1p.t - s1[k] * d, z1 - d}, pa{T1p.t + s1[k] * d, z1 + d};
      const TPoint qb{T2p.t - s2[k] * d, z2 - d}, qa{T2p.t + s2[k] * d, z2 + d};

      Rewrite::Piece low{A.from, T1, A.label, {}};
      for (std::size_t i = 0; i <= j; ++i) low.pts.push_back(orig(a, static_cast<int>(i)));
      for (const auto& p : {r0, pb, T1p}) low.pts.push_back(fresh(a, p));
      emit_piece(g, rw, low, {j + 1, j + 2});
      emit_piece(g, rw, {T1, T2, A.label, {fresh(a, T1p), fresh(a, pa), fresh(a, qb), fresh(a, T2p)}}, {1, 2});
      Rewrite::Piece high{T2, A.to, A.label, {fresh(a, T2p), fresh(a, qa), fresh(a, r1)}};
      for (std::size_t i = j + 1; i < P.size(); ++i) high.pts.push_back(orig(a, static_cast<int>(i)));
      emit_piece(g, rw, high, {1, 2});
    }
    try {
      return apply_symmetric(g, rw);
    } catch (const PatternMismatch&) {
    }
  }
  throw PatternMismatch("no room for a trihedral pair above vertex " + std::to_string(v));
}

/// Upward chains from `t1` through TANGENT and SEAM vertices; all three must end at one vertex.
inline std::optional<std::pair<int, std::array<std::vector<int>, 3>>> trihedral_chains(
    const TraceGraph& g, const std::vector<std::vector<int>>& inc, int t1) {
  const auto up = triple_arcs(g, inc, t1, true);
  if (up.size() != 3) return std::nullopt;
  std::array<std::vector<int>, 3> chains;
  int end = -1;
  for (std::size_t k = 0; k < 3; ++k) {
    int a = up[k];
    chains[k].push_back(a);
    for (std::size_t steps = 0; steps < g.arcs.size(); ++steps) {
      const int b = next_up(g, inc, a);
      if (b < 0) break;
      a = b;
      chains[k].push_back(a);
    }
    const int x = g.arcs[static_cast<std::size_t>(a)].to;
    if (x < 0 || g.vertices[static_cast<std::size_t>(x)].kind != VertexKind::TRIPLE) return std::nullopt;
    if (end >= 0 && x != end) return std::nullopt;
    end = x;
  }
  return std::pair{end, chains};
}

inline constexpr int kDrop = 2;

/// Removes the cancelling pair (t1 below, t2 above) joined by three chains of TANGENT/SEAM vertices.
inline TraceGraph trihedral_delete(const TraceGraph& g, int t1, int t2) {
  const auto inc = g.incidence();
  const auto vp = vertex_partners(g);
  const auto& A1 = g.vertices[static_cast<std::size_t>(t1)];
  const auto& A2 = g.vertices[static_cast<std::size_t>(t2)];
  if (A1.kind != VertexKind::TRIPLE || A2.kind != VertexKind::TRIPLE) throw PatternMismatch("trihedral pair needs two triple vertices");
  if (A1.sign != A2.sign) throw PatternMismatch("trihedral pair needs equal signs");
  if (vp[static_cast<std::size_t>(t1)] == t2) throw PatternMismatch("a vertex and its mirror image do not cancel");
  const auto ch = trihedral_chains(g, inc, t1);
  if (!ch || ch->first != t2) throw PatternMismatch("vertices are not joined by three plain chains");
  const auto& chains = ch->second;
  const auto in1 = triple_arcs(g, inc, t1, false);
  const auto out2 = triple_arcs(g, inc, t2, true);

  Rewrite rw;
  rw.kill_vertices = {t1, t2};
  std::set<int> used;
  auto kill_arc = [&](int a) {
    if (!used.insert(a).second) throw PatternMismatch("curves of the pair overlap");
    rw.kill_arcs.push_back(a);
  };
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& C = chains[k];
    const int I = arc_with_label(g, in1, g.arcs[static_cast<std::size_t>(C.front())].label);
    const int O = arc_with_label(g, out2, g.arcs[static_cast<std::size_t>(C.back())].label);
    if (I < 0 || O < 0) throw PatternMismatch("labels do not continue through the pair");
    for (int a : C) kill_arc(a);
    kill_arc(I);
    kill_arc(O);

    // Drop the points next to the pair, through tangent vertices, and keep the rest.
    std::vector<PRef> below, above;
    int start = -1, end = -1;
    {
      int cur = I, dropped = 0;
      int i = static_cast<int>(g.arcs[static_cast<std::size_t>(cur)].points.size()) - 2;
      for (;;) {
        const auto& C0 = g.arcs[static_cast<std::size_t>(cur)];
        if (i == 0 && dropped < kDrop && C0.from >= 0 && g.vertices[static_cast<std::size_t>(C0.from)].kind == VertexKind::TANGENT) {
          rw.kill_vertices.push_back(C0.from);
          cur = next_down(g, inc, cur);
          kill_arc(cur);
          ++dropped;
          i = static_cast<int>(g.arcs[static_cast<std::size_t>(cur)].points.size()) - 2;
          continue;
        }
        if (i > 0 && dropped < kDrop) {
          ++dropped;
          --i;
          continue;
        }
        start = C0.from;
        for (int x = 0; x <= i; ++x) below.push_back(orig(cur, x));
        break;
      }
    }
    {
      int cur = O, dropped = 0, i = 1;
      for (;;) {
        const auto& C0 = g.arcs[static_cast<std::size_t>(cur)];
        const int last = static_cast<int>(C0.points.size()) - 1;
        if (i == last && dropped < kDrop && C0.to >= 0 && g.vertices[static_cast<std::size_t>(C0.to)].kind == VertexKind::TANGENT) {
          rw.kill_vertices.push_back(C0.to);
          cur = next_up(g, inc, cur);
          kill_arc(cur);
          ++dropped;
          i = 1;
          continue;
        }
        if (i < last && dropped < kDrop) {
          ++dropped;
          ++i;
          continue;
        }
        end = C0.to;
        for (int x = i; x <= last; ++x) above.push_back(orig(cur, x));
        break;
      }
    }

    // Seam vertices inside the lens stay; tangent vertices go.
    std::vector<int> seams;
    for (std::size_t i = 0; i + 1 < C.size(); ++i) {
      const int x = g.arcs[static_cast<std::size_t>(C[i])].to;
      if (g.vertices[static_cast<std::size_t>(x)].kind == VertexKind::SEAM) seams.push_back(static_cast<int>(i));
      else rw.kill_vertices.push_back(x);
    }
    auto append = [&](std::vector<PRef>& to, PRef r) {
      if (!to.empty()) {
        const TPoint last = point_of(g, to.back());
        r.dt += shift_to(point_of(g, r).t, last.t);
      }
      to.push_back(r);
    };
    Rewrite::Piece cur{start, -1, g.arcs[static_cast<std::size_t>(I)].label, {}};
    for (const auto& r : below) append(cur.pts, r);
    const std::size_t join_lo = cur.pts.size() - 1;
    for (int i : seams) {
      const int a = C[static_cast<std::size_t>(i)], b = C[static_cast<std::size_t>(i) + 1];
      const auto& Pa = g.arcs[static_cast<std::size_t>(a)].points;
      append(cur.pts, orig(a, static_cast<int>(Pa.size()) - 1));
      cur.to = g.arcs[static_cast<std::size_t>(a)].to;
      const bool first = i == seams.front();
      emit_piece(g, rw, cur, first ? std::set<std::size_t>{join_lo} : std::set<std::size_t>{});
      cur = Rewrite::Piece{cur.to, -1, g.arcs[static_cast<std::size_t>(b)].label, {orig(b, 0)}};
    }
    const std::size_t join_hi = cur.pts.size();
    for (const auto& r : above) append(cur.pts, r);
    cur.to = end;
    std::set<std::size_t> chk{join_hi};
    if (seams.empty()) chk.insert(join_lo);
    emit_piece(g, rw, cur, chk);
  }
  return apply_symmetric(g, rw);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tetrahedral move

namespace detail {

struct TetraSite {
  int lower = -1, upper = -1;
  CrossingLabel shared;         // curve carrying both vertices
  std::vector<int> chain;       // arcs of that curve from lower to upper
  ArcRef only_lower, only_upper;  // strands not shared
};

/// Two triple vertices consecutive along one curve (only TANGENT vertices between) with exactly two
/// strands in common.
inline std::optional<TetraSite> tetra_site(const TraceGraph& g, const std::vector<std::vector<int>>& inc, int v1, int v2) {
  auto kind = [&](int v) { return g.vertices[static_cast<std::size_t>(v)].kind; };
  if (v1 == v2 || kind(v1) != VertexKind::TRIPLE || kind(v2) != VertexKind::TRIPLE) return std::nullopt;
  for (int pass = 0; pass < 2; ++pass) {
    const int lo = pass == 0 ? v1 : v2, hi = pass == 0 ? v2 : v1;
    for (int a : triple_arcs(g, inc, lo, true)) {
      std::vector<int> chain{a};
      int cur = a;
      while (kind(g.arcs[static_cast<std::size_t>(cur)].to) == VertexKind::TANGENT) {
        cur = next_up(g, inc, cur);
        if (cur < 0 || chain.size() > g.arcs.size()) break;
        chain.push_back(cur);
      }
      if (cur < 0 || g.arcs[static_cast<std::size_t>(cur)].to != hi) continue;
      const auto s1 = strands_at(g, inc, lo), s2 = strands_at(g, inc, hi);
      std::vector<ArcRef> common, d1, d2;
      std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(common));
      std::set_difference(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(d1));
      std::set_difference(s2.begin(), s2.end(), s1.begin(), s1.end(), std::back_inserter(d2));
      if (common.size() != 2 || d1.size() != 1 || d2.size() != 1) return std::nullopt;
      return TetraSite{lo, hi, g.arcs[static_cast<std::size_t>(a)].label, chain, d1[0], d2[0]};
    }
  }
  return std::nullopt;
}

inline MoveVariant tetra_variant(const TraceGraph& g, const TetraSite& s) {
  return g.structure.at(s.only_lower).direction == g.structure.at(s.only_upper).direction ? MoveVariant::Parallel
                                                                                          : MoveVariant::Antiparallel;
}

/// Lifts the lower vertex along the shared curve to just above the upper one. Its two other curves
/// are rerouted through the new position; every other point stays.
inline TraceGraph tetrahedral(const TraceGraph& g, const TetraSite& s) {
  const auto inc = g.incidence();
  const int v1 = s.lower, v2 = s.upper;
  const auto& V1 = g.vertices[static_cast<std::size_t>(v1)];
  const auto& V2 = g.vertices[static_cast<std::size_t>(v2)];
  const auto ins = triple_arcs(g, inc, v1, false), outs = triple_arcs(g, inc, v1, true);
  const int x_in = arc_with_label(g, ins, s.shared), x_out = s.chain.front();
  const int a_up = arc_with_label(g, triple_arcs(g, inc, v2, true), s.shared);
  if (x_in < 0 || a_up < 0) throw PatternMismatch("shared curve does not continue through the site");

  const auto& U = g.arcs[static_cast<std::size_t>(a_up)].points;
  const double gap = U[1].z - U[0].z;
  const double z = V2.z + 0.4 * gap, d = 0.3 * (z - V2.z);
  const double s0 = (U[1].t - U[0].t) / gap;
  const double tau = U[0].t + s0 * (z - U[0].z);

  Rewrite rw;
  const int base = static_cast<int>(g.vertices.size());
  rw.kill_vertices = {v1};
  const int nv1 = rw.new_vertex(base, {VertexKind::TRIPLE, wrap_angle(tau), z, V1.sign});
  rw.kill_arcs = {x_in, x_out, a_up};

  // Shared curve: merge across the old position, split at the new one.
  {
    Rewrite::Piece m{g.arcs[static_cast<std::size_t>(x_in)].from, g.arcs[static_cast<std::size_t>(x_out)].to, s.shared, {}};
    const auto& P = g.arcs[static_cast<std::size_t>(x_in)].points;
    const auto& Q = g.arcs[static_cast<std::size_t>(x_out)].points;
    for (std::size_t i = 0; i < P.size(); ++i) m.pts.push_back(orig(x_in, static_cast<int>(i)));
    const double dt = shift_to(Q.front().t, P.back().t);
    for (std::size_t i = 1; i < Q.size(); ++i) m.pts.push_back(orig(x_out, static_cast<int>(i), dt));
    rw.pieces.push_back(m);
    rw.pieces.push_back({v2, nv1, s.shared, {orig(a_up, 0), fresh(a_up, {tau, z})}});
    Rewrite::Piece r{nv1, g.arcs[static_cast<std::size_t>(a_up)].to, s.shared, {fresh(a_up, {tau, z})}};
    for (std::size_t i = 1; i < U.size(); ++i) r.pts.push_back(orig(a_up, static_cast<int>(i)));
    rw.pieces.push_back(r);
  }

  // Slopes of the two other curves at the new position, chosen so the vertex keeps its curve order.
  if (std::abs(s0) < 1e-3) throw PatternMismatch("shared curve is vertical at the new position");
  std::vector<CrossingLabel> labels;
  for (int b : outs) labels.push_back(g.arcs[static_cast<std::size_t>(b)].label);
  std::map<CrossingLabel, double> slope;
  {
    std::vector<CrossingLabel> others;
    for (const auto& l : labels)
      if (l != s.shared) others.push_back(l);
    if (others.size() != 2) throw PatternMismatch("lower vertex does not carry three curves");
    const double sg = s0 > 0 ? 1.0 : -1.0;
    const auto [l1, s1] = vertex_slopes(g, inc, v1);
    const int lead = slope_lead(l1, s1);
    // Candidate slopes cover every order of the three curves.
    const std::array<double, 5> cand{2 * s0 + sg, s0 / 2, -(s0 + sg), s0 / 3, 3 * s0 + 2 * sg};
    bool found = false;
    for (std::size_t i = 0; i < cand.size() && !found; ++i)
      for (std::size_t j = 0; j < cand.size() && !found; ++j) {
        if (i == j) continue;
        slope.clear();
        slope[s.shared] = s0;
        slope[others[0]] = cand[i];
        slope[others[1]] = cand[j];
        std::vector<double> sl;
        for (const auto& l : labels) sl.push_back(slope[l]);
        found = slope_sign(labels, sl) == V1.sign && slope_lead(labels, sl) == lead;
      }
    if (!found) throw PatternMismatch("no slopes keep the curve order of the lifted vertex");
  }

  // The two other curves through the lower vertex.
  for (int b_out : outs) {
    const auto& B = g.arcs[static_cast<std::size_t>(b_out)];
    if (B.label == s.shared) continue;
    const int b_in = arc_with_label(g, ins, B.label);
    if (b_in < 0) throw PatternMismatch("curve does not continue through the lower vertex");
    const auto& P = g.arcs[static_cast<std::size_t>(b_in)].points;
    const auto& Q = B.points;
    std::size_t first = 1;
    while (first < Q.size() && Q[first].z <= z + d) ++first;
    if (first + 1 >= Q.size() && B.to >= 0 && g.vertices[static_cast<std::size_t>(B.to)].kind != VertexKind::SEAM &&
        Q.back().z <= z + d)
      throw PatternMismatch("another vertex lies in the way of the lifted vertex");
    if (first >= Q.size()) throw PatternMismatch("another vertex lies in the way of the lifted vertex");
    const double sk = slope[B.label];
    const double off = unwrap_near(tau, P.back().t) - tau;
    const TPoint pv{tau + off, z}, pb{tau + off - sk * d, z - d}, pa{tau + off + sk * d, z + d};
    for (int a : {b_in, b_out}) rw.kill_arcs.push_back(a);

    Rewrite::Piece lo{g.arcs[static_cast<std::size_t>(b_in)].from, nv1, B.label, {}};
    for (std::size_t i = 0; i + 1 < P.size(); ++i) lo.pts.push_back(orig(b_in, static_cast<int>(i)));
    const std::size_t last = lo.pts.size() - 1;
    lo.pts.push_back(fresh(b_in, pb));
    lo.pts.push_back(fresh(b_in, pv));
    emit_piece(g, rw, lo, {last, last + 1});
    Rewrite::Piece hi{nv1, B.to, B.label, {fresh(b_in, pv), fresh(b_in, pa)}};
    const double dt = shift_to(Q[first].t, pa.t);
    for (std::size_t i = first; i < Q.size(); ++i) hi.pts.push_back(orig(b_out, static_cast<int>(i), dt));
    emit_piece(g, rw, hi, {1, 2});
  }
  std::set<int> distinct(rw.kill_arcs.begin(), rw.kill_arcs.end());
  if (distinct.size() != rw.kill_arcs.size()) throw PatternMismatch("curves of the site overlap");
  return apply_symmetric(g, rw);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Moves

/// Tetrahedral sites: pairs of triple vertices consecutive along a curve with two strands in common.
/// One site per symmetric pair, the lower vertex taken in t < pi.
inline std::vector<MoveSite> tetrahedral_sites(const TraceGraph& g) {
  const auto inc = g.incidence();
  std::vector<MoveSite> out;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    if (V.kind != VertexKind::TRIPLE || V.t >= kPi) continue;
    for (int a : detail::triple_arcs(g, inc, v, true)) {
      int cur = a;
      while (cur >= 0 && g.vertices[static_cast<std::size_t>(g.arcs[static_cast<std::size_t>(cur)].to)].kind == VertexKind::TANGENT)
        cur = detail::next_up(g, inc, cur);
      if (cur < 0) continue;
      const int w = g.arcs[static_cast<std::size_t>(cur)].to;
      if (detail::tetra_site(g, inc, v, w)) out.push_back({{v, w}});
    }
  }
  return out;
}

/// Cancelling pairs ready for deletion, the lower vertex taken in t < pi.
inline std::vector<MoveSite> trihedral_sites(const TraceGraph& g) {
  const auto inc = g.incidence();
  const auto vp = detail::vertex_partners(g);
  std::vector<MoveSite> out;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    if (V.kind != VertexKind::TRIPLE || V.t >= kPi) continue;
    const auto ch = detail::trihedral_chains(g, inc, v);
    if (!ch) continue;
    const int w = ch->first;
    if (w == vp[static_cast<std::size_t>(v)] || g.vertices[static_cast<std::size_t>(w)].sign != V.sign) continue;
    out.push_back({{v, w}});
  }
  return out;
}

inline MoveVariant tetrahedral_variant(const TraceGraph& g, const MoveSite& site) {
  if (site.vertices.size() != 2) throw PatternMismatch("tetrahedral site needs two vertices");
  const auto s = detail::tetra_site(g, g.incidence(), site.vertices[0], site.vertices[1]);
  if (!s) throw PatternMismatch("vertices do not form a tetrahedral site");
  return detail::tetra_variant(g, *s);
}

inline TraceGraph apply_move(const TraceGraph& g, MoveKind kind, const MoveSite& site, MoveVariant variant = MoveVariant::Any) {
  const int nv = static_cast<int>(g.vertices.size());
  for (int v : site.vertices)
    if (v < 0 || v >= nv) throw PatternMismatch("site vertex " + std::to_string(v) + " out of range");
  switch (kind) {
    case MoveKind::TETRAHEDRAL: {
      if (site.vertices.size() != 2) throw PatternMismatch("tetrahedral site needs two vertices");
      const auto s = detail::tetra_site(g, g.incidence(), site.vertices[0], site.vertices[1]);
      if (!s) throw PatternMismatch("vertices do not form a tetrahedral site");
      if (variant != MoveVariant::Any && variant != detail::tetra_variant(g, *s))
        throw PatternMismatch("site is " + to_string(detail::tetra_variant(g, *s)) + ", not " + to_string(variant));
      return detail::tetrahedral(g, *s);
    }
    case MoveKind::TRIHEDRAL:
      if (site.vertices.size() == 1) return detail::trihedral_insert(g, site.vertices[0]);
      if (site.vertices.size() == 2) return detail::trihedral_delete(g, site.vertices[0], site.vertices[1]);
      throw PatternMismatch("trihedral site needs one vertex (insert) or two (delete)");
    default:
      throw PatternMismatch(to_string(kind) + " has no executable rewrite");
  }
}

/// Bookkeeping check of a proposed before/after pair: both generic on the same link, with the vertex
/// counts each family preserves or changes.
inline bool matches_template(MoveKind kind, const TraceGraph& before, const TraceGraph& after) {
  if (!validate_generic(before).pass() || !validate_generic(after).pass()) return false;
  const auto& a = before.structure;
  const auto& b = after.structure;
  if (a.arcs_per_component != b.arcs_per_component || a.arcs.size() != b.arcs.size()) return false;
  auto delta = [&](VertexKind k) { return after.count(k) - before.count(k); };
  const int dT = delta(VertexKind::TRIPLE), dG = delta(VertexKind::TANGENT), dH = delta(VertexKind::HANGING),
            dC = delta(VertexKind::CRITICAL);
  switch (kind) {
    case MoveKind::TETRAHEDRAL:
    case MoveKind::HORIZONTAL_CUSP:
    case MoveKind::HORIZONTAL_TRIPLE_A:
    case MoveKind::HORIZONTAL_TRIPLE_B: return dT == 0 && dH == 0 && dC == 0;
    case MoveKind::TANGENT_TRIPLE: return dT == 0 && dH == 0 && dC == 0 && dG % 2 == 0;
    case MoveKind::INTERSECTED_CUSP: return std::abs(dT) == 2 && dH == 0 && dC == 0;
    case MoveKind::CUBIC_TANGENCY: return dT == 0 && dH == 0 && dC == 0 && dG % 4 == 0;
    case MoveKind::RAMPHOIDAL: return dT == 0 && dH == 0 && dG % 2 == 0;
    case MoveKind::MIXED_TANGENCY: return dH == 0 && dC == 0 && dG % 2 == 0;
    case MoveKind::EXTREME_TANGENCY: return dT == 0 && dH == 0 && dG % 2 == 0;
    case MoveKind::TRIHEDRAL: return std::abs(dT) == 4 && dH == 0 && dC == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Canonical code

struct CanonicalCode {
  std::string bytes;
  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
};

inline const std::string kEmptyCanonicalCode = "TG1;C:;E:";

namespace detail {

inline bool closed_braid(const ArcStructure& s) {
  return std::all_of(s.arcs.begin(), s.arcs.end(), [](const ArcInfo& a) { return a.start == ArcEnd::Seam && a.end == ArcEnd::Seam; });
}

struct Event {
  int vertex = -1;
  int group = 0;  // height class
  VertexKind kind = VertexKind::TRIPLE;
  int sign = 0;
  int lead = 0;
  std::vector<CrossingLabel> labels;
  std::array<ArcRef, 3> strands{};  // (q, s, r) of a triple vertex with labels (q s), (s r), (q r)
};

inline std::vector<Event> events_by_height(const TraceGraph& g) {
  const auto inc = g.incidence();
  std::vector<Event> ev;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    if (V.kind == VertexKind::TANGENT || V.kind == VertexKind::SEAM) continue;
    Event e;
    e.vertex = v;
    e.kind = V.kind;
    e.sign = V.sign;
    std::set<CrossingLabel> ls;
    for (int a : inc[static_cast<std::size_t>(v)]) ls.insert(g.arcs[static_cast<std::size_t>(a)].label);
    e.labels.assign(ls.begin(), ls.end());
    if (V.kind == VertexKind::TRIPLE && e.labels.size() == 3) {
      e.strands = triple_roles(e.labels);
      const auto [l, sl] = vertex_slopes(g, inc, v);
      if (l.size() == 3) e.lead = slope_lead(l, sl);
    }
    ev.push_back(std::move(e));
  }
  std::stable_sort(ev.begin(), ev.end(), [&](const Event& a, const Event& b) {
    return g.vertices[static_cast<std::size_t>(a.vertex)].z < g.vertices[static_cast<std::size_t>(b.vertex)].z;
  });
  int grp = 0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    if (k > 0 && g.vertices[static_cast<std::size_t>(ev[k].vertex)].z - g.vertices[static_cast<std::size_t>(ev[k - 1].vertex)].z > kPartnerZTol)
      ++grp;
    ev[k].group = grp;
  }
  // Within a height class order by sign and lead, which do not depend on labels.
  std::stable_sort(ev.begin(), ev.end(),
                   [](const Event& a, const Event& b) { return std::tie(a.group, a.sign, a.lead) < std::tie(b.group, b.sign, b.lead); });
  return ev;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(v[k]);
  }
  return s;
}

}  // namespace detail

/// Height-ordered event word, minimal over cyclic height origins and strand relabellings.
/// Closed braids: every cut between height classes is tried, components and passes are renumbered by
/// first appearance above the cut. Other graphs: read from z = -1 with their own labels.
inline CanonicalCode canonical_code(const TraceGraph& g) {
  const auto& st = g.structure;
  std::vector<int> sizes = st.arcs_per_component;
  std::sort(sizes.begin(), sizes.end());
  std::string head = "TG1;C:" + detail::join_ints(sizes) + ";E:";
  const auto ev = detail::events_by_height(g);
  if (ev.empty()) return {head};

  const bool braid = detail::closed_braid(st) &&
                     std::all_of(ev.begin(), ev.end(), [](const detail::Event& e) { return e.kind == VertexKind::TRIPLE; });
  if (!braid) {
    std::vector<int> word;
    for (const auto& e : ev) {
      word.push_back(-1 - e.group);
      word.push_back(static_cast<int>(e.kind));
      word.push_back(e.sign);
      word.push_back(e.lead);
      for (const auto& l : e.labels)
        for (const auto& r : {l.over, l.under}) {
          word.push_back(r.component);
          word.push_back(r.index);
        }
    }
    return {head + "F:" + detail::join_ints(word)};
  }

  const int groups = ev.back().group + 1;
  std::vector<int> best;
  for (int cut = 0; cut < groups; ++cut) {
    std::map<int, int> comp_id, comp_shift;
    std::vector<int> word;
    word.reserve(ev.size() * 10);
    auto emit = [&](const detail::Event& e) {
      word.push_back(e.group >= cut ? e.group - cut : e.group - cut + groups);
      word.push_back(e.sign);
      word.push_back(e.lead);
      for (const auto& r : e.strands) {
        const int n = st.arcs_per_component[static_cast<std::size_t>(r.component - 1)];
        const int dir = st.at(r).direction;
        // Pass of the strand counted from the cut.
        const int below = e.group < cut ? 1 : 0;
        const int p = ((r.index - 1 - dir * below) % n + n) % n;
        auto it = comp_id.find(r.component);
        if (it == comp_id.end()) {
          it = comp_id.emplace(r.component, static_cast<int>(comp_id.size())).first;
          comp_shift[r.component] = p;
        }
        word.push_back(it->second);
        word.push_back(n);
        word.push_back(((p - comp_shift[r.component]) % n + n) % n);
      }
    };
    for (const auto& e : ev)
      if (e.group >= cut) emit(e);
    for (const auto& e : ev)
      if (e.group < cut) emit(e);
    if (best.empty() || word < best) best = std::move(word);
  }
  return {head + "B:" + detail::join_ints(best)};
}

// ---------------------------------------------------------------------------
// Reduction and conjugacy

/// Deletes cancelling trihedral pairs greedily, at most `budget` of them.
inline TraceGraph trihedral_reduce(TraceGraph g, int budget, int* used = nullptr) {
  int n = 0;
  while (n < budget) {
    bool done = false;
    for (const auto& s : trihedral_sites(g)) {
      try {
        g = apply_move(g, MoveKind::TRIHEDRAL, s);
        done = true;
        break;
      } catch (const PatternMismatch&) {
      }
    }
    if (!done) break;
    ++n;
  }
  if (used) *used = n;
  return g;
}

enum class Verdict { EQUIVALENT, DISTINCT, UNDECIDED };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::EQUIVALENT: return "EQUIVALENT";
    case Verdict::DISTINCT: return "DISTINCT";
    case Verdict::UNDECIDED: return "UNDECIDED";
  }
  return "?";
}

struct ConjugacyResult {
  Verdict verdict = Verdict::UNDECIDED;
  std::string certificate;
};

inline constexpr int kDefaultBudget = 400;

struct Reduction {
  TraceGraph graph;
  int trihedral = 0, tetrahedral = 0;
};

/// Trihedral reduction, unblocked by single tetrahedral moves that expose a new cancelling pair.
inline Reduction reduce_with_moves(TraceGraph g, int& budget) {
  Reduction r;
  while (budget > 0) {
    int used = 0;
    g = trihedral_reduce(std::move(g), budget, &used);
    budget -= used;
    r.trihedral += used;
    if (budget <= 0) break;
    bool moved = false;
    for (const auto& s : tetrahedral_sites(g)) {
      if (budget <= 0) break;
      --budget;
      TraceGraph h;
      try {
        h = apply_move(g, MoveKind::TETRAHEDRAL, s);
      } catch (const PatternMismatch&) {
        continue;
      }
      for (const auto& t : trihedral_sites(h)) {
        try {
          g = apply_move(h, MoveKind::TRIHEDRAL, t);
          ++r.tetrahedral;
          ++r.trihedral;
          moved = true;
          break;
        } catch (const PatternMismatch&) {
        }
      }
      if (moved) break;
    }
    if (!moved) break;
  }
  r.graph = std::move(g);
  return r;
}

inline BraidWord rotate(const BraidWord& w, std::size_t r) {
  BraidWord out{w.strands, {}};
  for (std::size_t k = 0; k < w.letters.size(); ++k) out.letters.push_back(w.letters[(k + r) % w.letters.size()]);
  return out;
}

/// Decision at desk scale. DISTINCT only on a differing invariant; EQUIVALENT only with a common code
/// reached by cyclic rotation (a conjugation), trihedral and tetrahedral moves.
inline ConjugacyResult conjugacy_test(const BraidWord& w1, const BraidWord& w2, int budget = kDefaultBudget) {
  if (w1.strands != w2.strands) throw Error("braids have different strand counts");
  w1.check();
  w2.check();
  const int c1 = closure_components(w1), c2 = closure_components(w2);
  if (c1 != c2)
    return {Verdict::DISTINCT, "closure components " + std::to_string(c1) + " vs " + std::to_string(c2)};
  const int e1 = exponent_sum(w1), e2 = exponent_sum(w2);
  if (e1 != e2) return {Verdict::DISTINCT, "exponent sum " + std::to_string(e1) + " vs " + std::to_string(e2)};

  struct Side {
    const BraidWord* w;
    std::map<CanonicalCode, std::pair<std::size_t, Reduction>> codes;
  };
  std::array<Side, 2> sides{Side{&w1, {}}, Side{&w2, {}}};
  int left = budget;
  const std::size_t rounds = std::max<std::size_t>({w1.length(), w2.length(), 1});
  for (std::size_t r = 0; r < rounds && left > 0; ++r)
    for (int s = 0; s < 2; ++s) {
      auto& side = sides[static_cast<std::size_t>(s)];
      if (r > 0 && r >= side.w->length()) continue;
      auto red = reduce_with_moves(build_from_braid(rotate(*side.w, r)), left);
      if (r == 0 && s == 1) {
        const int t1 = sides[0].codes.begin()->second.second.graph.count(VertexKind::TRIPLE);
        const int t2 = red.graph.count(VertexKind::TRIPLE);
        if (t1 % 4 != t2 % 4)
          return {Verdict::DISTINCT, "reduced triple count " + std::to_string(t1) + " vs " + std::to_string(t2) + " mod 4"};
      }
      const auto code = canonical_code(red.graph);
      auto& other = sides[static_cast<std::size_t>(1 - s)].codes;
      if (auto it = other.find(code); it != other.end()) {
        const auto& a = s == 0 ? std::pair{r, red} : it->second;
        const auto& b = s == 0 ? it->second : std::pair{r, red};
        std::ostringstream cert;
        cert << "rotate w1 by " << a.first << ", w2 by " << b.first << "; w1: " << a.second.trihedral << " trihedral, "
             << a.second.tetrahedral << " tetrahedral; w2: " << b.second.trihedral << " trihedral, " << b.second.tetrahedral
             << " tetrahedral; common code with " << a.second.graph.count(VertexKind::TRIPLE) << " triple vertices";
        return {Verdict::EQUIVALENT, cert.str()};
      }
      side.codes.emplace(code, std::pair{r, std::move(red)});
    }
  return {Verdict::UNDECIDED, left > 0 ? "no common code found" : "budget exhausted"};
}

/// Graph-level check: reduce both sides and compare codes.
namespace detail {

/// Codes reachable by up to `depth` tetrahedral moves, with the fewest moves needed.
inline std::map<CanonicalCode, int> tetrahedral_ball(const TraceGraph& g, int depth, int& budget) {
  std::map<CanonicalCode, int> seen{{canonical_code(g), 0}};
  std::vector<TraceGraph> layer{g};
  for (int d = 1; d <= depth && budget > 0; ++d) {
    std::vector<TraceGraph> next;
    for (const auto& x : layer)
      for (const auto& s : tetrahedral_sites(x)) {
        if (budget <= 0) break;
        --budget;
        try {
          auto h = apply_move(x, MoveKind::TETRAHEDRAL, s);
          if (seen.emplace(canonical_code(h), d).second) next.push_back(std::move(h));
        } catch (const PatternMismatch&) {
        }
      }
    layer = std::move(next);
  }
  return seen;
}

}  // namespace detail

/// Equivalence of two trace graphs: reduction on both sides, then a meet-in-the-middle search over
/// tetrahedral moves.
inline ConjugacyResult graphs_equivalent(const TraceGraph& a, const TraceGraph& b, int budget = kDefaultBudget) {
  if (a.structure.components() != b.structure.components())
    return {Verdict::DISTINCT, "component count " + std::to_string(a.structure.components()) + " vs " +
                                   std::to_string(b.structure.components())};
  int left = budget;
  const auto ra = reduce_with_moves(a, left);
  const auto rb = reduce_with_moves(b, left);
  auto found = [&](int extra) {
    return ConjugacyResult{Verdict::EQUIVALENT, std::to_string(ra.trihedral + rb.trihedral) + " trihedral, " +
                                                    std::to_string(ra.tetrahedral + rb.tetrahedral + extra) +
                                                    " tetrahedral moves to a common code"};
  };
  if (canonical_code(ra.graph) == canonical_code(rb.graph)) return found(0);
  for (int depth = 1; depth <= 2 && left > 0; ++depth) {
    const auto ba = detail::tetrahedral_ball(ra.graph, depth, left);
    const auto bb = detail::tetrahedral_ball(rb.graph, depth, left);
    int best = -1;
    for (const auto& [c, k] : ba)
      if (auto it = bb.find(c); it != bb.end() && (best < 0 || k + it->second < best)) best = k + it->second;
    if (best >= 0) return found(best);
  }
  return {Verdict::UNDECIDED, left > 0 ? "no common code found" : "budget exhausted"};
}

}  // namespace tgraph
