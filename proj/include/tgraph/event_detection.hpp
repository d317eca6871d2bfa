#pragma once

// Codimension-1 moments of the rotation family rot_t(L), t in [0, 2pi).
//
// Events are solved height-first. For arcs a, b alive at height z the chord
// C(z) = P_b(z) - P_a(z) is horizontal, and a passes over b in the view at
// exactly t = view_time(C(z)). Each pair of arcs therefore traces a curve
// t(z) on the torus, and every event is a special point of these curves:
//
//   TRIPLE_III   three points collinear: D(z) = cross(P_b - P_a, P_c - P_a) = 0
//   TANGENCY_II  interior extremum of t(z) (for PL data, at breakpoints)
//   CUSP_I       the two arcs through an extremum become parallel in the view
//   CRITICAL_IV  another arc passes behind or in front of an extremum point

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tgraph/errors.hpp"
#include "tgraph/link_geometry.hpp"
#include "tgraph/numeric.hpp"

namespace tgraph {

enum class EventKind { CUSP_I, TANGENCY_II, TRIPLE_III, CRITICAL_IV };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::CUSP_I: return "CUSP_I";
    case EventKind::TANGENCY_II: return "TANGENCY_II";
    case EventKind::TRIPLE_III: return "TRIPLE_III";
    case EventKind::CRITICAL_IV: return "CRITICAL_IV";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(const std::string& s) {
  for (auto k : {EventKind::CUSP_I, EventKind::TANGENCY_II, EventKind::TRIPLE_III, EventKind::CRITICAL_IV})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct Event {
  double t = 0;
  EventKind kind = EventKind::TRIPLE_III;
  double x = 0;
  double z = 0;
  // Global arc ids. TRIPLE: top, middle, bottom in the view. TANGENCY: over,
  // under. CUSP: over, under (the two arcs at the extremum). CRITICAL: the
  // strand at the extremum (arc_in, arc_out) and the passing arc, listed
  // over-side first.
  std::vector<int> arcs;
  int extremum = -1;  // CUSP and CRITICAL
  int sign = 0;       // TRIPLE only; 0 means none
  bool transversal = true;
};

struct EventOptions {
  std::size_t grid_size = 0;  // 0 selects 4 x sample count
  double tol = 1e-10;
  bool compute_signs = true;
  bool reject_close = true;  // UnresolvedEvent for events closer than 2 tol
};

namespace detail {

inline std::vector<double> merged_breaks(const MonotoneArc& a, const MonotoneArc& b, double lo, double hi,
                                         const MonotoneArc* c = nullptr) {
  std::vector<double> hs{lo, hi};
  auto add = [&](const MonotoneArc& m) {
    for (double h : m.z)
      if (h > lo && h < hi) hs.push_back(h);
  };
  add(a);
  add(b);
  if (c) add(*c);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  return hs;
}

inline Point2 slope_on(const MonotoneArc& m, double z0, double z1) {
  const Point2 p0 = m.at(z0), p1 = m.at(z1);
  return {(p1.x - p0.x) / (z1 - z0), (p1.y - p0.y) / (z1 - z0)};
}

inline double collinearity(const MonotoneArc& a, const MonotoneArc& b, const MonotoneArc& c, double z) {
  const Point2 pa = a.at(z);
  return cross(b.at(z) - pa, c.at(z) - pa);
}

/// Roots of q(s) = A s^2 + B s + C in [0, 1). Flags a double root.
inline void quadratic_roots(double A, double B, double C, double scale, std::vector<std::pair<double, bool>>& out) {
  const double eps = 1e-13 * scale;
  if (std::abs(A) <= eps) {
    if (std::abs(B) <= eps) return;
    const double s = -C / B;
    if (s >= 0 && s < 1) out.push_back({s, false});
    return;
  }
  const double disc = B * B - 4 * A * C;
  if (disc < -eps * scale) return;
  if (std::abs(disc) <= eps * scale) {
    const double s = -B / (2 * A);
    if (s >= 0 && s < 1) out.push_back({s, true});
    return;
  }
  const double sq = std::sqrt(std::max(disc, 0.0));
  const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  double r1 = q / A, r2 = q != 0 ? C / q : -B / A;
  if (r1 > r2) std::swap(r1, r2);
  for (double s : {r1, r2})
    if (s >= 0 && s < 1) out.push_back({s, false});
}

/// Sign of the t-derivative of x(Q) minus x of the P-R crossing, from the
/// chords P->Q, P->R and their z-derivatives.
inline int passage_sign(Point2 cpq, Point2 dpq, Point2 cpr, Point2 dpr, double t) {
  const double gz = rotated_x(dpr, t);
  if (std::abs(gz) < 1e-12) throw TangentialContact("trace curve tangent to the slice at a triple point");
  const double df = -rotated_y(cpq, t) + rotated_x(dpq, t) * rotated_y(cpr, t) / gz;
  if (std::abs(df) < 1e-12) throw TangentialContact("middle strand tangent at the triple point");
  return sign_of(df);
}

}  // namespace detail

/// Sign of a triple point: direction in which the middle strand passes the
/// crossing of the other two, times the product of the three arc directions.
/// Partner events at t + pi carry the opposite sign.
inline int triple_sign(const ArcDecomposition& d, const Event& ev) {
  if (ev.kind != EventKind::TRIPLE_III || ev.arcs.size() != 3) throw Error("triple_sign needs a TRIPLE_III event");
  const auto& P = d.arcs[static_cast<std::size_t>(ev.arcs[0])];
  const auto& Q = d.arcs[static_cast<std::size_t>(ev.arcs[1])];
  const auto& R = d.arcs[static_cast<std::size_t>(ev.arcs[2])];
  const double z = ev.z, t = ev.t;
  const double h = 1e-7;
  const double z0 = std::max({P.z_lo(), Q.z_lo(), R.z_lo(), z - h});
  const double z1 = std::min({P.z_hi(), Q.z_hi(), R.z_hi(), z + h});
  const Point2 cpr = R.at(z) - P.at(z), cpq = Q.at(z) - P.at(z);
  const Point2 dpr = detail::slope_on(R, z0, z1) - detail::slope_on(P, z0, z1);
  const Point2 dpq = detail::slope_on(Q, z0, z1) - detail::slope_on(P, z0, z1);
  return detail::passage_sign(cpq, dpq, cpr, dpr, t) * P.direction * Q.direction * R.direction;
}

/// True iff the event function changes sign across the root.
inline bool transversality_check(const ArcDecomposition& d, const Event& ev, double h = 1e-6) {
  auto arc = [&](std::size_t k) -> const MonotoneArc& { return d.arcs[static_cast<std::size_t>(ev.arcs[k])]; };
  switch (ev.kind) {
    case EventKind::TRIPLE_III: {
      const auto &a = arc(0), &b = arc(1), &c = arc(2);
      const double lo = std::max({a.z_lo(), b.z_lo(), c.z_lo()});
      const double hi = std::min({a.z_hi(), b.z_hi(), c.z_hi()});
      const double zl = std::max(lo, ev.z - h), zh = std::min(hi, ev.z + h);
      const double fl = detail::collinearity(a, b, c, zl), fh = detail::collinearity(a, b, c, zh);
      return fl != 0 && fh != 0 && (fl > 0) != (fh > 0);
    }
    case EventKind::TANGENCY_II: {
      const auto &a = arc(0), &b = arc(1);
      const double lo = std::max(a.z_lo(), b.z_lo()), hi = std::min(a.z_hi(), b.z_hi());
      const double zl = std::max(lo, ev.z - h), zh = std::min(hi, ev.z + h);
      const Point2 C = b.at(ev.z) - a.at(ev.z);
      const double fl = cross(C, detail::slope_on(b, zl, ev.z) - detail::slope_on(a, zl, ev.z));
      const double fh = cross(C, detail::slope_on(b, ev.z, zh) - detail::slope_on(a, ev.z, zh));
      return fl != 0 && fh != 0 && (fl > 0) != (fh > 0);
    }
    case EventKind::CUSP_I: {
      const auto& e = d.extrema[static_cast<std::size_t>(ev.extremum)];
      const auto &a = d.arcs[static_cast<std::size_t>(e.arc_in)], &b = d.arcs[static_cast<std::size_t>(e.arc_out)];
      const Point2 v = a.slope(e.z) - b.slope(e.z);
      const double fl = rotated_x(v, ev.t - h), fh = rotated_x(v, ev.t + h);
      return fl != 0 && fh != 0 && (fl > 0) != (fh > 0);
    }
    case EventKind::CRITICAL_IV: {
      const auto& e = d.extrema[static_cast<std::size_t>(ev.extremum)];
      const int other = ev.arcs[0] == e.arc_in || ev.arcs[0] == e.arc_out ? ev.arcs[2] : ev.arcs[0];
      const Point2 v = d.arcs[static_cast<std::size_t>(other)].at(e.z) - e.xy;
      const double fl = rotated_x(v, ev.t - h), fh = rotated_x(v, ev.t + h);
      return fl != 0 && fh != 0 && (fl > 0) != (fh > 0);
    }
  }
  return false;
}

inline std::vector<Event> find_events(const ArcDecomposition& d, const EventOptions& opt = {}) {
  std::vector<Event> out;
  const int na = d.total_arcs();
  auto arc = [&](int id) -> const MonotoneArc& { return d.arcs[static_cast<std::size_t>(id)]; };

  // Emits the event pair (t, t + pi): `order` lists arcs over-side first at t.
  auto emit_pair = [&](EventKind kind, double t, double z, Point2 at, std::vector<int> order, int extremum) {
    for (int half = 0; half < 2; ++half) {
      Event ev;
      ev.kind = kind;
      ev.t = wrap_angle(t + half * kPi);
      ev.z = z;
      ev.x = rotated_x(at, ev.t);
      ev.arcs = order;
      ev.extremum = extremum;
      out.push_back(ev);
      std::reverse(order.begin(), order.end());
    }
  };

  // Triple points.
  for (int ia = 0; ia < na; ++ia)
    for (int ib = ia + 1; ib < na; ++ib)
      for (int ic = ib + 1; ic < na; ++ic) {
        const auto &A = arc(ia), &B = arc(ib), &C = arc(ic);
        const double lo = std::max({A.z_lo(), B.z_lo(), C.z_lo()});
        const double hi = std::min({A.z_hi(), B.z_hi(), C.z_hi()});
        if (hi <= lo) continue;
        const auto hs = detail::merged_breaks(A, B, lo, hi, &C);
        std::vector<double> seen;
        for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
          const double z0 = hs[k], z1 = hs[k + 1];
          const double f0 = detail::collinearity(A, B, C, z0);
          const double fm = detail::collinearity(A, B, C, 0.5 * (z0 + z1));
          const double f1 = detail::collinearity(A, B, C, z1);
          const double qa = 2 * f1 + 2 * f0 - 4 * fm, qb = f1 - f0 - qa;
          const double scale = std::max({std::abs(f0), std::abs(fm), std::abs(f1), 1e-300});
          if (std::max({std::abs(f0), std::abs(fm), std::abs(f1)}) < 1e-15)
            throw UnresolvedEvent("three strands collinear over a whole segment");
          std::vector<std::pair<double, bool>> roots;
          detail::quadratic_roots(qa, qb, f0, scale, roots);
          for (auto [s, dbl] : roots) {
            const double z = z0 + s * (z1 - z0);
            if (!seen.empty() && std::abs(seen.back() - z) < 1e-12) continue;
            seen.push_back(z);
            const Point2 pa = A.at(z), pb = B.at(z), pc = C.at(z);
            // Two arcs meeting at a shared extremum make D vanish trivially.
            auto near = [](Point2 u, Point2 v) { return std::abs(u.x - v.x) + std::abs(u.y - v.y) < 1e-12; };
            if (near(pa, pb) || near(pa, pc) || near(pb, pc)) continue;
            const Point2 chord = std::abs((pb - pa).x) + std::abs((pb - pa).y) > std::abs((pc - pa).x) + std::abs((pc - pa).y)
                                     ? pb - pa
                                     : pc - pa;
            const double t = view_time(chord);
            std::vector<std::pair<double, int>> by_depth{
                {rotated_y(pa, t), ia}, {rotated_y(pb, t), ib}, {rotated_y(pc, t), ic}};
            std::sort(by_depth.begin(), by_depth.end());
            emit_pair(EventKind::TRIPLE_III, t, z, pa, {by_depth[0].second, by_depth[1].second, by_depth[2].second},
                      -1);
            out[out.size() - 1].transversal = !dbl;
            out[out.size() - 2].transversal = !dbl;
          }
        }
      }

  // Tangencies: sign changes of cross(C, C') across breakpoints.
  for (int ia = 0; ia < na; ++ia)
    for (int ib = ia + 1; ib < na; ++ib) {
      const auto &A = arc(ia), &B = arc(ib);
      const double lo = std::max(A.z_lo(), B.z_lo()), hi = std::min(A.z_hi(), B.z_hi());
      if (hi <= lo) continue;
      const auto hs = detail::merged_breaks(A, B, lo, hi);
      // Piece signs, with zero pieces (constant view time) folded into runs.
      int prev_sign = 0;
      double prev_end = lo;
      for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
        const double z0 = hs[k], z1 = hs[k + 1];
        const Point2 D = detail::slope_on(B, z0, z1) - detail::slope_on(A, z0, z1);
        const Point2 Cm = B.at(0.5 * (z0 + z1)) - A.at(0.5 * (z0 + z1));
        const double cr = cross(Cm, D);
        const int s = std::abs(cr) <= 1e-14 * (std::hypot(Cm.x, Cm.y) * std::hypot(D.x, D.y) + 1e-300) ? 0 : sign_of(cr);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
          const double z = 0.5 * (prev_end + z0);
          const Point2 pa = A.at(z);
          emit_pair(EventKind::TANGENCY_II, view_time(B.at(z) - pa), z, pa, {ia, ib}, -1);
        }
        prev_sign = s;
        prev_end = z1;
      }
    }

  // Cusps and critical crossings at each extremum.
  for (std::size_t ei = 0; ei < d.extrema.size(); ++ei) {
    const auto& e = d.extrema[ei];
    const auto &in = arc(e.arc_in), &outa = arc(e.arc_out);
    const Point2 v = in.slope(e.z) - outa.slope(e.z);
    if (std::abs(v.x) + std::abs(v.y) == 0.0) throw UnresolvedEvent("extremum with parallel adjacent segments");
    // Max: the pair curve lives below, chord P_out - P_in ~ -h (s_out - s_in).
    const Point2 dir = e.maximum ? v : Point2{-v.x, -v.y};
    emit_pair(EventKind::CUSP_I, view_time(dir), e.z, e.xy, {e.arc_in, e.arc_out}, static_cast<int>(ei));

    for (int j = 0; j < na; ++j) {
      if (j == e.arc_in || j == e.arc_out) continue;
      const auto& J = arc(j);
      if (e.z < J.z_lo() || e.z > J.z_hi()) continue;
      if (e.z == J.z_lo() || e.z == J.z_hi())
        throw UnresolvedEvent("extremum level coincides with an arc end");
      const Point2 c = J.at(e.z) - e.xy;
      if (c.x == 0 && c.y == 0) throw InvalidLink("strand passes through an extremum");
      emit_pair(EventKind::CRITICAL_IV, view_time(c), e.z, e.xy, {e.arc_in, e.arc_out, j}, static_cast<int>(ei));
    }
  }

  for (auto& ev : out) {
    if (ev.kind == EventKind::TRIPLE_III) {
      ev.transversal = ev.transversal && transversality_check(d, ev);
      if (opt.compute_signs && ev.transversal) ev.sign = triple_sign(d, ev);
    } else {
      ev.transversal = transversality_check(d, ev);
    }
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return std::tie(a.t, a.kind, a.arcs, a.z) < std::tie(b.t, b.kind, b.arcs, b.z);
  });
  if (opt.reject_close)
    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto& a = out[k];
      const auto& b = out[(k + 1) % out.size()];
      if (out.size() > 1 && angle_dist(a.t, b.t) < 2 * opt.tol)
        throw UnresolvedEvent(to_string(a.kind) + " and " + to_string(b.kind) + " closer than tol at t = " +
                              format_sig(a.t, 12));
    }
  return out;
}

inline std::vector<Event> find_events(const SampledLink& link, std::size_t grid_size, double tol) {
  if (grid_size != 0 && grid_size < 4 * link.sample_count())
    throw Error("grid_size must be at least 4 x the number of samples");
  EventOptions opt;
  opt.grid_size = grid_size;
  opt.tol = tol;
  return find_events(arc_decomposition(link), opt);
}

// Event list text: "t kind x z sign transversal i:q ...".
inline std::string format_events(const ArcDecomposition& d, const std::vector<Event>& evs) {
  std::string s;
  for (const auto& ev : evs) {
    s += format_sig(ev.t, 12) + " " + to_string(ev.kind) + " " + format_sig(ev.x, 12) + " " + format_sig(ev.z, 12) +
         " " + (ev.sign > 0 ? "+1" : ev.sign < 0 ? "-1" : "NONE") + " " + (ev.transversal ? "1" : "0");
    for (int a : ev.arcs) {
      const auto& r = d.arcs[static_cast<std::size_t>(a)].ref;
      s += " " + std::to_string(r.component) + ":" + std::to_string(r.index);
    }
    s += "\n";
  }
  return s;
}

}  // namespace tgraph
