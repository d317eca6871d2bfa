#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <map>
#include <random>

#include "tgraph/event_detection.hpp"

using namespace tgraph;

namespace {

MonotoneArc make_arc(int index, const std::function<Point2(double)>& f, double lo, double hi, int n) {
  MonotoneArc a;
  a.ref = {1, index};
  for (int k = 0; k <= n; ++k) {
    const double z = lo + (hi - lo) * k / n;
    a.z.push_back(z);
    a.xy.push_back(f(z));
    a.position.push_back(z);
  }
  return a;
}

// Arcs J1, J2, J3 of the touching triple point example, with J1 bent by tau and tilted by delta.
ArcDecomposition touching_triple(double tau, double delta, int n = 200) {
  ArcDecomposition d;
  d.arcs.push_back(make_arc(1, [=](double u) { return Point2{tau * u * u + delta * u, 0.0}; }, -0.5, 0.5, n));
  d.arcs.push_back(make_arc(2, [](double u) { return Point2{u, -1.0}; }, -0.5, 0.5, n));
  d.arcs.push_back(make_arc(3, [](double u) { return Point2{-u, 1.0}; }, -0.5, 0.5, n));
  d.arcs_per_component = {3};
  d.first_arc = {0};
  d.samples_per_component = {static_cast<std::size_t>(n)};
  return d;
}

std::vector<Point3> random_component(std::mt19937_64& rng, int wind, double wiggle, std::size_t n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::array<double, 8> a{};
  for (auto& v : a) v = U(rng);
  const double phase = U(rng);
  return sample_curve(
      [&](double s) {
        const double w = kTwoPi * s;
        const double x = 0.35 * (a[0] * std::cos(w) + a[1] * std::sin(2 * w) + a[2] * std::cos(3 * w + a[3]));
        const double y = 0.35 * (a[4] * std::sin(w) + a[5] * std::cos(2 * w) + a[6] * std::sin(3 * w + a[7]));
        return Point3{x, y, 2.0 * wind * s + wiggle * std::sin(3 * w + phase) + 0.123};
      },
      n);
}

// Random links whose events are all resolved at the default tolerance.
std::vector<SampledLink> random_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<SampledLink> out;
  for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
    SampledLink link;
    link.components.push_back(random_component(rng, 1 + k % 2, 0.45, 60));
    if (k % 3 == 0) link.components.push_back(random_component(rng, 1, 0.3, 50));
    try {
      find_events(arc_decomposition(link));
    } catch (const UnresolvedEvent&) {
      continue;
    }
    out.push_back(link);
  }
  return out;
}

}  // namespace

TEST_CASE("rotation matches the projected coordinates of the example arcs") {
  const auto d = touching_triple(1.0, 0.0);
  for (double t : {0.1, 0.7, 2.0})
    for (double u : {-0.3, 0.1, 0.45}) CHECK(rotated_x(d.arcs[1].at(u), t) == Catch::Approx(u * std::cos(t) + std::sin(t)));
  // Crossing of J2 and J3 alone at t = eps sits at x = 0, z = -tan eps.
  ArcDecomposition two = d;
  two.arcs.erase(two.arcs.begin());
  two.arcs_per_component = {2};
  for (double eps : {0.01, 0.1, 0.3}) {
    const auto pd = project_diagram(two, eps);
    REQUIRE(pd.crossings.size() == 1);
    CHECK(pd.crossings[0].x == Catch::Approx(0.0).margin(1e-9));
    CHECK(pd.crossings[0].z == Catch::Approx(-std::tan(eps)).margin(1e-9));
  }
}

TEST_CASE("touching triple point is detected as non-transversal") {
  const auto d = touching_triple(1.0, 0.0);
  const auto evs = find_events(d);
  std::vector<Event> triples;
  for (const auto& e : evs)
    if (e.kind == EventKind::TRIPLE_III) triples.push_back(e);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0].t == Catch::Approx(0.0).margin(1e-12));
  CHECK(triples[0].z == Catch::Approx(0.0).margin(1e-12));
  CHECK(triples[1].t == Catch::Approx(kPi));
  for (const auto& e : triples) {
    CHECK_FALSE(e.transversal);
    CHECK_FALSE(transversality_check(d, e));
    CHECK(e.sign == 0);
  }
}

TEST_CASE("perturbing the touching triple point splits it into two transversal roots") {
  for (double delta : {0.05, -0.08, 0.12}) {
    const auto d = touching_triple(1.0, delta, 400);
    // Oracle: sign changes of the analytic collinearity function on a dense grid.
    const auto D = [&](double u) { return -2.0 * (u * u + delta * u); };
    int expected = 0;
    for (int k = 0; k < 20000; ++k) {
      const double a = -0.5 + k / 20000.0, b = -0.5 + (k + 1) / 20000.0;
      expected += (D(a) > 0) != (D(b) > 0);
    }
    const auto evs = find_events(d);
    int found = 0;
    for (const auto& e : evs)
      if (e.kind == EventKind::TRIPLE_III && e.t < kPi) {
        ++found;
        CHECK(e.transversal);
        CHECK(e.sign != 0);
      }
    CHECK(found == expected);
    CHECK(expected == 2);
  }
}

TEST_CASE("parallel straight strands produce no events") {
  ArcDecomposition d;
  d.arcs.push_back(make_arc(1, [](double) { return Point2{0.1, 0.2}; }, -1, 1, 10));
  d.arcs.push_back(make_arc(2, [](double) { return Point2{-0.3, 0.1}; }, -1, 1, 10));
  d.arcs_per_component = {2};
  d.first_arc = {0};
  d.samples_per_component = {10};
  CHECK(find_events(d).empty());
}

TEST_CASE("events come in symmetric pairs with opposite triple signs") {
  for (const auto& link : random_corpus(3, 12)) {
    const auto d = arc_decomposition(link);
    const auto evs = find_events(d);
    for (const auto& e : evs) {
      const double tp = wrap_angle(e.t + kPi);
      auto it = std::find_if(evs.begin(), evs.end(), [&](const Event& o) {
        return o.kind == e.kind && angle_dist(o.t, tp) < 1e-9 && o.z == Catch::Approx(e.z).margin(1e-9);
      });
      REQUIRE(it != evs.end());
      auto rev = e.arcs;
      std::reverse(rev.begin(), rev.end());
      CHECK(it->arcs == rev);
      if (e.kind == EventKind::TRIPLE_III && e.transversal) CHECK(it->sign == -e.sign);
    }
  }
}

TEST_CASE("codimension-1 events other than triple points are transversal") {
  int checked = 0;
  for (const auto& link : random_corpus(17, 16)) {
    const auto d = arc_decomposition(link);
    for (const auto& e : find_events(d))
      if (e.kind != EventKind::TRIPLE_III) {
        CHECK(e.transversal);
        ++checked;
      }
  }
  CHECK(checked > 50);
}

TEST_CASE("crossing count is constant between events and jumps as the event kind dictates") {
  for (const auto& link : random_corpus(29, 8)) {
    const auto d = arc_decomposition(link);
    const auto evs = find_events(d);
    REQUIRE(evs.size() >= 2);
    std::vector<int> counts;
    for (std::size_t k = 0; k < evs.size(); ++k) {
      const double a = evs[k].t;
      double b = evs[(k + 1) % evs.size()].t;
      if (b <= a) b += kTwoPi;
      const auto c1 = project_diagram(d, a + 0.25 * (b - a)).crossings.size();
      const auto c2 = project_diagram(d, a + 0.75 * (b - a)).crossings.size();
      CHECK(c1 == c2);
      counts.push_back(static_cast<int>(c1));
    }
    for (std::size_t k = 0; k < evs.size(); ++k) {
      const int jump = counts[k] - counts[(k + evs.size() - 1) % evs.size()];
      switch (evs[k].kind) {
        case EventKind::TRIPLE_III: CHECK(jump == 0); break;
        // A PL corner at the extremum can fold both crossings into the critical moment.
        case EventKind::CRITICAL_IV: CHECK((jump == 0 || std::abs(jump) == 2)); break;
        case EventKind::TANGENCY_II: CHECK(std::abs(jump) == 2); break;
        case EventKind::CUSP_I: CHECK(std::abs(jump) == 1); break;
      }
    }
  }
}

TEST_CASE("triple sign agrees with a finite-difference passage oracle") {
  int checked = 0;
  for (const auto& link : random_corpus(41, 10)) {
    const auto d = arc_decomposition(link);
    for (const auto& e : find_events(d)) {
      if (e.kind != EventKind::TRIPLE_III || !e.transversal) continue;
      const auto& P = d.arcs[static_cast<std::size_t>(e.arcs[0])];
      const auto& Q = d.arcs[static_cast<std::size_t>(e.arcs[1])];
      const auto& R = d.arcs[static_cast<std::size_t>(e.arcs[2])];
      // x of Q minus x of the P-R crossing, with the crossing height found by bisection.
      auto f = [&](double t) {
        auto g = [&](double z) { return rotated_x(R.at(z) - P.at(z), t); };
        const double lo = std::max({P.z_lo(), Q.z_lo(), R.z_lo(), e.z - 1e-3});
        const double hi = std::min({P.z_hi(), Q.z_hi(), R.z_hi(), e.z + 1e-3});
        REQUIRE((g(lo) > 0) != (g(hi) > 0));
        const double z = bisect(g, lo, hi, 1e-15);
        return rotated_x(Q.at(z) - P.at(z), t);
      };
      const double h = 1e-7;
      const int oracle = sign_of(f(e.t + h) - f(e.t - h)) * P.direction * Q.direction * R.direction;
      CHECK(e.sign == oracle);
      // Reversed time: f(-t) has the opposite slope.
      CHECK(sign_of(f(e.t - h) - f(e.t + h)) * P.direction * Q.direction * R.direction == -e.sign);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("event list serialization") {
  const auto d = touching_triple(1.0, 0.05, 40);
  const auto text = format_events(d, find_events(d));
  CHECK(text.find("TRIPLE_III") != std::string::npos);
  CHECK(text.find("1:1") != std::string::npos);
}
