#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tgraph/bifurcation.hpp"

using namespace tgraph;

namespace {

struct Row {
  std::vector<double> x, z;
};

// Normal forms at the singular point, one row per branch, coefficients of r^0, r^1, ...
std::vector<Row> normal_table(SingularityKind k, double e) {
  switch (k) {
    case SingularityKind::QUADRUPLE: return {{{0}, {0, 1}}, {{0, 1}, {0, 1}}, {{0, -1}, {0, 1}}, {{0, e}, {0, 1}}};
    case SingularityKind::TANGENT_TRIPLE: return {{{0, 0, 1}, {0, 1}}, {{0}, {0, 1}}, {{0, 1}, {0, 1}}};
    case SingularityKind::INTERSECTED_CUSP: return {{{0, 0, 0, 1}, {0, 0, 1}}, {{0, 1}, {0, 1}}};
    case SingularityKind::CUBIC_TANGENCY: return {{{0, 0, 0, 1}, {0, 1}}, {{0}, {0, 1}}};
    case SingularityKind::RAMPHOIDAL_CUSP: return {{{0, 0, 0, 0, 0, 1}, {0, 0, 1}}};
    case SingularityKind::HORIZONTAL_CUSP: return {{{0, 0, 1}, {0, 0, 0, 1}}};
    case SingularityKind::MIXED_TANGENCY: return {{{0, 1}, {0, 0, 1}}, {{0, 1}, {0, 0, -1}}};
    case SingularityKind::EXTREME_TANGENCY: return {{{0, 1}, {0, 0, -2}}, {{0, 1}, {0, 0, -1}}};
    case SingularityKind::HORIZONTAL_TRIPLE_A: return {{{0, 1}, {0, 0, -1}}, {{0, 1}, {0, 1}}, {{0, -1}, {0, 1}}};
    case SingularityKind::HORIZONTAL_TRIPLE_B: return {{{0, 1}, {0, 0, -1}}, {{0, 1}, {0, 1}}, {{0, 0.5}, {0, 1}}};
  }
  return {};
}

bool same_poly(const Poly& p, const std::vector<double>& c) {
  const int n = std::max<int>(static_cast<int>(p.c.size()), static_cast<int>(c.size()));
  for (int k = 0; k < n; ++k)
    if (p.coef(k) != (k < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(k)] : 0.0)) return false;
  return true;
}

const LocusCurve* find_curve(const std::vector<LocusCurve>& loci, const std::string& eq) {
  for (const auto& c : loci)
    if (c.equation == eq) return &c;
  return nullptr;
}

// Nearest point of a parametrized curve by dense sampling.
template <class F>
double sampled_distance(F curve, double lo, double hi, double a, double b) {
  double best = 1e9;
  for (int k = 0; k <= 200000; ++k) {
    const auto [x, y] = curve(lo + (hi - lo) * k / 200000.0);
    best = std::min(best, std::hypot(x - a, y - b));
  }
  return best;
}

}  // namespace

TEST_CASE("polynomial real roots") {
  const auto q = Poly{-2, 0, 1}.real_roots();
  REQUIRE(q.size() == 2);
  CHECK(q[0] == Catch::Approx(-std::sqrt(2.0)));
  CHECK(q[1] == Catch::Approx(std::sqrt(2.0)));
  CHECK(Poly{1, 0, 1}.real_roots().empty());
  const auto r = (Poly{-1, 1} * Poly{-2, 1} * Poly{3, 1} * Poly{1, 0, 1}).real_roots();
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Catch::Approx(-3));
  CHECK(r[1] == Catch::Approx(1));
  CHECK(r[2] == Catch::Approx(2));
  CHECK(same_poly(Poly{0, 1}.compose(Poly{1, 1}), {1, 1}));
  CHECK(same_poly(Poly{0, 0, 1}.compose(Poly{1, 1}), {1, 2, 1}));
  CHECK((Poly{1, 2, 3}.reflected()).c == std::vector<double>{1, -2, 3});
}

TEST_CASE("deformations reduce to the normal forms") {
  for (auto k : all_singularity_kinds()) {
    const auto g = versal_deformation(k, 0, 0);
    const auto table = normal_table(k, kDefaultModulus);
    REQUIRE(g.branches.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      CHECK(same_poly(g.branches[i].x, table[i].x));
      CHECK(same_poly(g.branches[i].z, table[i].z));
    }
  }
}

TEST_CASE("deformation rows") {
  const auto m = versal_deformation(SingularityKind::MIXED_TANGENCY, 0.3, -0.2);
  REQUIRE(m.branches.size() == 2);
  CHECK(same_poly(m.branches[0].x, {0, 1}));
  CHECK(same_poly(m.branches[0].z, {0.2, 0, 1}));
  CHECK(same_poly(m.branches[1].x, {0.3, 1}));
  CHECK(same_poly(m.branches[1].z, {0, 0, -1}));
  const auto v = versal_deformation(SingularityKind::RAMPHOIDAL_CUSP, 0.5, 0.25);
  CHECK(same_poly(v.branches[0].x, {0, 0.25, 0, 0.5, 0, 1}));
  CHECK(versal_deformation(SingularityKind::QUADRUPLE, 0, 0, 3).modulus == 3.0);
  CHECK_THROWS_AS(versal_deformation(SingularityKind::QUADRUPLE, 0, 0, 1), Error);
}

TEST_CASE("the singular point itself is never general") {
  for (auto k : all_singularity_kinds()) CHECK_FALSE(classify_deformed(k, 0, 0, 1e-3).count(Tag::GENERAL));
}

TEST_CASE("listed loci") {
  const auto m = bifurcation_loci(SingularityKind::MIXED_TANGENCY);
  CHECK(find_curve(m, "b = 0"));
  CHECK(find_curve(m, "a^2 = 2b"));
  const auto c = bifurcation_loci(SingularityKind::CUBIC_TANGENCY);
  REQUIRE(c.size() == 1);
  CHECK(c[0].equation == "a^2 = 4b^3");
  const auto r = bifurcation_loci(SingularityKind::RAMPHOIDAL_CUSP);
  CHECK(find_curve(r, "b = 0"));
  CHECK(find_curve(r, "9a^2 = 20b"));
  for (auto k : all_singularity_kinds())
    for (const auto& l : bifurcation_loci(k)) {
      CHECK_FALSE(l.p.terms.empty());
      CHECK_FALSE(l.id.empty());
    }
}

TEST_CASE("quadruple point loci are symmetric under swapping the outer branches") {
  // Swapping a and b with branches 2 and 3 is a reflection in x, which also negates the modulus.
  const double e = 2.5;
  const auto L = bifurcation_loci(SingularityKind::QUADRUPLE, e);
  const auto M = bifurcation_loci(SingularityKind::QUADRUPLE, -e);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& l : L) {
    bool matched = false;
    for (const auto& m : M) {
      // Proportional polynomials after the swap.
      double ratio = 0;
      bool ok = true;
      for (int k = 0; k < 20 && ok; ++k) {
        const double a = u(rng), b = u(rng);
        const double p = l.p(b, a), q = m.p(a, b);
        if (std::abs(q) < 1e-9) continue;
        if (ratio == 0) ratio = p / q;
        ok = std::abs(p - ratio * q) < 1e-9;
      }
      matched = matched || (ok && ratio != 0);
    }
    CHECK(matched);
  }
}

TEST_CASE("mixed tangency classification") {
  for (double a : {-0.9, -0.4, 0.2, 0.7}) {
    const auto t = classify_deformed(SingularityKind::MIXED_TANGENCY, a, a * a / 2, 1e-3);
    CHECK(t.count(Tag::TANGENCY));
  }
  // (0.3, 0.7) against every locus of the kind, by sampling each curve in its own parameter.
  const double a = 0.3, b = 0.7;
  CHECK(std::abs(b) > 1e-3);
  CHECK(sampled_distance([](double s) { return std::pair{s, s * s / 2}; }, -2, 2, a, b) > 1e-3);
  CHECK(sampled_distance([](double s) { return std::pair{s, s * s}; }, -2, 2, a, b) > 1e-3);
  CHECK(classify_deformed(SingularityKind::MIXED_TANGENCY, a, b, 1e-3) == std::set<Tag>{Tag::GENERAL});
  // Both extrema lie on the other branch when b = a^2.
  CHECK(classify_deformed(SingularityKind::MIXED_TANGENCY, 0.6, 0.36, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::MIXED_TANGENCY, 0.6, 0.0, 1e-3).count(Tag::MIXED_PAIR));
}

TEST_CASE("mixed tangency loci agree with the classifier in both directions") {
  const auto rep = locus_consistency(SingularityKind::MIXED_TANGENCY, 200, 1e-3);
  CHECK(rep.flagged > 0);
  CHECK(rep.detected_near_loci());
  CHECK(rep.loci_detected());
  CHECK(rep.pass());
}

TEST_CASE("tangent triple point") {
  for (double b : {-0.8, -0.3, 0.4, 0.9}) CHECK(classify_deformed(SingularityKind::TANGENT_TRIPLE, b * b, b, 1e-3).count(Tag::TRIPLE));
  CHECK(classify_deformed(SingularityKind::TANGENT_TRIPLE, 0, 0.5, 1e-3).count(Tag::TANGENCY));
  // The parabola branch also touches the slanted line at height 1/2.
  CHECK(classify_deformed(SingularityKind::TANGENT_TRIPLE, 0.1, 0.35, 1e-3).count(Tag::TANGENCY));
  CHECK(classify_deformed(SingularityKind::TANGENT_TRIPLE, 0.1, 0.5, 1e-3) == std::set<Tag>{Tag::GENERAL});
}

TEST_CASE("intersected cusp tangency follows the parametric curve") {
  // Tangency of (r^3 - b r, r^2) and (s - a, s): equal positions and slopes at s = r^2.
  for (double r : {-0.4, -0.1, 0.2, 0.5, 0.7}) {
    const double a = 2 * r * r * r - r * r, b = 3 * r * r - 2 * r;
    const auto t = classify_deformed(SingularityKind::INTERSECTED_CUSP, a, b, 1e-3);
    CHECK(t.count(Tag::TANGENCY));
  }
  // The curve b^2 + 3a = 0 only meets it where r = 0 or r = 1/3.
  for (double b : {-0.8, -0.5, 0.5, 0.9}) {
    const double a = -b * b / 3;
    const double d = sampled_distance([](double r) { return std::pair{2 * r * r * r - r * r, 3 * r * r - 2 * r}; }, -3, 3, a, b);
    CHECK(d > 1e-2);
    CHECK_FALSE(classify_deformed(SingularityKind::INTERSECTED_CUSP, a, b, 1e-3).count(Tag::TANGENCY));
  }
  CHECK(classify_deformed(SingularityKind::INTERSECTED_CUSP, 0.3, 0.3, 1e-3).count(Tag::TRIPLE));
  CHECK_FALSE(classify_deformed(SingularityKind::INTERSECTED_CUSP, -0.3, -0.3, 1e-3).count(Tag::TRIPLE));
  CHECK(classify_deformed(SingularityKind::INTERSECTED_CUSP, 0.5, 0, 1e-3).count(Tag::CUSP));
}

TEST_CASE("ramphoidal cusp self-tangency") {
  for (double a : {-0.9, -0.5, -0.2}) {
    const double b = a * a / 4;
    // x(r) = x'(r) = 0 at r^2 = -a/2.
    const double r = std::sqrt(-a / 2);
    CHECK(std::abs(r * r * r * r * r + a * r * r * r + b * r) < 1e-12);
    CHECK(std::abs(5 * r * r * r * r + 3 * a * r * r + b) < 1e-12);
    CHECK(classify_deformed(SingularityKind::RAMPHOIDAL_CUSP, a, b, 1e-3).count(Tag::TANGENCY));
  }
  for (double a : {-0.9, -0.5, 0.5}) CHECK(classify_deformed(SingularityKind::RAMPHOIDAL_CUSP, a, 9 * a * a / 20, 1e-3) ==
                                             std::set<Tag>{Tag::GENERAL});
  CHECK(classify_deformed(SingularityKind::RAMPHOIDAL_CUSP, 0.5, 0.0625, 1e-3) == std::set<Tag>{Tag::GENERAL});
}

TEST_CASE("cubic tangency") {
  for (double b : {0.1, 0.4, 0.9}) {
    const double a = 2 * b * std::sqrt(b);
    CHECK(classify_deformed(SingularityKind::CUBIC_TANGENCY, a, b, 1e-3).count(Tag::TANGENCY));
    CHECK(classify_deformed(SingularityKind::CUBIC_TANGENCY, -a, b, 1e-3).count(Tag::TANGENCY));
  }
  CHECK(classify_deformed(SingularityKind::CUBIC_TANGENCY, 0.5, -0.5, 1e-3) == std::set<Tag>{Tag::GENERAL});
}

TEST_CASE("horizontal cusp") {
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_CUSP, 0.4, 0.16, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_CUSP, -0.4, 0.16, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_CUSP, 0.6, -0.12, 1e-3).count(Tag::CUBICAL));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_CUSP, 0.6, 0, 1e-3).count(Tag::CUSP));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_CUSP, 0.2, 0.5, 1e-3) == std::set<Tag>{Tag::GENERAL});
}

TEST_CASE("extreme tangency") {
  const double a = 0.5;
  CHECK(classify_deformed(SingularityKind::EXTREME_TANGENCY, a, -2 * a * a, 1e-3).count(Tag::TANGENCY));
  CHECK(classify_deformed(SingularityKind::EXTREME_TANGENCY, a, 2 * a * a, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::EXTREME_TANGENCY, a, -a * a, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::EXTREME_TANGENCY, a, 0, 1e-3).count(Tag::EXTREME_PAIR));
}

TEST_CASE("horizontal triple points") {
  // Triple point: the crossing of the two lines lies on the parabola.
  const double a = 0.5, b = (3 - std::sqrt(12.0)) / 2;  // (a - b)^2 = 2(a + b)
  CHECK(std::abs((a - b) * (a - b) - 2 * (a + b)) < 1e-12);
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_A, a, b, 1e-3).count(Tag::TRIPLE));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_A, 0, 0.4, 1e-3).count(Tag::CRITICAL_CROSSING));
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_A, -0.25, 0.6, 1e-3).count(Tag::TANGENCY));
  // The crossing at the height of the extremum is no singularity of the diagram.
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_A, 0.4, -0.4, 1e-3) == std::set<Tag>{Tag::GENERAL});
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_B, 0.6, 0.5, 1e-3).count(Tag::TANGENCY));
  const double b2 = 0.2, a2 = 1 - 2 * b2 - std::sqrt(1 - 2 * b2);  // (a + 2b)^2 = 2(a + b)
  CHECK(std::abs((a2 + 2 * b2) * (a2 + 2 * b2) - 2 * (a2 + b2)) < 1e-12);
  CHECK(classify_deformed(SingularityKind::HORIZONTAL_TRIPLE_B, a2, b2, 1e-3).count(Tag::TRIPLE));
}

TEST_CASE("locus distance and samples") {
  const auto loci = bifurcation_loci(SingularityKind::MIXED_TANGENCY);
  const auto* t = find_curve(loci, "a^2 = 2b");
  REQUIRE(t);
  CHECK(locus_distance(*t, 0.5, 0.125, 1e-3) < 1e-12);
  CHECK(locus_distance(*t, 0.5, 0.125 + 5e-4, 1e-3) == Catch::Approx(5e-4 / std::hypot(0.5, 1.0)).epsilon(1e-3));
  for (const auto& [a, b] : locus_samples(*t, 10)) CHECK(std::abs(a * a - 2 * b) < 1e-12);
  const auto rl = bifurcation_loci(SingularityKind::RAMPHOIDAL_CUSP);
  const auto* half = find_curve(rl, "a^2 = 4b, a <= 0");
  REQUIRE(half);
  for (const auto& [a, b] : locus_samples(*half, 10)) CHECK(a <= 0);
  CHECK(locus_distance(*half, 0.5, 0.0625, 1e-3) == std::numeric_limits<double>::infinity());
}
