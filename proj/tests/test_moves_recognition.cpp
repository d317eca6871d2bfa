#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tgraph/moves_recognition.hpp"

using namespace tgraph;

namespace {

TraceGraph shifted(TraceGraph g, double dt) {
  for (auto& v : g.vertices) v.t = wrap_angle(v.t + dt);
  for (auto& a : g.arcs)
    for (auto& p : a.points) p.t += dt;
  return g;
}

std::vector<int> triples(const TraceGraph& g) {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (g.vertices[static_cast<std::size_t>(v)].kind == VertexKind::TRIPLE) out.push_back(v);
  return out;
}

// Heights of triple vertices, each symmetric pair once.
std::vector<double> triple_heights(const TraceGraph& g) {
  std::vector<double> zs;
  for (const auto& v : g.vertices)
    if (v.kind == VertexKind::TRIPLE && v.t < kPi) zs.push_back(v.z);
  std::sort(zs.begin(), zs.end());
  return zs;
}

}  // namespace

TEST_CASE("move catalogue names round trip") {
  CHECK(all_move_kinds().size() == 11);
  for (auto k : all_move_kinds()) CHECK(parse_move_kind(to_string(k)) == k);
  CHECK_FALSE(parse_move_kind("QUADRUPLE"));
  CHECK(executable(MoveKind::TETRAHEDRAL));
  CHECK(executable(MoveKind::TRIHEDRAL));
  CHECK_FALSE(executable(MoveKind::CUBIC_TANGENCY));
}

TEST_CASE("trihedral insert followed by delete restores the graph exactly") {
  for (auto [word, n] : std::vector<std::pair<const char*, int>>{{"1 3", 4}, {"1 1 1", 3}, {"1 -2 3", 4}}) {
    const auto g = build_from_braid(parse_braid(word, n));
    int restored = 0;
    for (int v : triples(g)) {
      const auto h = apply_move(g, MoveKind::TRIHEDRAL, {{v}});
      REQUIRE(validate_generic(h).pass());
      CHECK(h.count(VertexKind::TRIPLE) == g.count(VertexKind::TRIPLE) + 4);
      bool back = false;
      for (const auto& s : trihedral_sites(h)) {
        try {
          back = back || apply_move(h, MoveKind::TRIHEDRAL, s) == g;
        } catch (const PatternMismatch&) {
        }
      }
      CHECK(back);
      restored += back;
    }
    CHECK(restored == g.count(VertexKind::TRIPLE));
  }
}

TEST_CASE("trihedral pair has equal signs and its mirror the opposite") {
  const auto g = build_from_braid(parse_braid("1 3", 4));
  const auto h = apply_move(g, MoveKind::TRIHEDRAL, {{triples(g).front()}});
  std::map<int, int> signs;
  for (const auto& v : h.vertices)
    if (v.kind == VertexKind::TRIPLE) signs[v.sign] += 1;
  CHECK(signs[1] == signs[-1]);
  for (const auto& s : trihedral_sites(h))
    CHECK(h.vertices[static_cast<std::size_t>(s.vertices[0])].sign == h.vertices[static_cast<std::size_t>(s.vertices[1])].sign);
}

TEST_CASE("tetrahedral move swaps two heights and keeps the triple count") {
  const auto w = parse_braid("1 3", 4);
  const auto g = build_from_braid(w);
  const auto pc = predicted_counts(2, 4, 0);
  REQUIRE(g.count(VertexKind::TRIPLE) == pc.triple);
  const auto sites = tetrahedral_sites(g);
  REQUIRE_FALSE(sites.empty());
  int applied = 0;
  for (const auto& s : sites) {
    TraceGraph h;
    try {
      h = apply_move(g, MoveKind::TETRAHEDRAL, s);
    } catch (const PatternMismatch&) {
      continue;
    }
    ++applied;
    CHECK(validate_generic(h).pass());
    CHECK(h.count(VertexKind::TRIPLE) == pc.triple);
    CHECK(h.count(VertexKind::HANGING) == 0);
    CHECK(h.count(VertexKind::CRITICAL) == 0);
    CHECK(canonical_code(h) != canonical_code(g));
    CHECK(graphs_equivalent(g, h, 20).verdict == Verdict::EQUIVALENT);
    CHECK(matches_template(MoveKind::TETRAHEDRAL, g, h));
    CHECK_FALSE(matches_template(MoveKind::TRIHEDRAL, g, h));

    // The lower vertex now sits above the upper one, every other height unchanged.
    const auto& lo = g.vertices[static_cast<std::size_t>(s.vertices[0])];
    const auto& hi = g.vertices[static_cast<std::size_t>(s.vertices[1])];
    const double zl = std::min(lo.z, hi.z), zh = std::max(lo.z, hi.z);
    auto before = triple_heights(g), after = triple_heights(h);
    REQUIRE(before.size() == after.size());
    std::vector<double> gone, added;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(gone));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(added));
    REQUIRE(gone.size() == 1);
    REQUIRE(added.size() == 1);
    CHECK(gone[0] == zl);
    CHECK(added[0] > zh);

    // Swapping back gives the original code.
    int v1 = -1;
    for (int v : triples(h))
      if (h.vertices[static_cast<std::size_t>(v)].z == added[0] && h.vertices[static_cast<std::size_t>(v)].t < kPi) v1 = v;
    int v2 = -1;
    for (int v : triples(h))
      if (h.vertices[static_cast<std::size_t>(v)].z == zh && h.vertices[static_cast<std::size_t>(v)].t < kPi) v2 = v;
    REQUIRE(v1 >= 0);
    REQUIRE(v2 >= 0);
    const auto back = apply_move(h, MoveKind::TETRAHEDRAL, {{v2, v1}});
    CHECK(canonical_code(back) == canonical_code(g));
  }
  CHECK(applied > 0);
}

TEST_CASE("tetrahedral variant follows strand directions") {
  const auto g = build_from_braid(parse_braid("1 3", 4));
  for (const auto& s : tetrahedral_sites(g)) {
    // Closed braid strands all run upward.
    CHECK(tetrahedral_variant(g, s) == MoveVariant::Parallel);
    CHECK_THROWS_AS(apply_move(g, MoveKind::TETRAHEDRAL, s, MoveVariant::Antiparallel), PatternMismatch);
  }
}

TEST_CASE("moves reject malformed sites") {
  const auto g = build_from_braid(parse_braid("1 3", 4));
  CHECK_THROWS_AS(apply_move(g, MoveKind::TETRAHEDRAL, {{0}}), PatternMismatch);
  CHECK_THROWS_AS(apply_move(g, MoveKind::TRIHEDRAL, {{0, 1, 2}}), PatternMismatch);
  CHECK_THROWS_AS(apply_move(g, MoveKind::CUBIC_TANGENCY, {{0}}), PatternMismatch);
  CHECK_THROWS_AS(apply_move(g, MoveKind::TRIHEDRAL, {{static_cast<int>(g.vertices.size())}}), PatternMismatch);
  int tangent = -1;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (g.vertices[static_cast<std::size_t>(v)].kind == VertexKind::TANGENT) tangent = v;
  REQUIRE(tangent >= 0);
  CHECK_THROWS_AS(apply_move(g, MoveKind::TRIHEDRAL, {{tangent}}), PatternMismatch);
  // A vertex and its mirror image never cancel.
  const auto t = triples(g);
  const auto vp = detail::vertex_partners(g);
  CHECK_THROWS_AS(apply_move(g, MoveKind::TRIHEDRAL, {{t[0], vp[static_cast<std::size_t>(t[0])]}}), PatternMismatch);
}

TEST_CASE("canonical code of the empty graph is a constant") {
  CHECK(canonical_code(TraceGraph{}).bytes == kEmptyCanonicalCode);
}

TEST_CASE("canonical code is invariant under rigid t-shifts") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (const auto& g : {build_from_braid(parse_braid("1 -2 1 2", 3)), build_from_braid(parse_braid("1 3 -2", 4))}) {
    const auto c = canonical_code(g);
    for (int k = 0; k < 16; ++k) {
      const auto h = shifted(g, u(rng));
      CHECK(validate_generic(h).pass());
      CHECK(canonical_code(h) == c);
    }
  }
}

TEST_CASE("cyclic words of blocks give identical codes") {
  CHECK(canonical_code(build_from_braid(parse_braid("1 2", 3))) == canonical_code(build_from_braid(parse_braid("2 1", 3))));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 12; ++i) {
    const auto w = random_word(3 + i % 3, 1 + rng() % 12, rng);
    const auto c = canonical_code(build_from_braid(w));
    for (std::size_t r = 1; r < w.length(); ++r) CHECK(canonical_code(build_from_braid(rotate(w, r))) == c);
  }
}

TEST_CASE("codes separate different cyclic words") {
  CHECK(canonical_code(build_from_braid(parse_braid("1", 3))) != canonical_code(build_from_braid(parse_braid("-1", 3))));
  CHECK(canonical_code(build_from_braid(parse_braid("1 1", 3))) != canonical_code(build_from_braid(parse_braid("1 -1", 3))));
  CHECK(canonical_code(build_from_braid(parse_braid("1 2", 4))) != canonical_code(build_from_braid(parse_braid("1 3", 4))));
  // Mirror images.
  CHECK(canonical_code(build_from_braid(parse_braid("1 1 1", 3))) != canonical_code(build_from_braid(parse_braid("-1 -1 -1", 3))));
  CHECK(canonical_code(build_from_braid(parse_braid("1 -2 1", 3))) != canonical_code(build_from_braid(parse_braid("-1 2 -1", 3))));
}

TEST_CASE("geometric closed braid has the same code as the block construction") {
  for (auto [word, n] : std::vector<std::pair<const char*, int>>{{"1", 4}, {"1 -2", 4}, {"1 2 1 -3 2", 4}}) {
    const auto w = parse_braid(word, n);
    CHECK(canonical_code(build_numeric(braid_link(w))) == canonical_code(build_from_braid(w)));
  }
}

TEST_CASE("trihedral reduction") {
  const auto e = build_from_braid(BraidWord{3, {}});
  const auto r = trihedral_reduce(build_from_braid(parse_braid("1 -1", 3)), 10);
  CHECK(validate_generic(r).pass());
  CHECK(r.count(VertexKind::TRIPLE) == 0);
  CHECK(canonical_code(r) == canonical_code(e));

  // Inserted pair comes straight back out.
  const auto g = build_from_braid(parse_braid("1 2 -1", 3));
  const auto h = apply_move(g, MoveKind::TRIHEDRAL, {{triples(g).front()}});
  int used = 0;
  const auto back = trihedral_reduce(h, 1, &used);
  CHECK(used == 1);
  CHECK(back.count(VertexKind::TRIPLE) == g.count(VertexKind::TRIPLE));

  // Budget zero leaves the graph alone; reduction is idempotent.
  CHECK(trihedral_reduce(h, 0) == h);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 6; ++i) {
    const auto w = random_word(3 + i % 2, 12, rng);
    const auto once = trihedral_reduce(build_from_braid(w), 100);
    CHECK(validate_generic(once).pass());
    CHECK(trihedral_reduce(once, 100) == once);
  }
}

TEST_CASE("conjugacy test examples") {
  const auto w = parse_braid("1 -2 1 1", 3);
  CHECK(conjugacy_test(w, w).verdict == Verdict::EQUIVALENT);
  CHECK(conjugacy_test(parse_braid("1", 3), parse_braid("2", 3)).verdict == Verdict::EQUIVALENT);
  const auto d = conjugacy_test(parse_braid("1", 3), parse_braid("-1", 3));
  CHECK(d.verdict == Verdict::DISTINCT);
  CHECK(d.certificate.find("exponent sum") != std::string::npos);
  // Freely equal to the first word.
  CHECK(conjugacy_test(parse_braid("1", 3), parse_braid("1 1 -1 2 -2", 3)).verdict == Verdict::EQUIVALENT);
  CHECK(conjugacy_test(parse_braid("1 2", 3), parse_braid("1 1", 3)).verdict == Verdict::DISTINCT);
  CHECK_THROWS_AS(conjugacy_test(parse_braid("1", 3), parse_braid("1", 4)), Error);
}

TEST_CASE("conjugacy test is sound on random conjugates") {
  std::mt19937_64 rng(20240611);
  int equivalent = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + i % 2;
    const auto w = random_word(n, 1 + rng() % 30, rng);
    const auto c = random_conjugate(w, rng(), 1 + rng() % 5);
    const auto r = conjugacy_test(w, c);
    CHECK(r.verdict != Verdict::DISTINCT);
    if (r.verdict == Verdict::EQUIVALENT) {
      ++equivalent;
      CHECK(closure_components(w) == closure_components(c));
      CHECK(exponent_sum(w) == exponent_sum(c));
    }
  }
  CHECK(equivalent >= 90);
}

TEST_CASE("graph equivalence after a trihedral insertion") {
  const auto g = build_from_braid(parse_braid("1 -2 3", 4));
  const auto h = apply_move(g, MoveKind::TRIHEDRAL, {{triples(g)[1]}});
  CHECK(graphs_equivalent(g, h).verdict == Verdict::EQUIVALENT);
  CHECK(graphs_equivalent(g, build_from_braid(parse_braid("1 3", 4))).verdict == Verdict::DISTINCT);
}
