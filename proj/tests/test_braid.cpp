#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tgraph/braid.hpp"

using namespace tgraph;

namespace {

bool same_cyclic_word(const BraidWord& a, const BraidWord& b) {
  if (a.letters.size() != b.letters.size()) return false;
  if (a.letters.empty()) return true;
  for (std::size_t r = 0; r < a.letters.size(); ++r) {
    bool eq = true;
    for (std::size_t k = 0; k < a.letters.size() && eq; ++k)
      eq = a.letters[(k + r) % a.letters.size()] == b.letters[k];
    if (eq) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parse_braid transcribes signed generators") {
  CHECK(parse_braid("", 3).letters.empty());
  const auto w = parse_braid("1 -2", 4);
  REQUIRE(w.letters.size() == 2);
  CHECK(w.letters[0] == Letter{1, 1});
  CHECK(w.letters[1] == Letter{2, -1});
  CHECK_THROWS_AS(parse_braid("5", 4), ParseError);
  CHECK_THROWS_AS(parse_braid("1 x", 4), ParseError);
  CHECK_THROWS_AS(parse_braid("0", 4), ParseError);
  CHECK_THROWS_AS(parse_braid("1.5", 4), ParseError);
}

TEST_CASE("braid text round-trips through format") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto w = random_word(5, 12, rng);
    CHECK(parse_braid(format_braid(w), 5) == w);
  }
}

TEST_CASE("permutation and closure components") {
  CHECK(permutation(parse_braid("", 3)) == StrandPermutation::identity(3));
  CHECK(permutation(parse_braid("1", 4)).images == std::vector<int>{2, 1, 3, 4});
  // Hand composition: 1 -> 2 -> 3 -> 4, 2 -> 1, 3 -> 2, 4 -> 3.
  CHECK(permutation(parse_braid("1 2 3", 4)).images == std::vector<int>{4, 1, 2, 3});
  CHECK(closure_components(parse_braid("", 3)) == 3);
  CHECK(closure_components(parse_braid("1 2 3", 4)) == 1);
  CHECK(closure_components(parse_braid("1 1", 2)) == 2);
}

TEST_CASE("permutation of a product composes in letter order") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 5;
    const auto a = random_word(n, 1 + k % 9, rng);
    const auto b = random_word(n, 1 + k % 7, rng);
    CHECK(permutation(concat(a, b)) == permutation(b).after(permutation(a)));
  }
}

TEST_CASE("random_conjugate") {
  const auto w = parse_braid("1", 3);
  CHECK(random_conjugate(w, 5, 0) == w);
  const auto c = random_conjugate(w, 5, 1);
  REQUIRE(c.letters.size() == 3);
  CHECK(c.letters[1] == Letter{1, 1});
  CHECK(c.letters[2] == c.letters[0].inverse());
  CHECK(random_conjugate(w, 5, 4) == random_conjugate(w, 5, 4));

  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto v = random_word(4, 10, rng);
    const auto cv = random_conjugate(v, seed, seed % 8);
    CHECK(exponent_sum(cv) == exponent_sum(v));
    CHECK(closure_components(cv) == closure_components(v));
    CHECK(exponent_sum(free_reduce(cv)) == exponent_sum(v));
    CHECK(same_cyclic_word(cyclic_reduce(cv), cyclic_reduce(v)));
  }
}
