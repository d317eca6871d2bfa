#pragma once

// Braid words on n strands, their permutations and closures.
//
// Letters are read left to right and act bottom to top: the first letter is
// the lowest crossing of the braid in the cylinder D x [-1, 1].

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tgraph/errors.hpp"

namespace tgraph {

struct Letter {
  int generator = 1;  // i in [1, n-1]; crosses positions i and i+1
  int sign = 1;       // +1 for sigma_i, -1 for its inverse

  friend bool operator==(const Letter&, const Letter&) = default;
  Letter inverse() const { return {generator, -sign}; }
};

struct BraidWord {
  int strands = 2;
  std::vector<Letter> letters;

  friend bool operator==(const BraidWord&, const BraidWord&) = default;

  std::size_t length() const { return letters.size(); }

  void check() const {
    if (strands < 2) throw Error("braid needs at least 2 strands");
    for (const auto& l : letters) {
      if (l.generator < 1 || l.generator > strands - 1)
        throw Error("generator index " + std::to_string(l.generator) + " out of range for B_" +
                    std::to_string(strands));
      if (l.sign != 1 && l.sign != -1) throw Error("letter sign must be +1 or -1");
    }
  }
};

/// images[p-1] is the top position of the strand starting at bottom position p.
struct StrandPermutation {
  std::vector<int> images;

  friend bool operator==(const StrandPermutation&, const StrandPermutation&) = default;

  int size() const { return static_cast<int>(images.size()); }
  int operator()(int p) const { return images[static_cast<std::size_t>(p - 1)]; }

  static StrandPermutation identity(int n) {
    StrandPermutation p;
    for (int i = 1; i <= n; ++i) p.images.push_back(i);
    return p;
  }

  /// (*this) after `first`: p -> this(first(p)).
  StrandPermutation after(const StrandPermutation& first) const {
    StrandPermutation r;
    for (int p = 1; p <= first.size(); ++p) r.images.push_back((*this)(first(p)));
    return r;
  }

  /// The cycles, each starting at its smallest element; cycles sorted by that element.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(images.size() + 1, false);
    for (int p = 1; p <= size(); ++p) {
      if (seen[static_cast<std::size_t>(p)]) continue;
      std::vector<int> cyc;
      for (int q = p; !seen[static_cast<std::size_t>(q)]; q = (*this)(q)) {
        seen[static_cast<std::size_t>(q)] = true;
        cyc.push_back(q);
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }
};

/// Parses whitespace separated signed generator indices, e.g. "1 -2 1".
inline BraidWord parse_braid(std::string_view text, int strands) {
  BraidWord w;
  w.strands = strands;
  if (strands < 2) throw ParseError("braid needs at least 2 strands");
  std::istringstream in{std::string(text)};
  in.imbue(std::locale::classic());
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError("malformed braid token '" + tok + "'");
    }
    if (pos != tok.size() || v == 0) throw ParseError("malformed braid token '" + tok + "'");
    const int g = v < 0 ? -v : v;
    if (g > strands - 1)
      throw ParseError("generator index " + std::to_string(g) + " out of range for B_" +
                       std::to_string(strands));
    w.letters.push_back({g, v < 0 ? -1 : 1});
  }
  return w;
}

inline std::string format_braid(const BraidWord& w) {
  std::string out;
  for (const auto& l : w.letters) {
    if (!out.empty()) out += ' ';
    out += std::to_string(l.sign * l.generator);
  }
  return out;
}

inline StrandPermutation permutation(const BraidWord& w) {
  // pos[s] = current position of strand s (strands named by bottom position).
  std::vector<int> pos(static_cast<std::size_t>(w.strands));
  for (int s = 0; s < w.strands; ++s) pos[static_cast<std::size_t>(s)] = s + 1;
  for (const auto& l : w.letters) {
    for (auto& p : pos) {
      if (p == l.generator)
        p = l.generator + 1;
      else if (p == l.generator + 1)
        p = l.generator;
    }
  }
  return StrandPermutation{pos};
}

inline int closure_components(const BraidWord& w) {
  return static_cast<int>(permutation(w).cycles().size());
}

inline int exponent_sum(const BraidWord& w) {
  int s = 0;
  for (const auto& l : w.letters) s += l.sign;
  return s;
}

inline BraidWord inverse(const BraidWord& w) {
  BraidWord r{w.strands, {}};
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) r.letters.push_back(it->inverse());
  return r;
}

inline BraidWord concat(const BraidWord& a, const BraidWord& b) {
  if (a.strands != b.strands) throw Error("strand counts differ");
  BraidWord r = a;
  r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
  return r;
}

/// Cancels adjacent inverse letter pairs until none remain.
inline BraidWord free_reduce(const BraidWord& w) {
  BraidWord r{w.strands, {}};
  for (const auto& l : w.letters) {
    if (!r.letters.empty() && r.letters.back() == l.inverse())
      r.letters.pop_back();
    else
      r.letters.push_back(l);
  }
  return r;
}

/// Free reduction of the cyclic word (also cancels across the ends).
inline BraidWord cyclic_reduce(const BraidWord& w) {
  BraidWord r = free_reduce(w);
  while (r.letters.size() >= 2 && r.letters.front() == r.letters.back().inverse()) {
    r.letters.pop_back();
    r.letters.erase(r.letters.begin());
  }
  return r;
}

inline BraidWord random_word(int strands, std::size_t length, std::mt19937_64& rng) {
  BraidWord w{strands, {}};
  std::uniform_int_distribution<int> gen(1, strands - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t k = 0; k < length; ++k) w.letters.push_back({gen(rng), coin(rng) ? 1 : -1});
  return w;
}

/// alpha * w * alpha^-1 for a pseudo-random alpha of the given length.
inline BraidWord random_conjugate(const BraidWord& w, std::uint64_t seed, std::size_t conjugator_length) {
  std::mt19937_64 rng(seed);
  const BraidWord alpha = random_word(w.strands, conjugator_length, rng);
  return concat(concat(alpha, w), inverse(alpha));
}

}  // namespace tgraph
