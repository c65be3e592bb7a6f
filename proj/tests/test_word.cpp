#include <doctest.h>

#include <random>

#include "selfsim/word.hpp"

using namespace selfsim;

namespace {

const Alphabet kAB({"a", "b"});

Word w(const std::string& text) { return parse_word(kAB, text); }

// Reference reduction: rescan from scratch and erase one adjacent inverse
// pair at a time until none remains.
std::vector<SignedGen> scan_reduce(std::vector<SignedGen> raw) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
      if (raw[i].cancels(raw[i + 1])) {
        raw.erase(raw.begin() + i, raw.begin() + i + 2);
        changed = true;
        break;
      }
    }
  }
  return raw;
}

std::vector<SignedGen> random_raw(std::mt19937& rng, int max_len, int n_gens) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> gen(0, n_gens - 1);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<SignedGen> raw;
  int n = len(rng);
  for (int i = 0; i < n; ++i) raw.emplace_back(gen(rng), sign(rng) ? 1 : -1);
  return raw;
}

Word random_word(std::mt19937& rng, int max_len, const Alphabet& alphabet) {
  return Word(alphabet, random_raw(rng, max_len, alphabet.size()));
}

// All reduced words over kAB up to the given length.
std::vector<Word> short_words(int max_len) {
  std::vector<Word> all{Word(kAB)};
  std::size_t head = 0;
  std::size_t tail = all.size();
  for (int len = 1; len <= max_len; ++len) {
    for (; head < tail; ++head) {
      for (int g = 0; g < 2; ++g) {
        for (int s : {1, -1}) {
          SignedGen d(g, s);
          if (!all[head].empty() && all[head].back().cancels(d)) continue;
          auto letters = all[head].letters();
          letters.push_back(d);
          all.emplace_back(kAB, letters);
        }
      }
    }
    tail = all.size();
  }
  return all;
}

}  // namespace

TEST_CASE("free reduction basics") {
  CHECK(w("a a^-1").empty());
  CHECK(w("a b b^-1 a") == w("a a"));
  CHECK(w("a b a^-1 a b^-1 a^-1").empty());
  CHECK(to_string(Word(kAB)) == "1");
  CHECK(to_string(w("a b^-1")) == "a b^-1");
  // Reduction is idempotent on words.
  Word u = w("a b a^-1");
  CHECK(Word(kAB, u.letters()) == u);
}

TEST_CASE("free reduction matches the rescan reference on random input") {
  std::mt19937 rng(20240901);
  for (int i = 0; i < 1000; ++i) {
    auto raw = random_raw(rng, 40, 2);
    CHECK(Word(kAB, raw).letters() == scan_reduce(raw));
  }
}

TEST_CASE("reduce rejects out-of-range generators") {
  CHECK_THROWS_AS(Word(kAB, {SignedGen(2, 1)}), InputError);
  CHECK_THROWS_AS(Word(kAB, {SignedGen(0, 2)}), InputError);
}

TEST_CASE("invert") {
  CHECK(invert(Word(kAB)).empty());
  CHECK(invert(w("a b")) == w("b^-1 a^-1"));
  CHECK(invert(w("a b^-1 a")) == w("a^-1 b a^-1"));
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Word u = random_word(rng, 12, kAB), v = random_word(rng, 12, kAB);
    CHECK(invert(invert(u)) == u);
    CHECK(invert(concat(u, v)) == concat(invert(v), invert(u)));
  }
}

TEST_CASE("concat") {
  CHECK(concat(w("a b"), w("b^-1 a")) == w("a a"));
  Word any = w("a b a");
  CHECK(concat(any, Word(kAB)) == any);
  CHECK(concat(w("a b a^-1"), w("a b^-1")) == w("a"));
  CHECK(concat(any, invert(any)).empty());
  Alphabet other({"x"});
  CHECK_THROWS_AS(concat(any, Word(other)), InputError);
}

TEST_CASE("concat is associative on random triples") {
  std::mt19937 rng(99);
  for (int i = 0; i < 1000; ++i) {
    Word a = random_word(rng, 10, kAB);
    Word b = random_word(rng, 10, kAB);
    Word c = random_word(rng, 10, kAB);
    CHECK(concat(concat(a, b), c) == concat(a, concat(b, c)));
  }
}

TEST_CASE("commutator") {
  CHECK(commutator(w("a"), w("a")).empty());
  CHECK(commutator(w("a"), w("b")) == w("a b a^-1 b^-1"));
  CHECK(commutator(w("a b"), w("b")) == w("a b a^-1 b^-1"));
}

TEST_CASE("cyclic reduction") {
  auto cr = cyclic_reduce(w("a b a^-1"));
  CHECK(cr.core == w("b"));
  CHECK(cr.conjugator == w("a"));
  cr = cyclic_reduce(w("b a b^-1 a^-1"));
  CHECK(cr.core == w("b a b^-1 a^-1"));
  CHECK(cr.conjugator.empty());
  cr = cyclic_reduce(w("a a b a^-1 a^-1"));
  CHECK(cr.core == w("b"));
  CHECK(cr.conjugator == w("a a"));
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    Word u = random_word(rng, 14, kAB);
    auto [core, conj] = cyclic_reduce(u);
    CHECK(conjugate(conj, core) == u);
    if (core.size() >= 2) CHECK(!core.front().cancels(core.back()));
  }
}

TEST_CASE("primitive root") {
  auto rp = primitive_root(w("a b a b"));
  CHECK(rp.root == w("a b"));
  CHECK(rp.exponent == 2);
  rp = primitive_root(w("a"));
  CHECK(rp.root == w("a"));
  CHECK(rp.exponent == 1);
  // Reduced square of a conjugate: the root keeps the conjugator.
  rp = primitive_root(w("a b b a^-1"));
  CHECK(rp.root == w("a b a^-1"));
  CHECK(rp.exponent == 2);
  CHECK_THROWS_AS(primitive_root(Word(kAB)), InputError);
}

TEST_CASE("primitive root properties on random powers") {
  std::mt19937 rng(41);
  for (int i = 0; i < 300; ++i) {
    Word base = random_word(rng, 6, kAB);
    if (base.empty()) continue;
    std::uniform_int_distribution<int> exp(1, 4);
    int e = exp(rng);
    Word p = power(base, e);
    if (p.empty()) continue;
    auto rp = primitive_root(p);
    CHECK(power(rp.root, rp.exponent) == p);
    auto again = primitive_root(rp.root);
    CHECK(again.exponent == 1);
  }
}

TEST_CASE("commuting words share a primitive root") {
  auto roots_match = [](const Word& u, const Word& v) {
    Word ru = primitive_root(u).root;
    Word rv = primitive_root(v).root;
    return ru == rv || ru == invert(rv);
  };
  // Exhaustive on short reduced words, against naive commutator reduction.
  auto words = short_words(4);
  for (const Word& u : words) {
    if (u.empty()) continue;
    for (const Word& v : words) {
      if (v.empty()) continue;
      CHECK(commutator(u, v).empty() == roots_match(u, v));
    }
  }
  std::mt19937 rng(4242);
  for (int i = 0; i < 300; ++i) {
    Word u = random_word(rng, 6, kAB);
    Word v = random_word(rng, 6, kAB);
    if (u.empty() || v.empty()) continue;
    CHECK(commutator(u, v).empty() == roots_match(u, v));
  }
}

TEST_CASE("text round trip") {
  CHECK(parse_word(kAB, "1").empty());
  CHECK(to_string(w("a a b^-1")) == "a a b^-1");
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Word u = random_word(rng, 10, kAB);
    CHECK(parse_word(kAB, to_string(u)) == u);
  }
  CHECK_THROWS_AS(parse_word(kAB, "z"), InputError);
}

TEST_CASE("alphabet invariants") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InputError);
  CHECK_THROWS_AS(Alphabet({""}), InputError);
  CHECK(kAB.index("b") == 1);
  CHECK(!kAB.index("c"));
}
