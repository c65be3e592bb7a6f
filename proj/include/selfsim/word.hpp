#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// Ordered set of generator names. Immutable and cheap to copy; indices are
/// stable for the lifetime of the alphabet.
class Alphabet {
 public:
  Alphabet();
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(data_->symbols.size()); }
  const std::string& name(int i) const { return data_->symbols.at(i); }
  const std::vector<std::string>& symbols() const { return data_->symbols; }
  std::optional<int> index(std::string_view name) const;
  int index_checked(std::string_view name) const;

  bool operator==(const Alphabet& other) const;
  bool same_instance(const Alphabet& other) const { return data_ == other.data_; }

 private:
  struct Data {
    std::vector<std::string> symbols;
    std::map<std::string, int, std::less<>> by_name;
  };
  std::shared_ptr<const Data> data_;
};

/// One letter of a group word: a generator index with a sign.
struct SignedGen {
  int32_t index = 0;
  int32_t sign = 1;  // +1 or -1

  SignedGen() = default;
  SignedGen(int32_t idx, int32_t sgn) : index(idx), sign(sgn) {}
  SignedGen inverse() const { return SignedGen(index, -sign); }
  bool cancels(const SignedGen& other) const {
    return index == other.index && sign == -other.sign;
  }
  friend auto operator<=>(const SignedGen&, const SignedGen&) = default;
};

/// Freely reduced word over an alphabet. All constructors reduce eagerly, so
/// equality of group elements is plain sequence equality. Immutable.
class Word {
 public:
  Word() = default;
  explicit Word(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  Word(Alphabet alphabet, const std::vector<SignedGen>& raw);

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<SignedGen>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  int size() const { return static_cast<int>(letters_.size()); }
  const SignedGen& front() const { return letters_.front(); }
  const SignedGen& back() const { return letters_.back(); }

  bool operator==(const Word& other) const { return letters_ == other.letters_; }
  bool operator!=(const Word& other) const { return !(*this == other); }
  /// Shortlex order; alphabets are assumed compatible.
  bool operator<(const Word& other) const {
    if (letters_.size() != other.letters_.size())
      return letters_.size() < other.letters_.size();
    return letters_ < other.letters_;
  }

 private:
  Alphabet alphabet_;
  std::vector<SignedGen> letters_;
};

/// Free reduction of a raw letter sequence.
Word reduce(Alphabet alphabet, const std::vector<SignedGen>& raw);

Word invert(const Word& w);
Word concat(const Word& u, const Word& v);
Word concat(const Word& u, const Word& v, const Word& w);
Word conjugate(const Word& by, const Word& w);  // by . w . by^-1
Word commutator(const Word& u, const Word& v);  // u v u^-1 v^-1
Word power(const Word& w, long exponent);

struct CyclicReduction {
  Word core;        // cyclically reduced
  Word conjugator;  // w = conjugator . core . conjugator^-1
};
CyclicReduction cyclic_reduce(const Word& w);

struct RootPower {
  Word root;
  int exponent;  // w = root^exponent, exponent maximal
};
RootPower primitive_root(const Word& w);

/// Single-generator word helpers.
Word gen_word(const Alphabet& alphabet, int index, int sign = 1);

/// Text form: whitespace-separated tokens `name` or `name^-1`; the empty word
/// prints as `1`.
std::string to_string(const Word& w);
std::string token(const Alphabet& alphabet, SignedGen g);
Word parse_word(const Alphabet& alphabet, std::string_view text);
std::vector<std::string> word_tokens(const Word& w);
Word word_from_tokens(const Alphabet& alphabet, const std::vector<std::string>& tokens);

}  // namespace selfsim
