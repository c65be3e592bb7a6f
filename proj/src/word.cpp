#include "selfsim/word.hpp"

#include <algorithm>
#include <sstream>

namespace selfsim {

Alphabet::Alphabet() : data_(std::make_shared<Data>()) {}

Alphabet::Alphabet(std::vector<std::string> symbols) {
  auto data = std::make_shared<Data>();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i].empty()) throw InputError("alphabet symbol must be nonempty");
    auto [_, inserted] = data->by_name.emplace(symbols[i], static_cast<int>(i));
    if (!inserted) throw InputError("duplicate alphabet symbol: " + symbols[i]);
  }
  data->symbols = std::move(symbols);
  data_ = std::move(data);
}

std::optional<int> Alphabet::index(std::string_view name) const {
  auto it = data_->by_name.find(name);
  if (it == data_->by_name.end()) return std::nullopt;
  return it->second;
}

int Alphabet::index_checked(std::string_view name) const {
  auto i = index(name);
  if (!i) throw InputError("unknown generator: " + std::string(name));
  return *i;
}

bool Alphabet::operator==(const Alphabet& other) const {
  return data_ == other.data_ || data_->symbols == other.data_->symbols;
}

Word::Word(Alphabet alphabet, const std::vector<SignedGen>& raw)
    : alphabet_(std::move(alphabet)) {
  letters_.reserve(raw.size());
  for (const SignedGen& g : raw) {
    if (g.index < 0 || g.index >= alphabet_.size())
      throw InputError("generator index out of range: " + std::to_string(g.index));
    if (g.sign != 1 && g.sign != -1)
      throw InputError("generator sign must be +1 or -1");
    if (!letters_.empty() && letters_.back().cancels(g))
      letters_.pop_back();
    else
      letters_.push_back(g);
  }
}

Word reduce(Alphabet alphabet, const std::vector<SignedGen>& raw) {
  return Word(std::move(alphabet), raw);
}

Word invert(const Word& w) {
  std::vector<SignedGen> out;
  out.reserve(w.letters().size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
    out.push_back(it->inverse());
  return Word(w.alphabet(), out);
}

Word concat(const Word& u, const Word& v) {
  if (!(u.alphabet() == v.alphabet()))
    throw InputError("concat: words over different alphabets");
  std::vector<SignedGen> out = u.letters();
  out.insert(out.end(), v.letters().begin(), v.letters().end());
  return Word(u.alphabet(), out);
}

Word concat(const Word& u, const Word& v, const Word& w) {
  return concat(concat(u, v), w);
}

Word conjugate(const Word& by, const Word& w) {
  return concat(concat(by, w), invert(by));
}

Word commutator(const Word& u, const Word& v) {
  return concat(concat(u, v), concat(invert(u), invert(v)));
}

Word power(const Word& w, long exponent) {
  Word base = exponent < 0 ? invert(w) : w;
  long n = exponent < 0 ? -exponent : exponent;
  std::vector<SignedGen> out;
  out.reserve(static_cast<std::size_t>(n) * base.letters().size());
  for (long i = 0; i < n; ++i)
    out.insert(out.end(), base.letters().begin(), base.letters().end());
  return Word(w.alphabet(), out);
}

CyclicReduction cyclic_reduce(const Word& w) {
  const auto& ls = w.letters();
  std::size_t lo = 0, hi = ls.size();
  std::vector<SignedGen> conj;
  while (hi - lo >= 2 && ls[lo].cancels(ls[hi - 1])) {
    conj.push_back(ls[lo]);
    ++lo;
    --hi;
  }
  std::vector<SignedGen> core(ls.begin() + lo, ls.begin() + hi);
  return {Word(w.alphabet(), core), Word(w.alphabet(), conj)};
}

RootPower primitive_root(const Word& w) {
  if (w.empty()) throw InputError("primitive_root: empty word");
  CyclicReduction cr = cyclic_reduce(w);
  const auto& core = cr.core.letters();
  const int n = static_cast<int>(core.size());
  // Failure function of the core; smallest period dividing |core| gives the
  // maximal exponent.
  std::vector<int> fail(n + 1, 0);
  fail[0] = -1;
  for (int i = 0; i < n; ++i) {
    int j = fail[i];
    while (j >= 0 && !(core[j] == core[i])) j = fail[j];
    fail[i + 1] = j + 1;
  }
  int period = n - fail[n];
  int exponent = 1;
  if (period > 0 && n % period == 0) exponent = n / period;
  if (exponent == 1) period = n;
  std::vector<SignedGen> root_core(core.begin(), core.begin() + period);
  Word root = conjugate(cr.conjugator, Word(w.alphabet(), root_core));
  return {root, exponent};
}

Word gen_word(const Alphabet& alphabet, int index, int sign) {
  return Word(alphabet, {SignedGen(index, sign)});
}

std::string token(const Alphabet& alphabet, SignedGen g) {
  std::string t = alphabet.name(g.index);
  if (g.sign < 0) t += "^-1";
  return t;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (const SignedGen& g : w.letters()) {
    if (!out.empty()) out += ' ';
    out += token(w.alphabet(), g);
  }
  return out;
}

std::vector<std::string> word_tokens(const Word& w) {
  std::vector<std::string> out;
  out.reserve(w.letters().size());
  for (const SignedGen& g : w.letters()) out.push_back(token(w.alphabet(), g));
  return out;
}

namespace {

SignedGen parse_token(const Alphabet& alphabet, const std::string& tok) {
  int sign = 1;
  std::string name = tok;
  if (auto pos = tok.rfind("^-1"); pos != std::string::npos && pos + 3 == tok.size()) {
    sign = -1;
    name = tok.substr(0, pos);
  }
  return SignedGen(alphabet.index_checked(name), sign);
}

}  // namespace

Word parse_word(const Alphabet& alphabet, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  if (tokens.size() == 1 && tokens[0] == "1") return Word(alphabet);
  return word_from_tokens(alphabet, tokens);
}

Word word_from_tokens(const Alphabet& alphabet, const std::vector<std::string>& tokens) {
  std::vector<SignedGen> raw;
  raw.reserve(tokens.size());
  for (const std::string& t : tokens) raw.push_back(parse_token(alphabet, t));
  return Word(alphabet, raw);
}

}  // namespace selfsim
