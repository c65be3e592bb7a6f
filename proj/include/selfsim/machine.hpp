#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "selfsim/word.hpp"

namespace selfsim {

/// Finite synchronous letter-to-letter transducer: states x letters with total
/// next-state and output maps. Immutable after construction.
class Machine {
 public:
  Machine(Alphabet states, Alphabet letters, std::vector<int> next,
          std::vector<int> out);

  const Alphabet& states() const { return states_; }
  const Alphabet& letters() const { return letters_; }
  int num_states() const { return states_.size(); }
  int num_letters() const { return letters_.size(); }

  int next(int state, int letter) const {
    return next_[static_cast<std::size_t>(state) * num_letters() + letter];
  }
  int out(int state, int letter) const {
    return out_[static_cast<std::size_t>(state) * num_letters() + letter];
  }

  /// True when every state's output row is a permutation of the letters.
  bool invertible() const { return invertible_; }
  /// Letter b with out(state, b) == letter. Requires invertibility.
  int out_inverse(int state, int letter) const;

  /// Image of `letter` under the action of a state word (inverse letters
  /// allowed when the machine is invertible).
  int letter_image(const Word& w, int letter) const;
  /// Restriction of the word's action to the subtree below `letter`.
  Word section(const Word& w, int letter) const;
  std::vector<int> letter_permutation(const Word& w) const;

 private:
  Alphabet states_;
  Alphabet letters_;
  std::vector<int> next_;
  std::vector<int> out_;
  std::vector<int> out_inv_;  // state*k + letter -> preimage letter, or -1
  bool invertible_ = false;
};

struct ValidationReport {
  bool deterministic = true;  // total maps by construction
  bool complete = true;
  bool invertible = false;
  bool reversible = false;
  bool bireversible = false;
  bool reduced = false;
  std::optional<int> sink_state;  // identity-acting sink, when present
  bool sink_coaccessible = false;
};

ValidationReport validate(const Machine& m);

/// States and letters exchanged: s --a|b--> t in the dual iff a --s|t--> b
/// in m. Involution: dual(dual(m)) == m.
Machine dual(const Machine& m);

/// Input/output swapped, states renamed x -> x^-1. Requires invertibility.
Machine inverse_machine(const Machine& m);

/// Merges states that define the same tree automorphism (partition refinement
/// seeded by the first-level permutations). Returns the quotient machine and
/// the state -> class map.
std::pair<Machine, std::vector<int>> reduce_machine(const Machine& m);

bool machines_equal(const Machine& a, const Machine& b);

/// Word problem for the group generated by an invertible machine's states.
/// Decides triviality by closing the word under sections and checking that
/// every member of the closure acts trivially on the letters. Verdicts are
/// memoized, keyed by the canonical form min(w, w^-1).
class WordOracle {
 public:
  explicit WordOracle(const Machine& m);
  bool is_identity(const Word& w);
  bool equal(const Word& u, const Word& v);
  const Machine& machine() const { return *machine_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  const Machine* machine_;
  std::map<Word, bool> cache_;
};

bool is_identity(const Machine& m, const Word& w);

/// JSON file format:
///   {"format": 1, "states": [...], "letters": [...],
///    "transitions": [{"state": s, "letter": a, "next": s2, "out": b}, ...]}
Machine machine_from_json_text(const std::string& text);
std::string machine_to_json_text(const Machine& m);
Machine load_machine(const std::string& path);

std::string machine_to_dot(const Machine& m, const std::string& name = "machine");

}  // namespace selfsim
