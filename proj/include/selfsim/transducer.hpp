#pragma once

#include <utility>
#include <vector>

#include "selfsim/machine.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// Finite transducer over a free basis: one edge per (vertex, positive
/// generator) carrying a target vertex and an output word. Inverse edges are
/// derived, so the structure is involutive by construction, and every
/// generator acts on the vertices as a permutation.
class Transducer {
 public:
  Transducer(Alphabet vertices, Alphabet gens, Alphabet out_gens,
             std::vector<int> targets, std::vector<Word> outputs);

  const Alphabet& vertices() const { return vertices_; }
  const Alphabet& gens() const { return gens_; }
  const Alphabet& out_gens() const { return out_gens_; }
  int num_vertices() const { return vertices_.size(); }
  int num_gens() const { return gens_.size(); }

  int edge_target(int vertex, int gen) const {
    return targets_[static_cast<std::size_t>(vertex) * num_gens() + gen];
  }
  const Word& edge_output(int vertex, int gen) const {
    return outputs_[static_cast<std::size_t>(vertex) * num_gens() + gen];
  }

  /// Outputs are words over the transducer's own generators, so sequential
  /// powers are defined.
  bool self_composable() const { return gens_ == out_gens_; }

  int vertex_image(int vertex, SignedGen g) const;
  int vertex_walk(int vertex, const Word& w) const;
  /// Walk reading `w` (over gens) from `vertex`: endpoint and reduced output.
  std::pair<int, Word> walk(int vertex, const Word& w) const;

 private:
  Alphabet vertices_;
  Alphabet gens_;
  Alphabet out_gens_;
  std::vector<int> targets_;
  std::vector<Word> outputs_;
  std::vector<int> inverse_targets_;  // derived: vertex with target(v', g) == v
};

/// Dual with inverse edges realized implicitly: vertices are the machine's
/// letters, generators its states; reading state x at letter a moves to the
/// letter image and outputs the length-1 section.
Transducer enriched_dual(const Machine& m);

/// Orbits of the vertex set under the generator action, each sorted, ordered
/// by smallest member.
std::vector<std::vector<int>> components(const Transducer& t);

/// Sequential power: vertices are ordered tuples (first coordinate processes
/// the input first), edge outputs are threaded through the coordinates.
Transducer power(const Transducer& t, int k, const Budgets& budgets = {});

/// Image of a tuple under the action of w, threading outputs left to right.
std::vector<int> tuple_image(const Transducer& t, const std::vector<int>& tuple,
                             const Word& w);
/// Output word of the walk reading w at the tuple.
std::pair<std::vector<int>, Word> tuple_walk(const Transducer& t,
                                             const std::vector<int>& tuple,
                                             const Word& w);

/// Restriction to a tuple of words over t's generators (checked to be a free
/// basis): fresh generator g<i> reads words[i], outputs stay over t's output
/// alphabet.
Transducer restrict(const Transducer& t, const std::vector<Word>& words);

/// Order of the permutation induced by w on the level-`level` vertex tuples.
long long perm_order(const Transducer& t, const Word& w, int level,
                     const Budgets& budgets = {});

/// Transducer JSON mirrors the machine format with an "output" token list.
std::string transducer_to_json_text(const Transducer& t);
std::string transducer_to_dot(const Transducer& t, const std::string& name = "transducer");

}  // namespace selfsim
