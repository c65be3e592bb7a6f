#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "selfsim/word.hpp"

namespace selfsim {

/// Positive-label edge of a generator-labeled graph. Inverse edges are
/// implicit: (source --g--> target) can be traversed backwards reading g^-1.
struct GraphEdge {
  int source = 0;
  int gen = 0;
  int target = 0;
  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

/// Generator-labeled directed multigraph with an optional base vertex.
struct LabeledGraph {
  Alphabet alphabet;
  int num_vertices = 0;
  std::vector<GraphEdge> edges;
  int base = -1;
};

/// One petal cycle per word, all sharing the base vertex.
LabeledGraph flower(const Alphabet& alphabet, const std::vector<Word>& words);

/// Stallings folding: identifies vertices until the graph is deterministic and
/// co-deterministic in every label. The language of base loops is preserved.
/// Output is canonically renumbered (breadth-first from the base), so two
/// folds of the same graph compare equal.
LabeledGraph fold(const LabeledGraph& g);

/// |E| - |V| + 1 of a connected core.
int graph_rank(const LabeledGraph& g);

/// Finitely generated subgroup of a free group, represented by its folded,
/// pruned core graph with a base vertex.
class Subgroup {
 public:
  /// Subgroup generated by the given words.
  Subgroup(Alphabet ambient, const std::vector<Word>& generators);
  /// Wraps an already folded based graph; keeps the base component and prunes
  /// dangling non-base vertices.
  static Subgroup from_folded(LabeledGraph folded);

  const Alphabet& ambient() const { return core_.alphabet; }
  const LabeledGraph& core() const { return core_; }
  int base() const { return core_.base; }
  int num_vertices() const { return core_.num_vertices; }
  int rank() const;

  /// Endpoint of the g-step from `vertex`, or -1 when the core has no such
  /// edge. Negative signs traverse positive edges backwards.
  int step(int vertex, SignedGen g) const;
  /// Endpoint of the walk reading `w` from `vertex`, or -1 if it falls off.
  int walk(int vertex, const Word& w) const;
  /// True when every vertex supports every direction (finite index).
  bool complete() const;

 private:
  Subgroup() = default;
  void build_tables();
  LabeledGraph core_;
  std::vector<int> succ_;  // vertex * n_gens + gen -> target or -1
  std::vector<int> pred_;
};

bool contains(const Subgroup& s, const Word& w);
Subgroup intersect(const Subgroup& s1, const Subgroup& s2);

/// Free basis from a breadth-first spanning tree: one word per non-tree edge,
/// ordered by (source vertex, generator). Size equals the rank.
std::vector<Word> loop_basis(const Subgroup& s);

/// Shortest reduced word that labels no walk from the base, searching all
/// positive directions before the negative ones. Throws InputError with
/// "no escaping word" when the core is complete.
Word find_escaping_word(const Subgroup& s);

/// A word v with [v^m y1 v^-m, y2] != 1 for every m != 0. Returns the empty
/// word when y1 and y2 already fail to commute; otherwise an escaping word
/// for the cyclic subgroup generated by the primitive root of y1.
Word commutation_breaker(const Word& y1, const Word& y2);

/// Nontrivial word w in the subgroup freely generated by `basis` whose image
/// under basis[i] -> images[i] reduces to the identity; nullopt when the
/// images freely generate a rank-|basis| subgroup (the map is injective).
std::optional<Word> hom_kernel_element(const std::vector<Word>& basis,
                                       const std::vector<Word>& images);

/// Substitutes mapping[i] for generator i of `w`.
Word substitute(const Word& w, const std::vector<Word>& mapping);

std::string to_dot(const Subgroup& s, const std::string& name = "core");

}  // namespace selfsim
