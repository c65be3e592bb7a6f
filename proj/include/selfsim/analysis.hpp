#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/stallings.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

/// Stabilizer of vertex `a` within a connected component, read off the
/// component's input graph as a Schreier graph based at `a`.
Subgroup component_stabilizer(const Transducer& t, const std::vector<int>& component,
                              int a);

/// Stabilizer of every vertex at once: the Schreier graph of the simultaneous
/// action on the full vertex configuration, based at the diagonal point.
Subgroup global_stabilizer(const Transducer& t, const Budgets& budgets = {});

/// Output map at a vertex: each basis loop of the stabilizer is sent to the
/// reduced output of its walk. A homomorphism by construction.
struct ConnectingHom {
  int at = 0;
  std::vector<Word> domain_basis;
  std::vector<Word> images;
};
ConnectingHom connecting_hom(const Transducer& t, const Subgroup& stabilizer, int a);

enum class FreenessVerdict { kCertifiedNotFree, kInconclusive };

struct ComponentFinding {
  std::vector<std::string> component;  // vertex names
  std::string witness_vertex;
  int stab_rank = 0;
  int image_rank = 0;
  std::optional<Word> kernel_word;  // stabilizing word with trivial output
};

struct FreenessReport {
  FreenessVerdict verdict = FreenessVerdict::kInconclusive;
  int level = 1;
  std::optional<Word> relation;  // machine-verified when present
  std::vector<ComponentFinding> per_component;
};

/// Rank comparison over one transducer: for each component, the first vertex
/// whose stabilizer image has smaller rank, with a kernel word when found.
struct LevelScan {
  std::vector<ComponentFinding> findings;
  std::vector<std::pair<int, Word>> kernels;  // (vertex, word) per dropping component
  bool all_components_drop = false;
};
LevelScan scan_level(const Transducer& t);

/// Certification pipeline: builds the enriched dual, compares the rank of
/// each vertex stabilizer with the rank of its output image, escalating
/// through sequential powers up to `max_level`. When every component shows a
/// rank drop, a defining relation is extracted and verified; otherwise the
/// result is INCONCLUSIVE (never "free").
FreenessReport rank_test(const Machine& m, int max_level = 3,
                         const Budgets& budgets = {});

/// Combines one verified kernel word per component of `t` (a word stabilizing
/// its vertex whose output is trivial under `trivial`) into a single word
/// that stabilizes every vertex with trivial output everywhere, checked with
/// `trivial` before returning. Throws InternalError on verification failure.
Word extract_relation(const Transducer& t,
                      const std::vector<std::pair<int, Word>>& kernel_by_component,
                      const std::function<bool(const Word&)>& trivial,
                      const Budgets& budgets = {});

/// Classifies the positive edges of `t` by output triviality.
struct EdgeClassification {
  long long trivial_edges = 0;     // |T|
  long long nontrivial_edges = 0;  // |E|
};
EdgeClassification classify_edges(const Transducer& t,
                                  const std::function<bool(const Word&)>& trivial);

/// Searches the level-`level` power for a circuit whose input is a nontrivial
/// reduced word and whose output is trivial: the germ of a defining relation.
/// Returns the circuit's base vertex (in the power) and the input word.
std::optional<std::pair<std::string, Word>> output_trivial_circuit(
    const Transducer& t, int level, const std::function<bool(const Word&)>& trivial,
    const Budgets& budgets = {});

std::string freeness_report_to_json_text(const FreenessReport& r);

}  // namespace selfsim
