#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "selfsim/machine.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

/// Deterministic complete letter-labeled digraph on group elements: the
/// a-edge sends an element to its section below a. Vertices are canonical
/// representatives (first section word encountered, breadth-first), merged by
/// the word-problem oracle.
struct OrbitalGraph {
  Alphabet letters;
  Alphabet states;
  std::vector<Word> vertices;  // canonical representatives
  std::vector<int> edges;      // vertex * |letters| + letter -> vertex
  int identity_vertex = -1;
  std::vector<int> seeds;                        // class per seed word, in input order
  std::vector<std::vector<int>> letter_orbits;   // first-level orbit partition

  int edge(int v, int a) const {
    return edges[static_cast<std::size_t>(v) * letters.size() + a];
  }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
};

OrbitalGraph build_orbital(const Machine& m, const std::vector<Word>& seed_words,
                           WordOracle& oracle, const Budgets& budgets = {});

/// True when the identity vertex exists and every vertex has a directed walk
/// to it. The restricted variant only follows edges labeled in `letters`.
bool sink_coaccessible(const OrbitalGraph& g);
bool sink_coaccessible_within(const OrbitalGraph& g, const std::vector<int>& letters);

/// Exact walk counts: T(m) walks of length m from the seeds that end at the
/// identity, E(m) those that do not, chi(m) = T(m) / (|W| |A|^m).
struct ChiReport {
  std::vector<int> m_values;
  std::vector<mpz_class> T_counts;
  std::vector<mpz_class> E_counts;
  std::vector<mpq_class> chi;
  mpq_class chi_limit = 0;  // exact absorption average over the seeds
  struct PerOrbit {
    std::vector<int> letters;
    std::vector<mpz_class> T_counts;
    std::vector<mpz_class> E_counts;
    std::vector<mpq_class> chi;
  };
  std::vector<PerOrbit> per_orbit;
};
ChiReport chi_exact(const OrbitalGraph& g, int m_max);

/// Probability that the walk from each vertex is absorbed at the identity,
/// solved exactly over the rationals. Vertices that cannot reach the identity
/// get 0. Requires the identity vertex.
std::vector<mpq_class> absorption_probability(const OrbitalGraph& g);

/// Mechanical hypothesis check for the structural dichotomies: a co-accessible
/// identity forces "cyclic or not free" for the subject group or subgroup.
struct VerdictReport {
  bool satisfied = false;
  std::string criterion;  // which dichotomy applies
  std::string conclusion;
  std::string failing;  // first violated hypothesis, when not satisfied
  bool identity_present = false;
  bool first_level_transitive = false;
  std::vector<std::vector<std::string>> orbit_letters;
  std::vector<bool> orbit_coaccessible;
  // Subgroup mode extras.
  bool subgroup_mode = false;
  bool self_similar_verified = false;
  int self_similar_depth = 0;
  bool transitive_on_each_orbit = false;
  int level_transitive_up_to = 0;
};

VerdictReport orbital_verdict(const Machine& m,
                              const std::vector<Word>& subgroup_words = {},
                              int self_similar_depth = 3, int transitivity_levels = 6,
                              const Budgets& budgets = {});

std::string chi_report_to_json_text(const ChiReport& r);
std::string verdict_report_to_json_text(const VerdictReport& r);
std::string orbital_to_json_text(const OrbitalGraph& g);
std::string orbital_to_dot(const OrbitalGraph& g, const std::string& name = "orbital");

}  // namespace selfsim
