#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfsim/analysis.hpp"
#include "selfsim/machine.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

/// Two dual transitions sharing (output, target): the obstruction to
/// bireversibility within a dual component, recorded for audit.
struct DualCollision {
  std::string letter1, state1;
  std::string letter2, state2;
  std::string shared_output_state;
  std::string shared_target_letter;
};

struct DualComponentReport {
  std::vector<std::string> letters;
  bool bireversible = true;
  std::optional<DualCollision> collision;
};

enum class ReversibilityVerdict { kCyclicOrNotFree, kNotApplicable };

struct ReversibilityReport {
  bool invertible = false;
  bool reversible = false;
  bool reduced = false;
  std::vector<DualComponentReport> dual_components;
  ReversibilityVerdict verdict = ReversibilityVerdict::kNotApplicable;
  std::string failing;  // first failed hypothesis when not applicable
  std::optional<Word> relation;
  std::vector<std::string> notes;  // walk transcripts and search summaries
};

/// Two walks from a common vertex tuple with inputs that are distinct group
/// elements and oracle-equal outputs: the action at that tuple is not
/// injective on the group.
struct NonBireversibilityWitness {
  int level = 1;
  std::vector<int> tuple;
  SignedGen input1, input2;
  Word output1, output2;
  std::vector<int> end1, end2;
};

std::optional<NonBireversibilityWitness> find_nonbireversibility_witness(
    const Transducer& t, const std::vector<int>& component, int max_level,
    WordOracle& oracle, const Budgets& budgets = {});

/// Rho-shaped continuation of a witness: from each endpoint, follow the edges
/// whose outputs equal s until a tuple repeats; entry exponents are
/// harmonized to k = max, cycle exponents to p = lcm.
struct RhoWitness {
  NonBireversibilityWitness base;
  Word s;
  Word x2, x3;  // entry and cycle inputs from the first endpoint
  Word z2, z3;  // entry and cycle inputs from the second endpoint
  long long k = 0, p = 0;
  bool torsion_case = false;  // a cycle input reduced to 1, so s^p acts trivially
};

RhoWitness rho_extend(const Transducer& t, const NonBireversibilityWitness& witness,
                      const Word& s, WordOracle& oracle, const Budgets& budgets = {});

/// Searches g_n = x1 x2 x3^n x2^-1 x1^-1 z1 z2 z3^-n z2^-1 z1^-1 for the first
/// n with g_n nontrivial; it is then a verified output-trivial circuit input
/// at the witness tuple. Returns the circuit word together with its tuple.
std::optional<std::pair<std::vector<int>, Word>> g_n_search(
    const Transducer& t, const RhoWitness& rho, int n_max, WordOracle& oracle);

/// Promotes the first usable g_n to a full machine-verified relation via
/// extract_relation; requires the transducer to be connected (for several
/// components, the verdict pipeline combines one witness per component).
std::optional<Word> g_n_relation(const Transducer& t, const RhoWitness& rho,
                                 int n_max, WordOracle& oracle,
                                 const Budgets& budgets = {});

/// Per-component bireversibility of the dual, with the violating transition
/// pair when one exists.
std::vector<DualComponentReport> dual_components_of(const Machine& m);

/// Hypothesis check: reduced, reversible, and every dual component fails
/// bireversibility. When all hold the verdict is CYCLIC_OR_NOT_FREE and a
/// relation is attempted through the witness pipeline.
ReversibilityReport reversibility_verdict(const Machine& m, int max_level = 3,
                                          const Budgets& budgets = {});

std::string reversibility_report_to_json_text(const ReversibilityReport& r);

}  // namespace selfsim
