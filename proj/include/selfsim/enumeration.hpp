#pragma once

#include <functional>
#include <optional>
#include <string>

#include "selfsim/machine.hpp"

namespace selfsim {

enum class EnumerationFilter {
  kAny,
  kRankDrop,                   // every dual component shows a stabilizer rank drop
  kReversibleNotBireversible,  // reduced, reversible, no bireversible dual component
  kSinkCoaccessible,
};

std::optional<EnumerationFilter> enumeration_filter_from_name(const std::string& name);

struct EnumeratedMachine {
  Machine machine;
  std::string analysis;   // one-line summary of why the filter matched
  std::size_t ordinal;    // position in the full enumeration
};

/// Enumerates every invertible machine of the given size in lexicographic
/// order of the transition table rows ((next, out) per state and letter),
/// calling `sink` for each filter match until it returns false. With
/// `canonical` set, only the least machine of each state/letter renaming
/// class is emitted.
void enumerate_machines(int n_states, int n_letters, EnumerationFilter filter,
                        bool canonical,
                        const std::function<bool(const EnumeratedMachine&)>& sink);

/// Total number of invertible machines of the given size: (k! n^k)^n.
std::size_t enumeration_size(int n_states, int n_letters);

}  // namespace selfsim
