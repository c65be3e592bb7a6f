#include "selfsim/enumeration.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "selfsim/analysis.hpp"
#include "selfsim/reversibility.hpp"
#include "selfsim/transducer.hpp"

namespace selfsim {

std::optional<EnumerationFilter> enumeration_filter_from_name(const std::string& name) {
  if (name == "any" || name == "all") return EnumerationFilter::kAny;
  if (name == "rank-drop") return EnumerationFilter::kRankDrop;
  if (name == "reversible-not-bireversible")
    return EnumerationFilter::kReversibleNotBireversible;
  if (name == "sink-coaccessible") return EnumerationFilter::kSinkCoaccessible;
  return std::nullopt;
}

namespace {

std::vector<std::string> default_state_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    std::string name;
    int x = i;
    do {
      name.insert(name.begin(), static_cast<char>('a' + x % 26));
      x = x / 26 - 1;
    } while (x >= 0);
    names.push_back(name);
  }
  return names;
}

std::vector<std::string> default_letter_names(int k) {
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back(std::to_string(i));
  return names;
}

// One state's row: (next, out) per letter, invertible by construction.
struct StateBlock {
  std::vector<int> next;
  std::vector<int> out;
  std::vector<int> key() const {
    std::vector<int> k;
    for (std::size_t i = 0; i < next.size(); ++i) {
      k.push_back(next[i]);
      k.push_back(out[i]);
    }
    return k;
  }
};

std::vector<StateBlock> state_blocks(int n_states, int n_letters) {
  std::vector<int> perm(n_letters);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<StateBlock> blocks;
  std::vector<int> next(n_letters, 0);
  while (true) {
    for (const auto& p : perms) blocks.push_back({next, p});
    int i = n_letters - 1;
    while (i >= 0 && next[i] == n_states - 1) next[i--] = 0;
    if (i < 0) break;
    next[i]++;
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const StateBlock& a, const StateBlock& b) { return a.key() < b.key(); });
  return blocks;
}

std::vector<int> machine_key(const Machine& m) {
  std::vector<int> key;
  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.num_letters(); ++a) {
      key.push_back(m.next(s, a));
      key.push_back(m.out(s, a));
    }
  return key;
}

bool is_canonical(const Machine& m) {
  const int n = m.num_states(), k = m.num_letters();
  std::vector<int> key = machine_key(m);
  std::vector<int> sigma(n), tau(k);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    std::iota(tau.begin(), tau.end(), 0);
    do {
      std::vector<int> sigma_inv(n), tau_inv(k);
      for (int i = 0; i < n; ++i) sigma_inv[sigma[i]] = i;
      for (int i = 0; i < k; ++i) tau_inv[tau[i]] = i;
      std::vector<int> relabeled;
      for (int s = 0; s < n; ++s)
        for (int a = 0; a < k; ++a) {
          relabeled.push_back(sigma[m.next(sigma_inv[s], tau_inv[a])]);
          relabeled.push_back(tau[m.out(sigma_inv[s], tau_inv[a])]);
        }
      if (relabeled < key) return false;
    } while (std::next_permutation(tau.begin(), tau.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return true;
}

std::optional<std::string> filter_analysis(const Machine& m, EnumerationFilter filter) {
  switch (filter) {
    case EnumerationFilter::kAny: {
      std::ostringstream s;
      s << m.num_states() << " states, " << m.num_letters() << " letters";
      return s.str();
    }
    case EnumerationFilter::kRankDrop: {
      LevelScan scan = scan_level(enriched_dual(m));
      if (!scan.all_components_drop) return std::nullopt;
      std::ostringstream s;
      s << "rank drop:";
      for (const ComponentFinding& f : scan.findings)
        s << " [v=" << f.witness_vertex << " " << f.stab_rank << "->" << f.image_rank
          << "]";
      return s.str();
    }
    case EnumerationFilter::kReversibleNotBireversible: {
      ValidationReport v = validate(m);
      if (!v.reversible || !v.reduced) return std::nullopt;
      auto comps = dual_components_of(m);
      for (const auto& c : comps)
        if (c.bireversible) return std::nullopt;
      std::ostringstream s;
      s << "reversible, reduced, " << comps.size()
        << " non-bireversible dual component(s)";
      return s.str();
    }
    case EnumerationFilter::kSinkCoaccessible: {
      ValidationReport v = validate(m);
      if (!v.sink_state || !v.sink_coaccessible) return std::nullopt;
      return "sink state " + m.states().name(*v.sink_state) + " co-accessible";
    }
  }
  return std::nullopt;
}

}  // namespace

std::size_t enumeration_size(int n_states, int n_letters) {
  std::size_t per_state = 1;
  for (int i = 2; i <= n_letters; ++i) per_state *= static_cast<std::size_t>(i);
  for (int i = 0; i < n_letters; ++i) per_state *= static_cast<std::size_t>(n_states);
  std::size_t total = 1;
  for (int i = 0; i < n_states; ++i) total *= per_state;
  return total;
}

void enumerate_machines(int n_states, int n_letters, EnumerationFilter filter,
                        bool canonical,
                        const std::function<bool(const EnumeratedMachine&)>& sink) {
  if (n_states <= 0 || n_letters <= 0)
    throw InputError("enumerate: sizes must be positive");
  if (enumeration_size(n_states, n_letters) > 100000000)
    throw BudgetError("enumerate: candidate space too large");

  Alphabet states(default_state_names(n_states));
  Alphabet letters(default_letter_names(n_letters));
  std::vector<StateBlock> blocks = state_blocks(n_states, n_letters);

  std::vector<std::size_t> choice(n_states, 0);
  std::size_t ordinal = 0;
  while (true) {
    std::vector<int> next, out;
    for (int s = 0; s < n_states; ++s) {
      const StateBlock& b = blocks[choice[s]];
      next.insert(next.end(), b.next.begin(), b.next.end());
      out.insert(out.end(), b.out.begin(), b.out.end());
    }
    Machine m(states, letters, std::move(next), std::move(out));
    if (!canonical || is_canonical(m)) {
      if (auto analysis = filter_analysis(m, filter)) {
        if (!sink({m, *analysis, ordinal})) return;
      }
    }
    ++ordinal;
    int i = n_states - 1;
    while (i >= 0 && choice[i] == blocks.size() - 1) choice[i--] = 0;
    if (i < 0) break;
    choice[i]++;
  }
}

}  // namespace selfsim
