#include "selfsim/orbital.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace selfsim {

OrbitalGraph build_orbital(const Machine& m, const std::vector<Word>& seed_words,
                           WordOracle& oracle, const Budgets& budgets) {
  if (!m.invertible()) throw InputError("build_orbital: machine is not invertible");
  if (seed_words.empty()) throw InputError("build_orbital: no seed words");
  for (const Word& w : seed_words)
    if (!(w.alphabet() == m.states()))
      throw InputError("build_orbital: seed word is not over the machine's states");

  OrbitalGraph g;
  g.letters = m.letters();
  g.states = m.states();
  const int k = m.num_letters();

  auto class_of = [&](const Word& w) -> int {
    for (int v = 0; v < g.num_vertices(); ++v)
      if (oracle.equal(w, g.vertices[v])) return v;
    g.vertices.push_back(w);
    if (g.vertices.size() > budgets.orbit_vertices)
      throw BudgetError("build_orbital: vertex budget exceeded");
    return g.num_vertices() - 1;
  };

  for (const Word& w : seed_words) g.seeds.push_back(class_of(w));
  std::size_t processed = 0;
  while (processed < g.vertices.size()) {
    int v = static_cast<int>(processed++);
    for (int a = 0; a < k; ++a) {
      Word s = m.section(g.vertices[v], a);
      int c = class_of(s);
      g.edges.push_back(c);
    }
  }
  // Edges were appended per vertex in discovery order, so the layout matches
  // vertex * k + a.
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.identity_vertex < 0 && oracle.is_identity(g.vertices[v]))
      g.identity_vertex = v;

  g.letter_orbits = components(enriched_dual(m));
  return g;
}

namespace {

std::vector<char> reaches_identity(const OrbitalGraph& g, const std::vector<int>& letters) {
  std::vector<char> reach(g.num_vertices(), 0);
  if (g.identity_vertex < 0) return reach;
  reach[g.identity_vertex] = 1;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (reach[v]) continue;
      for (int a : letters)
        if (reach[g.edge(v, a)]) {
          reach[v] = 1;
          grew = true;
          break;
        }
    }
  }
  return reach;
}

std::vector<int> all_letters(const OrbitalGraph& g) {
  std::vector<int> ls(g.letters.size());
  for (int a = 0; a < g.letters.size(); ++a) ls[a] = a;
  return ls;
}

}  // namespace

bool sink_coaccessible(const OrbitalGraph& g) {
  if (g.identity_vertex < 0) return false;
  auto reach = reaches_identity(g, all_letters(g));
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

bool sink_coaccessible_within(const OrbitalGraph& g, const std::vector<int>& letters) {
  if (g.identity_vertex < 0) return false;
  auto reach = reaches_identity(g, letters);
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

namespace {

struct WalkCounts {
  std::vector<mpz_class> T, E;
  std::vector<mpq_class> chi;
};

WalkCounts count_walks(const OrbitalGraph& g, const std::vector<int>& letters,
                       int m_max) {
  WalkCounts out;
  std::vector<mpz_class> counts(g.num_vertices(), 0);
  for (int s : g.seeds) counts[s] += 1;
  mpz_class total = static_cast<long>(g.seeds.size());
  for (int m = 1; m <= m_max; ++m) {
    std::vector<mpz_class> next(g.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (counts[v] == 0) continue;
      for (int a : letters) next[g.edge(v, a)] += counts[v];
    }
    counts = std::move(next);
    total *= static_cast<long>(letters.size());
    mpz_class t = g.identity_vertex >= 0 ? counts[g.identity_vertex] : mpz_class(0);
    out.T.push_back(t);
    out.E.push_back(total - t);
    mpq_class ratio = total == 0 ? mpq_class(0) : mpq_class(t) / mpq_class(total);
    ratio.canonicalize();
    out.chi.push_back(ratio);
  }
  return out;
}

}  // namespace

ChiReport chi_exact(const OrbitalGraph& g, int m_max) {
  if (g.seeds.empty()) throw InputError("chi_exact: the seed set is empty");
  ChiReport r;
  for (int m = 1; m <= m_max; ++m) r.m_values.push_back(m);
  WalkCounts full = count_walks(g, all_letters(g), m_max);
  r.T_counts = full.T;
  r.E_counts = full.E;
  r.chi = full.chi;
  if (g.identity_vertex >= 0) {
    auto h = absorption_probability(g);
    mpq_class sum = 0;
    for (int s : g.seeds) sum += h[s];
    r.chi_limit = sum / mpq_class(static_cast<long>(g.seeds.size()));
    r.chi_limit.canonicalize();
  }
  for (const auto& orbit : g.letter_orbits) {
    WalkCounts part = count_walks(g, orbit, m_max);
    r.per_orbit.push_back({orbit, part.T, part.E, part.chi});
  }
  return r;
}

std::vector<mpq_class> absorption_probability(const OrbitalGraph& g) {
  if (g.identity_vertex < 0)
    throw InputError("absorption_probability: no identity vertex");
  const int n = g.num_vertices();
  auto reach = reaches_identity(g, all_letters(g));

  std::vector<int> transient;  // reach the identity, but are not it
  std::vector<int> index(n, -1);
  for (int v = 0; v < n; ++v)
    if (reach[v] && v != g.identity_vertex) {
      index[v] = static_cast<int>(transient.size());
      transient.push_back(v);
    }
  const int t = static_cast<int>(transient.size());
  const mpq_class step(1, std::max(1, g.letters.size()));

  // (I - Q) h = r, where Q is the sub-stochastic matrix among the transient
  // vertices and r collects the one-step probabilities of hitting 1.
  std::vector<std::vector<mpq_class>> a(t, std::vector<mpq_class>(t + 1, 0));
  for (int i = 0; i < t; ++i) {
    a[i][i] = 1;
    for (int l = 0; l < g.letters.size(); ++l) {
      int to = g.edge(transient[i], l);
      if (to == g.identity_vertex)
        a[i][t] += step;
      else if (index[to] >= 0)
        a[i][index[to]] -= step;
    }
  }
  // Exact Gaussian elimination.
  for (int col = 0; col < t; ++col) {
    int pivot = -1;
    for (int row = col; row < t; ++row)
      if (a[row][col] != 0) {
        pivot = row;
        break;
      }
    if (pivot < 0) throw InternalError("absorption system is singular");
    std::swap(a[col], a[pivot]);
    mpq_class inv = 1 / a[col][col];
    for (int j = col; j <= t; ++j) a[col][j] *= inv;
    for (int row = 0; row < t; ++row) {
      if (row == col || a[row][col] == 0) continue;
      mpq_class f = a[row][col];
      for (int j = col; j <= t; ++j) a[row][j] -= f * a[col][j];
    }
  }
  std::vector<mpq_class> h(n, 0);
  h[g.identity_vertex] = 1;
  for (int i = 0; i < t; ++i) {
    mpq_class value = a[i][t];
    value.canonicalize();
    h[transient[i]] = value;
  }
  return h;
}

namespace {

std::vector<std::vector<int>> orbits_under(const std::vector<std::vector<int>>& perms,
                                           int k) {
  std::vector<int> parent(k);
  for (int i = 0; i < k; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& p : perms)
    for (int a = 0; a < k; ++a) {
      int x = find(a), y = find(p[a]);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  std::map<int, std::vector<int>> groups;
  for (int a = 0; a < k; ++a) groups[find(a)].push_back(a);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

VerdictReport orbital_verdict(const Machine& m, const std::vector<Word>& subgroup_words,
                              int self_similar_depth, int transitivity_levels,
                              const Budgets& budgets) {
  if (!m.invertible()) throw InputError("verdict: machine is not invertible");
  WordOracle oracle(m);
  VerdictReport r;
  r.subgroup_mode = !subgroup_words.empty();

  std::vector<Word> seeds = subgroup_words;
  if (seeds.empty())
    for (int s = 0; s < m.num_states(); ++s) seeds.push_back(gen_word(m.states(), s));

  OrbitalGraph g = build_orbital(m, seeds, oracle, budgets);
  r.identity_present = g.identity_vertex >= 0;
  r.first_level_transitive = g.letter_orbits.size() == 1;
  for (const auto& orbit : g.letter_orbits) {
    std::vector<std::string> names;
    for (int a : orbit) names.push_back(m.letters().name(a));
    r.orbit_letters.push_back(names);
    r.orbit_coaccessible.push_back(sink_coaccessible_within(g, orbit));
  }

  auto orbit_string = [&]() {
    std::string s;
    for (const auto& orbit : r.orbit_letters) {
      if (!s.empty()) s += ", ";
      s += "{";
      for (std::size_t i = 0; i < orbit.size(); ++i) s += (i ? "," : "") + orbit[i];
      s += "}";
    }
    return s;
  };

  if (!r.identity_present) {
    r.failing = "no identity vertex: no element with trivial action is reachable";
    return r;
  }

  std::string coaccess_failure;
  for (std::size_t i = 0; i < r.orbit_coaccessible.size(); ++i) {
    if (!r.orbit_coaccessible[i]) {
      coaccess_failure = "identity not co-accessible via letter orbit {";
      for (std::size_t j = 0; j < r.orbit_letters[i].size(); ++j)
        coaccess_failure += (j ? "," : "") + r.orbit_letters[i][j];
      coaccess_failure += "}";
      break;
    }
  }

  if (!r.subgroup_mode) {
    // Whole group: self-similar by construction and transitive on each of
    // its own letter orbits.
    if (!coaccess_failure.empty()) {
      r.failing = coaccess_failure;
      if (!r.first_level_transitive)
        r.failing += "; first level not transitive: orbits " + orbit_string();
      return r;
    }
    r.satisfied = true;
    r.criterion = r.first_level_transitive ? "coaccessible-sink" : "orbit-accessible-sink";
    r.conclusion =
        "every finitely generated self-similar subgroup acting transitively on "
        "each first-level orbit, and every subgroup acting level-transitively, "
        "is either cyclic or not free";
    return r;
  }

  // Subgroup mode: check self-similarity (bounded search) and transitivity.
  std::vector<std::vector<int>> gen_perms;
  for (const Word& w : subgroup_words) gen_perms.push_back(m.letter_permutation(w));
  auto h_orbits = orbits_under(gen_perms, m.num_letters());
  r.transitive_on_each_orbit = h_orbits.size() == g.letter_orbits.size();

  r.self_similar_depth = self_similar_depth;
  r.self_similar_verified = true;
  {
    // Every section of every generator must equal some bounded product of the
    // generators.
    std::vector<Word> candidates{Word(m.states())};
    std::size_t head = 0;
    for (int depth = 0; depth < self_similar_depth; ++depth) {
      std::size_t tail = candidates.size();
      for (; head < tail; ++head) {
        Word base = candidates[head];
        for (const Word& w : subgroup_words) {
          candidates.push_back(concat(base, w));
          candidates.push_back(concat(base, invert(w)));
        }
      }
    }
    for (const Word& w : subgroup_words) {
      for (int a = 0; a < m.num_letters() && r.self_similar_verified; ++a) {
        Word s = m.section(w, a);
        bool found = false;
        for (const Word& c : candidates)
          if (oracle.equal(s, c)) {
            found = true;
            break;
          }
        if (!found) r.self_similar_verified = false;
      }
    }
  }

  // Level transitivity of the subgroup, verified up to the configured level.
  {
    Transducer t = enriched_dual(m);
    r.level_transitive_up_to = 0;
    for (int level = 1; level <= transitivity_levels; ++level) {
      std::size_t count = 1;
      bool over = false;
      for (int i = 0; i < level; ++i) {
        count *= static_cast<std::size_t>(m.num_letters());
        if (count > budgets.power_vertices) over = true;
      }
      if (over) break;
      // Orbit of the all-zero tuple under the subgroup generators.
      std::set<std::vector<int>> seen;
      std::deque<std::vector<int>> queue{std::vector<int>(level, 0)};
      seen.insert(queue.front());
      while (!queue.empty()) {
        auto tup = queue.front();
        queue.pop_front();
        for (const Word& w : subgroup_words) {
          for (const Word& ww : {w, invert(w)}) {
            auto img = tuple_image(t, tup, ww);
            if (seen.insert(img).second) queue.push_back(img);
          }
        }
      }
      if (seen.size() != count) break;
      r.level_transitive_up_to = level;
    }
  }

  if (!coaccess_failure.empty()) {
    r.failing = coaccess_failure;
    if (!r.first_level_transitive)
      r.failing += "; first level not transitive: orbits " + orbit_string();
    return r;
  }
  if (r.self_similar_verified && r.transitive_on_each_orbit) {
    r.satisfied = true;
    r.criterion = "self-similar-subgroup";
    r.conclusion =
        "the subgroup is either cyclic or not free (self-similarity verified to "
        "depth " +
        std::to_string(self_similar_depth) + ")";
    return r;
  }
  if (r.level_transitive_up_to == transitivity_levels && transitivity_levels > 0) {
    r.satisfied = true;
    r.criterion = "level-transitive-subgroup";
    r.conclusion =
        "the subgroup is either cyclic or not free, provided it is level "
        "transitive (verified up to level " +
        std::to_string(r.level_transitive_up_to) + ")";
    return r;
  }
  if (!r.self_similar_verified)
    r.failing = "self-similarity not verified to depth " +
                std::to_string(self_similar_depth);
  else if (!r.transitive_on_each_orbit)
    r.failing = "subgroup is not transitive on each letter orbit: orbits " +
                orbit_string();
  else
    r.failing = "level transitivity only verified up to level " +
                std::to_string(r.level_transitive_up_to);
  return r;
}

std::string chi_report_to_json_text(const ChiReport& r) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["m_values"] = r.m_values;
  auto str_vec = [](const std::vector<mpz_class>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) out.push_back(x.get_str());
    return out;
  };
  auto frac_vec = [](const std::vector<mpq_class>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) out.push_back(x.get_str());
    return out;
  };
  j["T_counts"] = str_vec(r.T_counts);
  j["E_counts"] = str_vec(r.E_counts);
  j["chi"] = frac_vec(r.chi);
  j["chi_limit"] = r.chi_limit.get_str();
  auto& po = j["per_orbit"] = nlohmann::ordered_json::array();
  for (const auto& orbit : r.per_orbit) {
    nlohmann::ordered_json o;
    o["letters"] = orbit.letters;
    o["T_counts"] = str_vec(orbit.T_counts);
    o["E_counts"] = str_vec(orbit.E_counts);
    o["chi"] = frac_vec(orbit.chi);
    po.push_back(o);
  }
  return j.dump(2) + "\n";
}

std::string verdict_report_to_json_text(const VerdictReport& r) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["verdict"] = r.satisfied ? "HYPOTHESES_SATISFIED" : "HYPOTHESES_VIOLATED";
  if (r.satisfied) {
    j["criterion"] = r.criterion;
    j["conclusion"] = r.conclusion;
  } else {
    j["failing"] = r.failing;
  }
  j["identity_present"] = r.identity_present;
  j["first_level_transitive"] = r.first_level_transitive;
  j["orbits"] = r.orbit_letters;
  j["orbit_coaccessible"] = r.orbit_coaccessible;
  if (r.subgroup_mode) {
    j["subgroup"] = true;
    j["self_similar_verified"] = r.self_similar_verified;
    j["self_similar_depth"] = r.self_similar_depth;
    j["transitive_on_each_orbit"] = r.transitive_on_each_orbit;
    j["level_transitive_up_to"] = r.level_transitive_up_to;
  }
  return j.dump(2) + "\n";
}

std::string orbital_to_json_text(const OrbitalGraph& g) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  std::vector<std::string> verts;
  for (const Word& w : g.vertices) verts.push_back(to_string(w));
  j["vertices"] = verts;
  if (g.identity_vertex >= 0) j["identity_vertex"] = to_string(g.vertices[g.identity_vertex]);
  std::vector<std::string> seeds;
  for (int s : g.seeds) seeds.push_back(to_string(g.vertices[s]));
  j["seeds"] = seeds;
  auto& es = j["edges"] = nlohmann::ordered_json::array();
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int a = 0; a < g.letters.size(); ++a) {
      nlohmann::ordered_json e;
      e["from"] = to_string(g.vertices[v]);
      e["letter"] = g.letters.name(a);
      e["to"] = to_string(g.vertices[g.edge(v, a)]);
      es.push_back(e);
    }
  return j.dump(2) + "\n";
}

std::string orbital_to_dot(const OrbitalGraph& g, const std::string& name) {
  std::set<int> seed_set(g.seeds.begin(), g.seeds.end());
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n";
  for (int v = 0; v < g.num_vertices(); ++v) {
    out << "  v" << v << " [label=\"" << to_string(g.vertices[v]) << "\"";
    out << (v == g.identity_vertex ? ", shape=doublecircle" : ", shape=circle");
    if (seed_set.count(v)) out << ", style=filled, fillcolor=lightgray";
    out << "];\n";
  }
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int a = 0; a < g.letters.size(); ++a)
      out << "  v" << v << " -> v" << g.edge(v, a) << " [label=\""
          << g.letters.name(a) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace selfsim
