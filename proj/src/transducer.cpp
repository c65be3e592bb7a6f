#include "selfsim/transducer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "selfsim/stallings.hpp"

namespace selfsim {

Transducer::Transducer(Alphabet vertices, Alphabet gens, Alphabet out_gens,
                       std::vector<int> targets, std::vector<Word> outputs)
    : vertices_(std::move(vertices)),
      gens_(std::move(gens)),
      out_gens_(std::move(out_gens)),
      targets_(std::move(targets)),
      outputs_(std::move(outputs)) {
  const int n = vertices_.size(), k = gens_.size();
  if (targets_.size() != static_cast<std::size_t>(n) * k ||
      outputs_.size() != static_cast<std::size_t>(n) * k)
    throw InputError("transducer edge tables have the wrong size");
  inverse_targets_.assign(static_cast<std::size_t>(n) * k, -1);
  for (int g = 0; g < k; ++g) {
    for (int v = 0; v < n; ++v) {
      int t = edge_target(v, g);
      if (t < 0 || t >= n) throw InputError("transducer edge target out of range");
      if (inverse_targets_[static_cast<std::size_t>(t) * k + g] != -1)
        throw InputError("generator " + gens_.name(g) +
                         " does not act as a permutation of the vertices");
      inverse_targets_[static_cast<std::size_t>(t) * k + g] = v;
    }
  }
}

int Transducer::vertex_image(int vertex, SignedGen g) const {
  return g.sign > 0
             ? edge_target(vertex, g.index)
             : inverse_targets_[static_cast<std::size_t>(vertex) * num_gens() + g.index];
}

int Transducer::vertex_walk(int vertex, const Word& w) const {
  int at = vertex;
  for (const SignedGen& g : w.letters()) at = vertex_image(at, g);
  return at;
}

std::pair<int, Word> Transducer::walk(int vertex, const Word& w) const {
  int at = vertex;
  std::vector<SignedGen> out;
  for (const SignedGen& g : w.letters()) {
    if (g.sign > 0) {
      const Word& y = edge_output(at, g.index);
      out.insert(out.end(), y.letters().begin(), y.letters().end());
      at = edge_target(at, g.index);
    } else {
      int src = vertex_image(at, g);
      const Word& y = edge_output(src, g.index);
      for (auto it = y.letters().rbegin(); it != y.letters().rend(); ++it)
        out.push_back(it->inverse());
      at = src;
    }
  }
  return {at, Word(out_gens_, out)};
}

Transducer enriched_dual(const Machine& m) {
  if (!m.invertible()) throw InputError("enriched_dual: machine is not invertible");
  const int n = m.num_states(), k = m.num_letters();
  std::vector<int> targets(static_cast<std::size_t>(k) * n);
  std::vector<Word> outputs(static_cast<std::size_t>(k) * n);
  for (int a = 0; a < k; ++a) {
    for (int x = 0; x < n; ++x) {
      targets[static_cast<std::size_t>(a) * n + x] = m.out(x, a);
      outputs[static_cast<std::size_t>(a) * n + x] = gen_word(m.states(), m.next(x, a));
    }
  }
  return Transducer(m.letters(), m.states(), m.states(), std::move(targets),
                    std::move(outputs));
}

std::vector<std::vector<int>> components(const Transducer& t) {
  const int n = t.num_vertices();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int v = 0; v < n; ++v)
    for (int g = 0; g < t.num_gens(); ++g) {
      int a = find(v), b = find(t.edge_target(v, g));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < n; ++v) groups[find(v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace {

std::string tuple_name(const Alphabet& letters, const std::vector<int>& tuple) {
  bool single = true;
  for (const std::string& s : letters.symbols())
    if (s.size() != 1) single = false;
  std::string name;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i && !single) name += '.';
    name += letters.name(tuple[i]);
  }
  return name;
}

}  // namespace

std::vector<int> tuple_image(const Transducer& t, const std::vector<int>& tuple,
                             const Word& w) {
  std::vector<int> image(tuple.size());
  Word cur = w;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    auto [end, out] = t.walk(tuple[i], cur);
    image[i] = end;
    cur = out;
  }
  return image;
}

std::pair<std::vector<int>, Word> tuple_walk(const Transducer& t,
                                             const std::vector<int>& tuple,
                                             const Word& w) {
  std::vector<int> image(tuple.size());
  Word cur = w;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    auto [end, out] = t.walk(tuple[i], cur);
    image[i] = end;
    cur = out;
  }
  return {image, cur};
}

Transducer power(const Transducer& t, int k, const Budgets& budgets) {
  if (k <= 0) throw InputError("power: exponent must be positive");
  if (!t.self_composable())
    throw InputError("power: transducer outputs are not over its own generators");
  const int n = t.num_vertices();
  std::size_t count = 1;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<std::size_t>(n);
    if (count > budgets.power_vertices)
      throw BudgetError("power: vertex budget exceeded at |A|^" + std::to_string(k));
  }

  std::vector<std::vector<int>> tuples;
  tuples.reserve(count);
  std::vector<int> tuple(k, 0);
  while (true) {
    tuples.push_back(tuple);
    int i = k - 1;
    while (i >= 0 && tuple[i] == n - 1) tuple[i--] = 0;
    if (i < 0) break;
    tuple[i]++;
  }

  std::vector<std::string> names;
  names.reserve(count);
  for (const auto& tp : tuples) names.push_back(tuple_name(t.vertices(), tp));
  Alphabet vertex_names(names);

  auto index_of = [&](const std::vector<int>& tp) {
    std::size_t idx = 0;
    for (int v : tp) idx = idx * n + v;
    return static_cast<int>(idx);
  };

  const int g_count = t.num_gens();
  std::vector<int> targets(count * g_count);
  std::vector<Word> outputs(count * g_count);
  for (std::size_t v = 0; v < count; ++v) {
    for (int g = 0; g < g_count; ++g) {
      auto [image, out] = tuple_walk(t, tuples[v], gen_word(t.gens(), g));
      targets[v * g_count + g] = index_of(image);
      outputs[v * g_count + g] = out;
    }
  }
  return Transducer(vertex_names, t.gens(), t.out_gens(), std::move(targets),
                    std::move(outputs));
}

Transducer restrict(const Transducer& t, const std::vector<Word>& words) {
  for (const Word& w : words)
    if (!(w.alphabet() == t.gens()))
      throw InputError("restrict: word not over the transducer's generators");
  if (!words.empty()) {
    Subgroup span(words[0].alphabet(), words);
    if (span.rank() != static_cast<int>(words.size()))
      throw InputError("restrict: the words are not a free basis");
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < words.size(); ++i) names.push_back("g" + std::to_string(i));
  Alphabet gens(names);
  const int n = t.num_vertices(), k = static_cast<int>(words.size());
  std::vector<int> targets(static_cast<std::size_t>(n) * k);
  std::vector<Word> outputs(static_cast<std::size_t>(n) * k);
  for (int v = 0; v < n; ++v) {
    for (int g = 0; g < k; ++g) {
      auto [end, out] = t.walk(v, words[g]);
      targets[static_cast<std::size_t>(v) * k + g] = end;
      outputs[static_cast<std::size_t>(v) * k + g] = out;
    }
  }
  return Transducer(t.vertices(), gens, t.out_gens(), std::move(targets),
                    std::move(outputs));
}

long long perm_order(const Transducer& t, const Word& w, int level,
                     const Budgets& budgets) {
  if (level <= 0) throw InputError("perm_order: level must be positive");
  const int n = t.num_vertices();
  std::size_t count = 1;
  for (int i = 0; i < level; ++i) {
    count *= static_cast<std::size_t>(n);
    if (count > budgets.power_vertices)
      throw BudgetError("perm_order: vertex budget exceeded");
  }
  // Permutation of all level-tuples, then the lcm of its cycle lengths.
  std::vector<int> image(count);
  std::vector<int> tuple(level, 0);
  std::size_t idx = 0;
  while (true) {
    std::vector<int> img = tuple_image(t, tuple, w);
    std::size_t to = 0;
    for (int v : img) to = to * n + v;
    image[idx] = static_cast<int>(to);
    int i = level - 1;
    while (i >= 0 && tuple[i] == n - 1) tuple[i--] = 0;
    if (i < 0) break;
    tuple[i]++;
    ++idx;
  }

  std::vector<char> seen(count, 0);
  long long order = 1;
  for (std::size_t v = 0; v < count; ++v) {
    if (seen[v]) continue;
    long long len = 0;
    std::size_t at = v;
    while (!seen[at]) {
      seen[at] = 1;
      at = static_cast<std::size_t>(image[at]);
      ++len;
    }
    long long g = std::gcd(order, len);
    if (order / g > (1LL << 40) / std::max(1LL, len))
      throw BudgetError("perm_order: cycle lcm exceeds the supported range");
    order = order / g * len;
  }
  return order;
}

std::string transducer_to_json_text(const Transducer& t) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["vertices"] = t.vertices().symbols();
  j["gens"] = t.gens().symbols();
  j["out_gens"] = t.out_gens().symbols();
  auto& es = j["edges"] = nlohmann::ordered_json::array();
  for (int v = 0; v < t.num_vertices(); ++v) {
    for (int g = 0; g < t.num_gens(); ++g) {
      nlohmann::ordered_json e;
      e["vertex"] = t.vertices().name(v);
      e["gen"] = t.gens().name(g);
      e["target"] = t.vertices().name(t.edge_target(v, g));
      e["output"] = word_tokens(t.edge_output(v, g));
      es.push_back(e);
    }
  }
  return j.dump(2) + "\n";
}

std::string transducer_to_dot(const Transducer& t, const std::string& name) {
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n";
  for (int v = 0; v < t.num_vertices(); ++v)
    out << "  v" << v << " [label=\"" << t.vertices().name(v) << "\", shape=circle];\n";
  for (int v = 0; v < t.num_vertices(); ++v)
    for (int g = 0; g < t.num_gens(); ++g)
      out << "  v" << v << " -> v" << t.edge_target(v, g) << " [label=\""
          << t.gens().name(g) << "|" << to_string(t.edge_output(v, g)) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace selfsim
