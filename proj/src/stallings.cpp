#include "selfsim/stallings.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace selfsim {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

// Adjacency key: +gen for outgoing, -gen-1 for incoming.
int out_key(int gen) { return gen; }
int in_key(int gen) { return -gen - 1; }

}  // namespace

LabeledGraph flower(const Alphabet& alphabet, const std::vector<Word>& words) {
  LabeledGraph g;
  g.alphabet = alphabet;
  g.base = 0;
  g.num_vertices = 1;
  for (const Word& w : words) {
    if (!(w.alphabet() == alphabet))
      throw InputError("flower: word over a different alphabet");
    int at = 0;
    const auto& ls = w.letters();
    for (std::size_t i = 0; i < ls.size(); ++i) {
      int next = (i + 1 == ls.size()) ? 0 : g.num_vertices++;
      if (ls[i].sign > 0)
        g.edges.push_back({at, ls[i].index, next});
      else
        g.edges.push_back({next, ls[i].index, at});
      at = next;
    }
  }
  return g;
}

namespace {

// Canonical renumbering: breadth-first from the base over (gen, +/-) in order,
// then any remaining vertices by ascending old id.
LabeledGraph renumber(const Alphabet& alphabet, int base,
                      const std::set<std::tuple<int, int, int>>& edges,
                      const std::vector<int>& vertices) {
  const int n_gens = alphabet.size();
  std::map<int, int> id_of;
  std::map<int, std::vector<int>> succ, pred;
  for (int v : vertices) {
    succ[v].assign(n_gens, -1);
    pred[v].assign(n_gens, -1);
  }
  for (auto [s, g, t] : edges) {
    succ[s][g] = t;
    pred[t][g] = s;
  }
  std::vector<int> order;
  auto bfs_from = [&](int start) {
    if (id_of.count(start)) return;
    std::deque<int> queue{start};
    id_of[start] = static_cast<int>(order.size());
    order.push_back(start);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int g = 0; g < n_gens; ++g) {
        for (int t : {succ[v][g], pred[v][g]}) {
          if (t >= 0 && !id_of.count(t)) {
            id_of[t] = static_cast<int>(order.size());
            order.push_back(t);
            queue.push_back(t);
          }
        }
      }
    }
  };
  if (base >= 0) bfs_from(base);
  for (int v : vertices) bfs_from(v);

  LabeledGraph out;
  out.alphabet = alphabet;
  out.num_vertices = static_cast<int>(order.size());
  out.base = base >= 0 ? id_of.at(base) : -1;
  for (auto [s, g, t] : edges) out.edges.push_back({id_of.at(s), g, id_of.at(t)});
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace

LabeledGraph fold(const LabeledGraph& g) {
  UnionFind uf(g.num_vertices);
  std::vector<std::map<int, int>> adj(g.num_vertices);
  std::vector<std::pair<int, int>> pending;

  auto add_entry = [&](int v, int key, int target) {
    auto [it, inserted] = adj[v].emplace(key, target);
    if (!inserted) pending.emplace_back(it->second, target);
  };
  for (const GraphEdge& e : g.edges) {
    if (e.gen < 0 || e.gen >= g.alphabet.size())
      throw InputError("fold: edge label out of range");
    add_entry(e.source, out_key(e.gen), e.target);
    add_entry(e.target, in_key(e.gen), e.source);
  }

  while (!pending.empty()) {
    auto [x, y] = pending.back();
    pending.pop_back();
    int a = uf.find(x), b = uf.find(y);
    if (a == b) continue;
    if (adj[a].size() < adj[b].size()) std::swap(a, b);
    uf.parent[b] = a;
    for (const auto& [key, tgt] : adj[b]) {
      auto [it, inserted] = adj[a].emplace(key, tgt);
      if (!inserted && uf.find(it->second) != uf.find(tgt))
        pending.emplace_back(it->second, tgt);
    }
    adj[b].clear();
  }

  std::set<std::tuple<int, int, int>> edges;
  std::set<int> roots;
  for (int v = 0; v < g.num_vertices; ++v) roots.insert(uf.find(v));
  for (const GraphEdge& e : g.edges)
    edges.emplace(uf.find(e.source), e.gen, uf.find(e.target));
  if (g.num_vertices == 0) {
    LabeledGraph out;
    out.alphabet = g.alphabet;
    return out;
  }
  return renumber(g.alphabet, g.base >= 0 ? uf.find(g.base) : -1, edges,
                  std::vector<int>(roots.begin(), roots.end()));
}

int graph_rank(const LabeledGraph& g) {
  return static_cast<int>(g.edges.size()) - g.num_vertices + 1;
}

Subgroup::Subgroup(Alphabet ambient, const std::vector<Word>& generators) {
  *this = from_folded(fold(flower(ambient, generators)));
}

Subgroup Subgroup::from_folded(LabeledGraph folded) {
  if (folded.base < 0) throw InputError("subgroup core needs a base vertex");

  // Keep the base component only.
  const int n_gens = folded.alphabet.size();
  std::vector<char> keep(folded.num_vertices, 0);
  {
    std::vector<std::vector<int>> nbrs(folded.num_vertices);
    for (const GraphEdge& e : folded.edges) {
      nbrs[e.source].push_back(e.target);
      nbrs[e.target].push_back(e.source);
    }
    std::deque<int> queue{folded.base};
    keep[folded.base] = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int t : nbrs[v])
        if (!keep[t]) {
          keep[t] = 1;
          queue.push_back(t);
        }
    }
  }

  // Prune: repeatedly drop non-base vertices of total degree <= 1.
  std::vector<int> degree(folded.num_vertices, 0);
  for (const GraphEdge& e : folded.edges) {
    if (!keep[e.source] || !keep[e.target]) continue;
    degree[e.source]++;
    degree[e.target]++;
  }
  std::deque<int> queue;
  for (int v = 0; v < folded.num_vertices; ++v)
    if (keep[v] && v != folded.base && degree[v] <= 1) queue.push_back(v);
  std::vector<GraphEdge> live(folded.edges.begin(), folded.edges.end());
  std::vector<char> edge_dead(live.size(), 0);
  // Small graphs throughout; a rescan per removal is fine.
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (!keep[v] || degree[v] > 1) continue;
    keep[v] = 0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (edge_dead[i]) continue;
      if (live[i].source == v || live[i].target == v) {
        edge_dead[i] = 1;
        for (int u : {live[i].source, live[i].target}) {
          if (u == v || !keep[u]) continue;
          if (--degree[u] <= 1 && u != folded.base) queue.push_back(u);
        }
      }
    }
  }

  std::set<std::tuple<int, int, int>> edges;
  std::vector<int> vertices;
  for (int v = 0; v < folded.num_vertices; ++v)
    if (keep[v]) vertices.push_back(v);
  for (std::size_t i = 0; i < live.size(); ++i)
    if (!edge_dead[i] && keep[live[i].source] && keep[live[i].target])
      edges.emplace(live[i].source, live[i].gen, live[i].target);

  Subgroup s;
  s.core_ = renumber(folded.alphabet, folded.base, edges, vertices);
  (void)n_gens;
  s.build_tables();
  return s;
}

void Subgroup::build_tables() {
  const int n = core_.num_vertices, k = core_.alphabet.size();
  succ_.assign(static_cast<std::size_t>(n) * k, -1);
  pred_.assign(static_cast<std::size_t>(n) * k, -1);
  for (const GraphEdge& e : core_.edges) {
    succ_[static_cast<std::size_t>(e.source) * k + e.gen] = e.target;
    pred_[static_cast<std::size_t>(e.target) * k + e.gen] = e.source;
  }
}

int Subgroup::rank() const { return graph_rank(core_); }

int Subgroup::step(int vertex, SignedGen g) const {
  const int k = core_.alphabet.size();
  const auto& table = g.sign > 0 ? succ_ : pred_;
  return table[static_cast<std::size_t>(vertex) * k + g.index];
}

int Subgroup::walk(int vertex, const Word& w) const {
  int at = vertex;
  for (const SignedGen& g : w.letters()) {
    at = step(at, g);
    if (at < 0) return -1;
  }
  return at;
}

bool Subgroup::complete() const {
  const int n = core_.num_vertices, k = core_.alphabet.size();
  for (int v = 0; v < n; ++v)
    for (int g = 0; g < k; ++g)
      if (step(v, SignedGen(g, 1)) < 0 || step(v, SignedGen(g, -1)) < 0) return false;
  return true;
}

bool contains(const Subgroup& s, const Word& w) {
  if (!(w.alphabet() == s.ambient()))
    throw InputError("contains: word over a different alphabet");
  return s.walk(s.base(), w) == s.base();
}

Subgroup intersect(const Subgroup& s1, const Subgroup& s2) {
  if (!(s1.ambient() == s2.ambient()))
    throw InputError("intersect: subgroups of different free groups");
  const int k = s1.ambient().size();
  std::map<std::pair<int, int>, int> id_of;
  std::vector<std::pair<int, int>> verts;
  auto vid = [&](std::pair<int, int> p) {
    auto [it, inserted] = id_of.emplace(p, static_cast<int>(verts.size()));
    if (inserted) verts.push_back(p);
    return it->second;
  };
  std::set<std::tuple<int, int, int>> edges;
  std::deque<int> queue{vid({s1.base(), s2.base()})};
  std::set<int> seen{0};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    auto [u1, u2] = verts[v];
    for (int g = 0; g < k; ++g) {
      for (int sign : {1, -1}) {
        int t1 = s1.step(u1, SignedGen(g, sign));
        int t2 = s2.step(u2, SignedGen(g, sign));
        if (t1 < 0 || t2 < 0) continue;
        int t = vid({t1, t2});
        if (sign > 0)
          edges.emplace(v, g, t);
        else
          edges.emplace(t, g, v);
        if (seen.insert(t).second) queue.push_back(t);
      }
    }
  }
  LabeledGraph g;
  g.alphabet = s1.ambient();
  g.num_vertices = static_cast<int>(verts.size());
  g.base = 0;
  for (auto [s, gen, t] : edges) g.edges.push_back({s, gen, t});
  return Subgroup::from_folded(fold(g));
}

std::vector<Word> loop_basis(const Subgroup& s) {
  const int n = s.num_vertices(), k = s.ambient().size();
  std::vector<int> parent(n, -1);
  std::vector<SignedGen> via(n);
  std::vector<char> visited(n, 0);
  std::set<std::tuple<int, int, int>> tree_edges;
  std::deque<int> queue{s.base()};
  visited[s.base()] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int g = 0; g < k; ++g) {
      for (int sign : {1, -1}) {
        int t = s.step(v, SignedGen(g, sign));
        if (t < 0 || visited[t]) continue;
        visited[t] = 1;
        parent[t] = v;
        via[t] = SignedGen(g, sign);
        tree_edges.emplace(sign > 0 ? v : t, g, sign > 0 ? t : v);
        queue.push_back(t);
      }
    }
  }
  std::vector<std::vector<SignedGen>> path(n);
  // Paths in breadth-first discovery order; parents are always ready first.
  std::vector<int> by_depth(n);
  for (int v = 0; v < n; ++v) by_depth[v] = v;
  std::stable_sort(by_depth.begin(), by_depth.end(), [&](int a, int b) {
    auto depth = [&](int x) {
      int d = 0;
      while (parent[x] >= 0) {
        x = parent[x];
        ++d;
      }
      return d;
    };
    return depth(a) < depth(b);
  });
  for (int v : by_depth) {
    if (parent[v] < 0) continue;
    path[v] = path[parent[v]];
    path[v].push_back(via[v]);
  }
  std::vector<Word> basis;
  for (const GraphEdge& e : s.core().edges) {
    if (tree_edges.count({e.source, e.gen, e.target})) continue;
    std::vector<SignedGen> word = path[e.source];
    word.push_back(SignedGen(e.gen, 1));
    for (auto it = path[e.target].rbegin(); it != path[e.target].rend(); ++it)
      word.push_back(it->inverse());
    basis.emplace_back(s.ambient(), word);
  }
  return basis;
}

Word find_escaping_word(const Subgroup& s) {
  if (s.complete())
    throw InputError("no escaping word: the core is complete (finite index)");
  const int k = s.ambient().size();
  // Directions probed positives-first, then negatives.
  std::vector<SignedGen> dirs;
  for (int g = 0; g < k; ++g) dirs.push_back(SignedGen(g, 1));
  for (int g = 0; g < k; ++g) dirs.push_back(SignedGen(g, -1));

  struct Node {
    int vertex;
    SignedGen last;
    int parent;
  };
  std::vector<Node> nodes{{s.base(), SignedGen(-1, 1), -1}};
  std::set<std::pair<int, SignedGen>> seen;
  std::size_t head = 0;
  while (head < nodes.size()) {
    Node node = nodes[head];
    for (const SignedGen& d : dirs) {
      if (node.last.index >= 0 && d.cancels(node.last)) continue;
      int t = s.step(node.vertex, d);
      if (t < 0) {
        std::vector<SignedGen> letters{d};
        for (int at = static_cast<int>(head); nodes[at].parent >= 0; at = nodes[at].parent)
          letters.push_back(nodes[at].last);
        std::reverse(letters.begin(), letters.end());
        return Word(s.ambient(), letters);
      }
      if (seen.emplace(t, d).second)
        nodes.push_back({t, d, static_cast<int>(head)});
    }
    ++head;
  }
  throw InternalError("escaping-word search exhausted an incomplete core");
}

Word commutation_breaker(const Word& y1, const Word& y2) {
  if (y1.empty() || y2.empty())
    throw InputError("commutation_breaker: arguments must be nontrivial");
  if (!(y1.alphabet() == y2.alphabet()))
    throw InputError("commutation_breaker: words over different alphabets");
  if (y1.alphabet().size() < 2)
    throw InputError("commutation_breaker: ambient free group must have rank > 1");
  if (!commutator(y1, y2).empty()) return Word(y1.alphabet());
  Word root = primitive_root(y1).root;
  Subgroup cyclic(y1.alphabet(), {root});
  return find_escaping_word(cyclic);
}

Word substitute(const Word& w, const std::vector<Word>& mapping) {
  if (mapping.empty()) {
    if (!w.empty()) throw InputError("substitute: empty mapping");
    return w;
  }
  Word out(mapping[0].alphabet());
  for (const SignedGen& g : w.letters()) {
    if (g.index >= static_cast<int>(mapping.size()))
      throw InputError("substitute: generator outside the mapping");
    out = concat(out, g.sign > 0 ? mapping[g.index] : invert(mapping[g.index]));
  }
  return out;
}

std::optional<Word> hom_kernel_element(const std::vector<Word>& basis,
                                       const std::vector<Word>& images) {
  if (basis.size() != images.size())
    throw InputError("hom_kernel_element: basis/images length mismatch");
  const int n = static_cast<int>(basis.size());
  if (n == 0) return std::nullopt;

  std::vector<std::string> petal_names;
  for (int i = 0; i < n; ++i) petal_names.push_back("p" + std::to_string(i));
  Alphabet petals(petal_names);

  std::vector<Word> petal(n);
  std::vector<Word> img = images;
  for (int i = 0; i < n; ++i) petal[i] = gen_word(petals, i);

  auto finish = [&](const Word& petal_word) -> Word {
    Word kernel = substitute(petal_word, basis);
    if (kernel.empty())
      throw InternalError("kernel candidate substituted to the identity");
    if (!substitute(petal_word, images).empty())
      throw InternalError("kernel candidate image is nontrivial");
    return kernel;
  };

  // Nielsen reduction with strictly shortening moves, mirrored on the petals.
  bool moved = true;
  while (moved) {
    moved = false;
    for (int i = 0; i < n; ++i)
      if (img[i].empty()) return finish(petal[i]);
    for (int j = 0; j < n && !moved; ++j) {
      for (int i = 0; i < n && !moved; ++i) {
        if (i == j) continue;
        for (int sign : {1, -1}) {
          Word gi = sign > 0 ? img[i] : invert(img[i]);
          Word pi = sign > 0 ? petal[i] : invert(petal[i]);
          Word left = concat(gi, img[j]);
          if (left.size() < img[j].size()) {
            img[j] = left;
            petal[j] = concat(pi, petal[j]);
            moved = true;
            break;
          }
          Word right = concat(img[j], gi);
          if (right.size() < img[j].size()) {
            img[j] = right;
            petal[j] = concat(petal[j], pi);
            moved = true;
            break;
          }
        }
      }
    }
  }

  Subgroup image_subgroup(images[0].alphabet(), images);
  if (image_subgroup.rank() == n) return std::nullopt;

  // Rank did drop but no shortening move sees it: fall back to a
  // breadth-first search for a short kernel word in the petal generators.
  std::deque<Word> queue{Word(petals)};
  const std::size_t node_cap = 2000000;
  std::size_t visited = 0;
  while (!queue.empty()) {
    Word w = queue.front();
    queue.pop_front();
    if (++visited > node_cap)
      throw InternalError("kernel search exceeded its node budget");
    if (!w.empty() && substitute(w, images).empty()) return finish(w);
    if (w.size() >= 16) continue;
    for (int g = 0; g < n; ++g) {
      for (int sign : {1, -1}) {
        SignedGen d(g, sign);
        if (!w.empty() && w.back().cancels(d)) continue;
        std::vector<SignedGen> next = w.letters();
        next.push_back(d);
        queue.emplace_back(petals, next);
      }
    }
  }
  throw InternalError("kernel search exhausted without a witness");
}

std::string to_dot(const Subgroup& s, const std::string& name) {
  std::ostringstream out;
  out << "digraph " << name << " {\n";
  out << "  rankdir=LR;\n";
  for (int v = 0; v < s.num_vertices(); ++v) {
    out << "  v" << v << " [label=\"" << v << "\""
        << (v == s.base() ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (const GraphEdge& e : s.core().edges)
    out << "  v" << e.source << " -> v" << e.target << " [label=\""
        << s.ambient().name(e.gen) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace selfsim
