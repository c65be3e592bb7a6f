#include "selfsim/machine.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace selfsim {

Machine::Machine(Alphabet states, Alphabet letters, std::vector<int> next,
                 std::vector<int> out)
    : states_(std::move(states)),
      letters_(std::move(letters)),
      next_(std::move(next)),
      out_(std::move(out)) {
  const int n = states_.size(), k = letters_.size();
  if (n == 0 || k == 0) throw InputError("machine needs at least one state and letter");
  if (next_.size() != static_cast<std::size_t>(n) * k ||
      out_.size() != static_cast<std::size_t>(n) * k)
    throw InputError("machine transition tables have the wrong size");
  for (int v : next_)
    if (v < 0 || v >= n) throw InputError("machine next-state out of range");
  for (int v : out_)
    if (v < 0 || v >= k) throw InputError("machine output letter out of range");

  invertible_ = true;
  out_inv_.assign(static_cast<std::size_t>(n) * k, -1);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < k; ++a) {
      int b = this->out(s, a);
      if (out_inv_[static_cast<std::size_t>(s) * k + b] != -1) invertible_ = false;
      out_inv_[static_cast<std::size_t>(s) * k + b] = a;
    }
  }
  if (!invertible_) out_inv_.clear();
}

int Machine::out_inverse(int state, int letter) const {
  if (!invertible_) throw InputError("machine is not invertible");
  return out_inv_[static_cast<std::size_t>(state) * num_letters() + letter];
}

int Machine::letter_image(const Word& w, int letter) const {
  int at = letter;
  for (const SignedGen& g : w.letters())
    at = g.sign > 0 ? out(g.index, at) : out_inverse(g.index, at);
  return at;
}

Word Machine::section(const Word& w, int letter) const {
  std::vector<SignedGen> section_letters;
  section_letters.reserve(w.letters().size());
  int at = letter;
  for (const SignedGen& g : w.letters()) {
    if (g.sign > 0) {
      section_letters.emplace_back(next(g.index, at), 1);
      at = out(g.index, at);
    } else {
      int b = out_inverse(g.index, at);
      section_letters.emplace_back(next(g.index, b), -1);
      at = b;
    }
  }
  return Word(states_, section_letters);
}

std::vector<int> Machine::letter_permutation(const Word& w) const {
  std::vector<int> images(num_letters());
  for (int a = 0; a < num_letters(); ++a) images[a] = letter_image(w, a);
  return images;
}

namespace {

bool is_identity_perm(const std::vector<int>& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) return false;
  return true;
}

}  // namespace

ValidationReport validate(const Machine& m) {
  ValidationReport r;
  r.invertible = m.invertible();
  const int n = m.num_states(), k = m.num_letters();

  // Reversible: no two distinct transitions share (input letter, target).
  r.reversible = true;
  for (int a = 0; a < k && r.reversible; ++a) {
    std::vector<char> hit(n, 0);
    for (int s = 0; s < n; ++s) {
      int t = m.next(s, a);
      if (hit[t]) {
        r.reversible = false;
        break;
      }
      hit[t] = 1;
    }
  }
  // Bireversible: additionally no two share (output letter, target).
  r.bireversible = r.reversible;
  if (r.bireversible) {
    std::set<std::pair<int, int>> seen;
    for (int s = 0; s < n && r.bireversible; ++s)
      for (int a = 0; a < k; ++a)
        if (!seen.emplace(m.out(s, a), m.next(s, a)).second) {
          r.bireversible = false;
          break;
        }
  }

  if (m.invertible()) {
    auto [reduced, classes] = reduce_machine(m);
    r.reduced = reduced.num_states() == n;
  }

  for (int s = 0; s < n && !r.sink_state; ++s) {
    bool sink = true;
    for (int a = 0; a < k; ++a)
      if (m.next(s, a) != s || m.out(s, a) != a) {
        sink = false;
        break;
      }
    if (sink) r.sink_state = s;
  }
  if (r.sink_state) {
    // Reachability of the sink in the next-state graph, from every state.
    std::vector<char> reaches(n, 0);
    reaches[*r.sink_state] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int s = 0; s < n; ++s) {
        if (reaches[s]) continue;
        for (int a = 0; a < k; ++a)
          if (reaches[m.next(s, a)]) {
            reaches[s] = 1;
            grew = true;
            break;
          }
      }
    }
    r.sink_coaccessible =
        std::all_of(reaches.begin(), reaches.end(), [](char c) { return c != 0; });
  }
  return r;
}

Machine dual(const Machine& m) {
  const int n = m.num_states(), k = m.num_letters();
  std::vector<int> next(static_cast<std::size_t>(k) * n);
  std::vector<int> out(static_cast<std::size_t>(k) * n);
  for (int a = 0; a < k; ++a) {
    for (int s = 0; s < n; ++s) {
      next[static_cast<std::size_t>(a) * n + s] = m.out(s, a);
      out[static_cast<std::size_t>(a) * n + s] = m.next(s, a);
    }
  }
  return Machine(m.letters(), m.states(), std::move(next), std::move(out));
}

Machine inverse_machine(const Machine& m) {
  if (!m.invertible()) throw InputError("inverse_machine: machine is not invertible");
  const int n = m.num_states(), k = m.num_letters();
  std::vector<std::string> names;
  for (const std::string& s : m.states().symbols()) {
    if (s.size() > 3 && s.substr(s.size() - 3) == "^-1")
      names.push_back(s.substr(0, s.size() - 3));
    else
      names.push_back(s + "^-1");
  }
  std::vector<int> next(static_cast<std::size_t>(n) * k);
  std::vector<int> out(static_cast<std::size_t>(n) * k);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < k; ++a) {
      int b = m.out_inverse(s, a);
      next[static_cast<std::size_t>(s) * k + a] = m.next(s, b);
      out[static_cast<std::size_t>(s) * k + a] = b;
    }
  }
  return Machine(Alphabet(names), m.letters(), std::move(next), std::move(out));
}

std::pair<Machine, std::vector<int>> reduce_machine(const Machine& m) {
  if (!m.invertible()) throw InputError("reduce_machine: machine is not invertible");
  const int n = m.num_states(), k = m.num_letters();

  // Seed classes with the first-level permutation, then refine by the classes
  // of the sections until stable.
  std::vector<int> cls(n);
  {
    std::map<std::vector<int>, int> by_perm;
    for (int s = 0; s < n; ++s) {
      std::vector<int> row(k);
      for (int a = 0; a < k; ++a) row[a] = m.out(s, a);
      auto [it, inserted] = by_perm.emplace(row, static_cast<int>(by_perm.size()));
      cls[s] = it->second;
    }
  }
  while (true) {
    std::map<std::vector<int>, int> by_sig;
    std::vector<int> refined(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig{cls[s]};
      for (int a = 0; a < k; ++a) sig.push_back(cls[m.next(s, a)]);
      auto [it, inserted] = by_sig.emplace(sig, static_cast<int>(by_sig.size()));
      refined[s] = it->second;
    }
    bool stable = true;
    for (int s = 0; s < n; ++s)
      if (refined[s] != cls[s]) stable = false;
    cls = refined;
    if (stable) break;
  }

  // Renumber classes by first representative and build the quotient.
  std::map<int, int> renum;
  std::vector<int> rep;
  for (int s = 0; s < n; ++s) {
    if (renum.emplace(cls[s], static_cast<int>(renum.size())).second)
      rep.push_back(s);
  }
  for (int s = 0; s < n; ++s) cls[s] = renum.at(cls[s]);
  const int q = static_cast<int>(rep.size());
  std::vector<std::string> names;
  for (int c = 0; c < q; ++c) names.push_back(m.states().name(rep[c]));
  std::vector<int> next(static_cast<std::size_t>(q) * k);
  std::vector<int> out(static_cast<std::size_t>(q) * k);
  for (int c = 0; c < q; ++c) {
    for (int a = 0; a < k; ++a) {
      next[static_cast<std::size_t>(c) * k + a] = cls[m.next(rep[c], a)];
      out[static_cast<std::size_t>(c) * k + a] = m.out(rep[c], a);
    }
  }
  return {Machine(Alphabet(names), m.letters(), std::move(next), std::move(out)), cls};
}

bool machines_equal(const Machine& a, const Machine& b) {
  if (!(a.states() == b.states()) || !(a.letters() == b.letters())) return false;
  for (int s = 0; s < a.num_states(); ++s)
    for (int l = 0; l < a.num_letters(); ++l)
      if (a.next(s, l) != b.next(s, l) || a.out(s, l) != b.out(s, l)) return false;
  return true;
}

WordOracle::WordOracle(const Machine& m) : machine_(&m) {
  if (!m.invertible()) throw InputError("word oracle requires an invertible machine");
}

namespace {

Word canonical_key(const Word& w) {
  Word inv = invert(w);
  return inv < w ? inv : w;
}

}  // namespace

bool WordOracle::is_identity(const Word& w) {
  if (!(w.alphabet() == machine_->states()))
    throw InputError("is_identity: word is not over the machine's states");
  Word key = canonical_key(w);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const int k = machine_->num_letters();
  std::set<Word> visited{w};
  std::deque<Word> queue{w};
  std::vector<Word> members;
  bool trivial = true;
  while (!queue.empty() && trivial) {
    Word u = queue.front();
    queue.pop_front();
    if (auto it = cache_.find(canonical_key(u)); it != cache_.end()) {
      if (it->second) continue;  // known trivial: sections cannot refute
      trivial = false;
      break;
    }
    members.push_back(u);
    if (!is_identity_perm(machine_->letter_permutation(u))) {
      cache_[canonical_key(u)] = false;
      trivial = false;
      break;
    }
    for (int a = 0; a < k; ++a) {
      Word s = machine_->section(u, a);
      if (visited.insert(s).second) queue.push_back(s);
    }
  }
  if (trivial) {
    // Sections of a trivial element are trivial, so the whole closure is.
    for (const Word& u : members) cache_[canonical_key(u)] = true;
  }
  cache_[key] = trivial;
  return trivial;
}

bool WordOracle::equal(const Word& u, const Word& v) {
  return is_identity(concat(u, invert(v)));
}

bool is_identity(const Machine& m, const Word& w) {
  WordOracle oracle(m);
  return oracle.is_identity(w);
}

Machine machine_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("machine file is not valid JSON: ") + e.what());
  }
  if (!j.contains("states") || !j.contains("letters") || !j.contains("transitions"))
    throw InputError("machine file needs \"states\", \"letters\" and \"transitions\"");
  Alphabet states(j.at("states").get<std::vector<std::string>>());
  Alphabet letters(j.at("letters").get<std::vector<std::string>>());
  const int n = states.size(), k = letters.size();
  std::vector<int> next(static_cast<std::size_t>(n) * k, -1);
  std::vector<int> out(static_cast<std::size_t>(n) * k, -1);
  for (const auto& t : j.at("transitions")) {
    int s = states.index_checked(t.at("state").get<std::string>());
    int a = letters.index_checked(t.at("letter").get<std::string>());
    if (next[static_cast<std::size_t>(s) * k + a] != -1)
      throw InputError("duplicate transition for state " + states.name(s) +
                       ", letter " + letters.name(a));
    next[static_cast<std::size_t>(s) * k + a] =
        states.index_checked(t.at("next").get<std::string>());
    out[static_cast<std::size_t>(s) * k + a] =
        letters.index_checked(t.at("out").get<std::string>());
  }
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < k; ++a)
      if (next[static_cast<std::size_t>(s) * k + a] == -1)
        throw InputError("missing transition for state " + states.name(s) +
                         ", letter " + letters.name(a));
  return Machine(states, letters, std::move(next), std::move(out));
}

std::string machine_to_json_text(const Machine& m) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["states"] = m.states().symbols();
  j["letters"] = m.letters().symbols();
  auto& ts = j["transitions"] = nlohmann::ordered_json::array();
  for (int s = 0; s < m.num_states(); ++s) {
    for (int a = 0; a < m.num_letters(); ++a) {
      nlohmann::ordered_json t;
      t["state"] = m.states().name(s);
      t["letter"] = m.letters().name(a);
      t["next"] = m.states().name(m.next(s, a));
      t["out"] = m.letters().name(m.out(s, a));
      ts.push_back(t);
    }
  }
  return j.dump(2) + "\n";
}

Machine load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open machine file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return machine_from_json_text(buf.str());
}

std::string machine_to_dot(const Machine& m, const std::string& name) {
  std::ostringstream outs;
  outs << "digraph " << name << " {\n  rankdir=LR;\n";
  for (int s = 0; s < m.num_states(); ++s)
    outs << "  s" << s << " [label=\"" << m.states().name(s) << "\", shape=circle];\n";
  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.num_letters(); ++a)
      outs << "  s" << s << " -> s" << m.next(s, a) << " [label=\""
           << m.letters().name(a) << "|" << m.letters().name(m.out(s, a)) << "\"];\n";
  outs << "}\n";
  return outs.str();
}

}  // namespace selfsim
