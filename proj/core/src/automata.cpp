#include "tdtt/automata.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <unordered_map>

namespace tdtt {

int TreeAutomaton::state_id(std::string_view s) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i] == s) return (int)i;
  throw automaton_error("unknown state: " + std::string(s));
}

int TreeAutomaton::add_state(const std::string& s) {
  states.push_back(s);
  return (int)states.size() - 1;
}

void TreeAutomaton::check() const {
  alphabet.check();
  std::set<std::string> seen;
  for (auto& s : states)
    if (!seen.insert(s).second) throw automaton_error("duplicate state name: " + s);
  for (int h : accepting)
    if (h < 0 || h >= (int)states.size()) throw automaton_error("accepting state out of range");
  for (const auto& tr : transitions) {
    if (tr.target < 0 || tr.target >= (int)states.size())
      throw automaton_error("transition target out of range");
    auto rk = alphabet.rank_of(interned_name(tr.sym));
    if (!rk) throw automaton_error("unknown symbol in transition: " + interned_name(tr.sym));
    if ((int)tr.children.size() != *rk)
      throw automaton_error("transition arity mismatch for " + interned_name(tr.sym));
    for (int c : tr.children)
      if (c < 0 || c >= (int)states.size())
        throw automaton_error("transition child out of range");
  }
}

namespace {

std::vector<bool> inhabited_states(const TreeAutomaton& B) {
  std::vector<bool> inh(B.states.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& tr : B.transitions) {
      if (inh[tr.target]) continue;
      bool ok = true;
      for (int c : tr.children)
        if (!inh[c]) { ok = false; break; }
      if (ok) { inh[tr.target] = true; changed = true; }
    }
  }
  return inh;
}

}  // namespace

TreeAutomaton trim(const TreeAutomaton& B) {
  B.check();
  std::vector<bool> inh = inhabited_states(B);
  // co-reachable: top-down from accepting states, through transitions whose
  // other children are inhabited
  std::vector<bool> co(B.states.size(), false);
  for (int h : B.accepting)
    if (inh[h]) co[h] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& tr : B.transitions) {
      if (!co[tr.target]) continue;
      bool all_inh = true;
      for (int c : tr.children)
        if (!inh[c]) { all_inh = false; break; }
      if (!all_inh) continue;
      for (int c : tr.children)
        if (!co[c]) { co[c] = true; changed = true; }
    }
  }
  std::vector<int> remap(B.states.size(), -1);
  TreeAutomaton out;
  out.alphabet = B.alphabet;
  out.name = B.name;
  for (size_t i = 0; i < B.states.size(); ++i)
    if (inh[i] && co[i]) remap[i] = out.add_state(B.states[i]);
  for (int h : B.accepting)
    if (remap[h] >= 0) out.accepting.insert(remap[h]);
  if (out.accepting.empty()) throw automaton_error("empty language");
  for (const auto& tr : B.transitions) {
    if (remap[tr.target] < 0) continue;
    bool ok = true;
    std::vector<int> kids;
    for (int c : tr.children) {
      if (remap[c] < 0) { ok = false; break; }
      kids.push_back(remap[c]);
    }
    if (ok) out.transitions.push_back({remap[tr.target], tr.sym, kids});
  }
  std::sort(out.transitions.begin(), out.transitions.end());
  out.transitions.erase(std::unique(out.transitions.begin(), out.transitions.end()),
                        out.transitions.end());
  return out;
}

bool is_trim(const TreeAutomaton& B) {
  try {
    TreeAutomaton t = trim(B);
    return t.states.size() == B.states.size() &&
           t.transitions.size() == B.transitions.size();
  } catch (const automaton_error&) {
    return false;
  }
}

std::set<std::pair<int, int>> joint_inhabited(const TreeAutomaton& B1,
                                              const TreeAutomaton& B2) {
  std::set<std::pair<int, int>> joint;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& t1 : B1.transitions)
      for (const auto& t2 : B2.transitions) {
        if (t1.sym != t2.sym) continue;
        std::pair<int, int> p{t1.target, t2.target};
        if (joint.count(p)) continue;
        bool ok = true;
        for (size_t i = 0; i < t1.children.size(); ++i)
          if (!joint.count({t1.children[i], t2.children[i]})) { ok = false; break; }
        if (ok) { joint.insert(p); changed = true; }
      }
  }
  return joint;
}

Classification classify(const TreeAutomaton& B) {
  Classification c;
  // bottom-up: at most one target per (symbol, child tuple)
  std::map<std::pair<int, std::vector<int>>, std::set<int>> by_src;
  for (const auto& tr : B.transitions) by_src[{tr.sym, tr.children}].insert(tr.target);
  c.bottom_up_deterministic =
      std::all_of(by_src.begin(), by_src.end(), [](auto& kv) { return kv.second.size() == 1; });
  // top-down: single accepting state, at most one child tuple per (state, symbol)
  std::map<std::pair<int, int>, int> by_head;
  bool td = B.accepting.size() == 1;
  for (const auto& tr : B.transitions) {
    auto [it, fresh] = by_head.emplace(std::make_pair(tr.target, tr.sym), 1);
    if (!fresh) td = false;
  }
  c.top_down_deterministic = td;
  if (c.bottom_up_deterministic || c.top_down_deterministic) {
    c.unambiguous = true;
    return c;
  }
  // two-run product search: a pair is ambiguous if two distinct joint
  // computations exist for a common tree
  auto joint = joint_inhabited(B, B);
  std::set<std::pair<int, int>> amb;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& t1 : B.transitions)
      for (const auto& t2 : B.transitions) {
        if (t1.sym != t2.sym) continue;
        std::pair<int, int> p{t1.target, t2.target};
        if (amb.count(p)) continue;
        bool joint_kids = true, some_amb = false;
        for (size_t i = 0; i < t1.children.size(); ++i) {
          std::pair<int, int> kp{t1.children[i], t2.children[i]};
          if (!joint.count(kp)) { joint_kids = false; break; }
          if (amb.count(kp)) some_amb = true;
        }
        if (!joint_kids) continue;
        if (!(t1 == t2) || some_amb) { amb.insert(p); changed = true; }
      }
  }
  c.unambiguous = true;
  for (int f1 : B.accepting)
    for (int f2 : B.accepting) {
      if (f1 != f2 && joint.count({f1, f2})) c.unambiguous = false;
      if (amb.count({f1, f2})) c.unambiguous = false;
    }
  return c;
}

std::set<int> run(const TreeAutomaton& B, Term t) {
  if (!is_ground(t)) throw automaton_error("run: input not ground");
  // memoized bottom-up state-set evaluation over the term dag
  std::unordered_map<uint32_t, std::set<int>> memo;
  std::function<std::set<int>(Term)> go = [&](Term u) -> std::set<int> {
    auto it = memo.find(u.id());
    if (it != memo.end()) return it->second;
    std::vector<std::set<int>> kid_states;
    for (int i = 0; i < u.arity(); ++i) kid_states.push_back(go(u.child(i)));
    std::set<int> out;
    for (const auto& tr : B.transitions) {
      if (tr.sym != u.sym_id() || (int)tr.children.size() != u.arity()) continue;
      bool ok = true;
      for (int i = 0; i < u.arity(); ++i)
        if (!kid_states[i].count(tr.children[i])) { ok = false; break; }
      if (ok) out.insert(tr.target);
    }
    memo.emplace(u.id(), out);
    return out;
  };
  return go(t);
}

bool accepts(const TreeAutomaton& B, Term t) {
  auto r = run(B, t);
  for (int h : B.accepting)
    if (r.count(h)) return true;
  return false;
}

std::set<std::pair<int, int>> run_context(const TreeAutomaton& B, Term c) {
  if (hole_count(c) != 1 || contains_call(c))
    throw automaton_error("run_context: input is not a context");
  std::function<std::set<std::pair<int, int>>(Term)> go =
      [&](Term u) -> std::set<std::pair<int, int>> {
    std::set<std::pair<int, int>> out;
    if (u.kind() == Kind::Var) {
      for (size_t h = 0; h < B.states.size(); ++h) out.insert({(int)h, (int)h});
      return out;
    }
    int hole_child = -1;
    for (int i = 0; i < u.arity(); ++i)
      if (hole_count(u.child(i)) == 1) hole_child = i;
    auto inner = go(u.child(hole_child));
    std::vector<std::set<int>> kid_states(u.arity());
    for (int i = 0; i < u.arity(); ++i)
      if (i != hole_child) kid_states[i] = run(B, u.child(i));
    for (const auto& tr : B.transitions) {
      if (tr.sym != u.sym_id() || (int)tr.children.size() != u.arity()) continue;
      bool ok = true;
      for (int i = 0; i < u.arity(); ++i)
        if (i != hole_child && !kid_states[i].count(tr.children[i])) { ok = false; break; }
      if (!ok) continue;
      for (auto& [hi, hp] : inner)
        if (hi == tr.children[hole_child]) out.insert({tr.target, hp});
    }
    return out;
  };
  return go(c);
}

SubsetAutomaton powerset_topdown(const TreeAutomaton& B) {
  if (!classify(B).bottom_up_deterministic)
    throw automaton_error("powerset_topdown: automaton is not bottom-up deterministic");
  SubsetAutomaton out;
  out.base = B;

  auto subset_name = [&](const std::vector<int>& S) {
    std::string n = "<";
    for (size_t i = 0; i < S.size(); ++i) {
      if (i) n += ",";
      n += B.states[S[i]];
    }
    return n + ">";
  };

  TreeAutomaton& T = out.automaton;
  T.alphabet = B.alphabet;
  T.name = B.name + "_top";
  std::map<std::vector<int>, int> index;
  std::queue<std::vector<int>> work;
  std::vector<int> F(B.accepting.begin(), B.accepting.end());
  index[F] = T.add_state(subset_name(F));
  out.subsets.push_back(F);
  T.accepting.insert(0);
  work.push(F);
  while (!work.empty()) {
    std::vector<int> S = work.front();
    work.pop();
    int sid = index[S];
    for (const auto& sym : B.alphabet.symbols) {
      int f = intern(sym.name);
      int k = sym.rank;
      // S_j = { h_j | exists h in S and a transition <h,f,h_1..h_k> }
      std::vector<std::set<int>> Sj(k);
      bool any = false;
      for (const auto& tr : B.transitions) {
        if (tr.sym != f) continue;
        if (std::find(S.begin(), S.end(), tr.target) == S.end()) continue;
        any = true;
        for (int j = 0; j < k; ++j) Sj[j].insert(tr.children[j]);
      }
      if (!any) continue;
      std::vector<int> kids;
      for (int j = 0; j < k; ++j) {
        std::vector<int> sj(Sj[j].begin(), Sj[j].end());
        auto it = index.find(sj);
        if (it == index.end()) {
          int id = T.add_state(subset_name(sj));
          index[sj] = id;
          out.subsets.push_back(sj);
          work.push(sj);
          kids.push_back(id);
        } else {
          kids.push_back(it->second);
        }
      }
      T.transitions.push_back({sid, f, kids});
    }
  }
  // reachable-by-construction; trim for inhabitation (k=0 always inhabited
  // when some leaf transition applies, so this is usually the identity)
  TreeAutomaton trimmed = trim(T);
  // rebuild subset bookkeeping after trim
  std::vector<std::vector<int>> subs;
  for (const auto& s : trimmed.states) {
    for (size_t i = 0; i < T.states.size(); ++i)
      if (T.states[i] == s) subs.push_back(out.subsets[i]);
  }
  out.automaton = trimmed;
  out.subsets = subs;
  return out;
}

bool gate_equivalent(const TreeAutomaton& B, const SubsetAutomaton& Btop) {
  for (const auto& tr : Btop.automaton.transitions) {
    const auto& S = Btop.subsets[tr.target];
    int k = (int)tr.children.size();
    // enumerate S_1 x ... x S_k
    std::vector<int> idx(k, 0);
    while (true) {
      std::vector<int> tuple(k);
      for (int j = 0; j < k; ++j) tuple[j] = Btop.subsets[tr.children[j]][idx[j]];
      bool covered = false;
      for (const auto& btr : B.transitions) {
        if (btr.sym != tr.sym || btr.children != tuple) continue;
        if (std::find(S.begin(), S.end(), btr.target) != S.end()) { covered = true; break; }
      }
      if (!covered) return false;
      int j = k - 1;
      while (j >= 0 && ++idx[j] == (int)Btop.subsets[tr.children[j]].size()) idx[j--] = 0;
      if (j < 0) break;
      if (k == 0) break;
    }
    if (k == 0) continue;
  }
  return true;
}

TreeAutomaton product(const TreeAutomaton& B1, const TreeAutomaton& B2,
                      std::vector<std::pair<int, int>>* pair_states) {
  auto joint = joint_inhabited(B1, B2);
  TreeAutomaton P;
  P.alphabet = B1.alphabet;
  P.name = B1.name + "x" + B2.name;
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> pairs;
  for (auto& pr : joint) {
    index[pr] = P.add_state(B1.states[pr.first] + "*" + B2.states[pr.second]);
    pairs.push_back(pr);
  }
  for (int f1 : B1.accepting)
    for (int f2 : B2.accepting)
      if (index.count({f1, f2})) P.accepting.insert(index[{f1, f2}]);
  for (const auto& t1 : B1.transitions)
    for (const auto& t2 : B2.transitions) {
      if (t1.sym != t2.sym) continue;
      if (!index.count({t1.target, t2.target})) continue;
      std::vector<int> kids;
      bool ok = true;
      for (size_t i = 0; i < t1.children.size(); ++i) {
        auto it = index.find({t1.children[i], t2.children[i]});
        if (it == index.end()) { ok = false; break; }
        kids.push_back(it->second);
      }
      if (ok) P.transitions.push_back({index[{t1.target, t2.target}], t1.sym, kids});
    }
  if (P.accepting.empty()) throw automaton_error("empty language");
  TreeAutomaton trimmed = trim(P);
  if (pair_states) {
    pair_states->clear();
    for (const auto& s : trimmed.states)
      for (size_t i = 0; i < P.states.size(); ++i)
        if (P.states[i] == s) pair_states->push_back(pairs[i]);
  }
  return trimmed;
}

namespace {

// complete bottom-up subset determinization (subsets incl. empty as sink)
struct Dfta {
  std::vector<std::vector<int>> states;          // sorted subsets
  std::map<std::vector<int>, int> index;
  std::map<std::pair<int, std::vector<int>>, int> delta;  // (sym, kids) -> target
  std::set<int> accepting;
};

std::optional<Dfta> determinize(const TreeAutomaton& B, int budget) {
  Dfta d;
  auto get = [&](const std::vector<int>& s) -> int {
    auto it = d.index.find(s);
    if (it != d.index.end()) return it->second;
    int id = (int)d.states.size();
    d.states.push_back(s);
    d.index[s] = id;
    bool acc = false;
    for (int h : s)
      if (B.accepting.count(h)) acc = true;
    if (acc) d.accepting.insert(id);
    return id;
  };
  // fixpoint: start from leaf symbols, build all reachable subset states
  bool changed = true;
  std::vector<int> known;  // ids in discovery order
  while (changed) {
    changed = false;
    for (const auto& sym : B.alphabet.symbols) {
      int f = intern(sym.name);
      int k = sym.rank;
      size_t n = d.states.size();
      // iterate over all k-tuples of existing subset states
      std::vector<size_t> idx(k, 0);
      if (k > 0 && n == 0) continue;
      while (true) {
        std::vector<int> kid_ids(k);
        for (int j = 0; j < k; ++j) kid_ids[j] = (int)idx[j];
        auto key = std::make_pair(f, kid_ids);
        if (!d.delta.count(key)) {
          std::set<int> tgt;
          for (const auto& tr : B.transitions) {
            if (tr.sym != f) continue;
            bool ok = true;
            for (int j = 0; j < k; ++j) {
              const auto& sub = d.states[kid_ids[j]];
              if (std::find(sub.begin(), sub.end(), tr.children[j]) == sub.end()) {
                ok = false;
                break;
              }
            }
            if (ok) tgt.insert(tr.target);
          }
          std::vector<int> tv(tgt.begin(), tgt.end());
          size_t before = d.states.size();
          int t = get(tv);
          d.delta[key] = t;
          if (d.states.size() != before) changed = true;
          if ((int)d.states.size() > budget) return std::nullopt;
        }
        if (k == 0) break;
        int j = k - 1;
        while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
        if (j < 0) break;
      }
    }
  }
  (void)known;
  return d;
}

}  // namespace

std::optional<bool> language_equal(const TreeAutomaton& B1, const TreeAutomaton& B2,
                                   int state_budget) {
  auto d1 = determinize(B1, state_budget);
  auto d2 = determinize(B2, state_budget);
  if (!d1 || !d2) return std::nullopt;
  // product reachability over the two complete DFTAs; a reachable pair with
  // acceptance xor acceptance witnesses inequality
  std::map<std::pair<int, int>, bool> seen;
  bool changed = true;
  // pairs arise from tuples of already-seen pairs per symbol
  std::vector<std::pair<int, int>> frontier;
  while (changed) {
    changed = false;
    for (const auto& sym : B1.alphabet.symbols) {
      int f = intern(sym.name);
      int k = sym.rank;
      std::vector<std::pair<int, int>> cur(seen.size());
      {
        size_t i = 0;
        for (auto& kv : seen) cur[i++] = kv.first;
      }
      if (k > 0 && cur.empty()) continue;
      std::vector<size_t> idx(k, 0);
      while (true) {
        std::vector<int> k1(k), k2(k);
        for (int j = 0; j < k; ++j) {
          k1[j] = cur[idx[j]].first;
          k2[j] = cur[idx[j]].second;
        }
        auto i1 = d1->delta.find({f, k1});
        auto i2 = d2->delta.find({f, k2});
        if (i1 != d1->delta.end() && i2 != d2->delta.end()) {
          std::pair<int, int> p{i1->second, i2->second};
          if (!seen.count(p)) {
            if (d1->accepting.count(p.first) != d2->accepting.count(p.second)) return false;
            seen[p] = true;
            changed = true;
          }
        }
        if (k == 0) break;
        int j = k - 1;
        while (j >= 0 && ++idx[j] == cur.size()) idx[j--] = 0;
        if (j < 0) break;
      }
    }
  }
  return true;
}

std::set<int> universal_states(const TreeAutomaton& B) {
  // greatest fixpoint: h stays universal while for every symbol f there is a
  // transition <h,f,h_1..h_k> with all h_i universal
  std::set<int> uni;
  for (size_t i = 0; i < B.states.size(); ++i) uni.insert((int)i);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = uni.begin(); it != uni.end();) {
      int h = *it;
      bool ok = true;
      for (const auto& sym : B.alphabet.symbols) {
        int f = intern(sym.name);
        bool found = false;
        for (const auto& tr : B.transitions) {
          if (tr.target != h || tr.sym != f) continue;
          bool kids_ok = true;
          for (int c : tr.children)
            if (!uni.count(c)) { kids_ok = false; break; }
          if (kids_ok) { found = true; break; }
        }
        if (!found) { ok = false; break; }
      }
      if (!ok) {
        it = uni.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return uni;
}

}  // namespace tdtt
