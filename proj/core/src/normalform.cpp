#include "tdtt/normalform.hpp"

#include "tdtt/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tdtt {

namespace {

// outermost occurrences of v in t (no descent into matches)
void outer_occurrences(Term t, Term v, Pos& cur, std::vector<Pos>& out) {
  if (t == v) {
    out.push_back(cur);
    return;
  }
  for (int i = 0; i < t.arity(); ++i) {
    cur.push_back(i + 1);
    outer_occurrences(t.child(i), v, cur, out);
    cur.pop_back();
  }
}

// maximal u with p' = u . p'' (p'' containing all variables); uc lattice.
// The suffix is the smallest subtree covering every variable whose outermost
// occurrences absorb all variable occurrences.
Term extract_prefix_uc(Term pprime) {
  std::vector<int> all = var_indices(pprime);
  std::vector<Term> cands;
  for (Term s : distinct_subtrees(pprime))
    if (var_indices(s) == all) cands.push_back(s);
  std::sort(cands.begin(), cands.end(),
            [](Term a, Term b) { return node_count(a) < node_count(b); });
  int marker = all.back() + 1;  // fresh: never collides with a real variable
  for (Term v : cands) {
    Pos cur;
    std::vector<Pos> occs;
    outer_occurrences(pprime, v, cur, occs);
    Term u = pprime;
    // occurrences are disjoint; replace deepest-first so positions stay valid
    for (auto it = occs.rbegin(); it != occs.rend(); ++it)
      u = replace_at(u, *it, Term::var(marker));
    if (var_indices(u) == std::vector<int>{marker})
      return subst_vars(u, {{marker, Term::var(1)}});
  }
  return Term::var(1);  // unreachable: v = pprime always succeeds
}

// maximal 1-pattern prefix: single hole at the longest common ancestor of all
// variable positions
Term extract_prefix_linear(Term pprime) {
  std::vector<Pos> ps;
  for (int j : var_indices(pprime))
    for (const Pos& p : var_positions(pprime, j)) ps.push_back(p);
  Pos lca = ps[0];
  for (const Pos& p : ps) {
    size_t k = 0;
    while (k < lca.size() && k < p.size() && lca[k] == p[k]) ++k;
    lca.resize(k);
  }
  return replace_at(pprime, lca, Term::var(1));
}

// the right-hand side [[T]]sigma of the prefix constraint of rule r
Pat rule_value(const AdviceTransducer& A, const Rule& r,
               const std::vector<Pat>& sigma, Mode mode) {
  bool bottom = false;
  Term pprime = subst_calls(r.rhs, [&](int qn, int j) {
    const Pat& s = sigma[A.state_id(interned_name(qn))];
    if (is_bottom(s)) {
      bottom = true;
      return Term::var(j);
    }
    if (is_ground(*s)) return *s;
    return subst_vars(*s, {{1, Term::var(j)}});  // sigma(q_j) . x_j
  });
  if (bottom) return std::nullopt;
  std::vector<int> vars = var_indices(pprime);
  if (vars.empty()) return pprime;
  if (vars.size() == 1) {
    if (vars[0] == 1) return pprime;
    return subst_vars(pprime, {{vars[0], Term::var(1)}});
  }
  return mode == Mode::uc ? extract_prefix_uc(pprime) : extract_prefix_linear(pprime);
}

}  // namespace

Term pattern_prefix(Term t, Mode mode) {
  if (var_indices(t).empty()) return t;
  return mode == Mode::uc ? extract_prefix_uc(t) : extract_prefix_linear(t);
}

PrefixSolution pref_fixpoint(const AdviceTransducer& A, Mode mode) {
  PrefixSolution sol{mode, std::vector<Pat>(A.states.size(), std::nullopt), 0};
  int bound = (int)A.states.size() * std::max(size(A), 1) + 1;
  for (bool changed = true; changed;) {
    changed = false;
    ++sol.iterations;
    if (sol.iterations > bound)
      throw std::logic_error("pref_fixpoint exceeded its iteration bound");
    std::vector<Pat> next(A.states.size(), std::nullopt);
    for (const Rule& r : A.rules) {
      std::vector<Pat> join{next[r.state], rule_value(A, r, sol.values, mode)};
      next[r.state] = mode == Mode::uc ? lub(join) : lub1(join);
    }
    if (next != sol.values) {
      changed = true;
      sol.values = std::move(next);
    }
  }
  return sol;
}

namespace {

bool is_constant(const Pat& p) { return !is_bottom(p) && is_ground(*p); }

}  // namespace

AdviceTransducer make_earliest(const AdviceTransducer& A, Mode mode) {
  PrefixSolution pref = pref_fixpoint(A, mode);
  AdviceTransducer E;
  E.advice = A.advice;
  E.output = A.output;
  E.name = A.name;
  std::vector<int> remap(A.states.size(), -1);
  for (size_t q = 0; q < A.states.size(); ++q)
    if (!is_constant(pref.values[q])) remap[q] = E.add_state(A.states[q], A.iota[q]);

  for (auto& [h, ax] : A.axioms) {
    E.axioms.emplace(h, subst_calls(ax, [&](int qn, int) {
                       int q = A.state_id(interned_name(qn));
                       Term s = *pref.values[q];
                       if (is_ground(s)) return s;
                       return subst_vars(s, {{1, Term::call(qn, 1)}});
                     }));
  }

  for (const Rule& r : A.rules) {
    if (remap[r.state] < 0) continue;
    Term u = *pref.values[r.state];
    Term w = subst_calls(r.rhs, [&](int qn, int j) {
      int qj = A.state_id(interned_name(qn));
      Term s = *pref.values[qj];
      if (is_ground(s)) return s;
      return subst_vars(s, {{1, Term::call(qn, (int)j)}});
    });
    auto t = strip_prefix(u, w);
    if (!t) throw std::logic_error("make_earliest: prefix does not factor");
    E.rules.push_back({remap[r.state], r.sym, r.child_advice, *t});
  }
  return E;
}

CanonicalResult canonicalize(const AdviceTransducer& A) {
  int n = (int)A.states.size();
  // Moore refinement: split by iota, then iterate rule signatures
  std::vector<int> block(n);
  for (int q = 0; q < n; ++q) block[q] = A.iota[q];
  // rules grouped per state, sorted deterministically
  std::vector<std::vector<const Rule*>> by_state(n);
  for (const Rule& r : A.rules) by_state[r.state].push_back(&r);
  for (auto& v : by_state)
    std::sort(v.begin(), v.end(), [](const Rule* a, const Rule* b) {
      return std::tie(a->sym, a->child_advice) < std::tie(b->sym, b->child_advice);
    });
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next(n);
    for (int q = 0; q < n; ++q) {
      std::vector<int> sig{block[q]};
      for (const Rule* r : by_state[q]) {
        sig.push_back(r->sym);
        sig.insert(sig.end(), r->child_advice.begin(), r->child_advice.end());
        sig.push_back((int)r->pattern().id());
        // successor blocks per call, in preorder
        for (const Pos& p : call_positions(r->rhs)) {
          Term c = subtree_at(r->rhs, p);
          sig.push_back(c.call_var());
          sig.push_back(block[A.state_id(c.call_state_name())]);
        }
        sig.push_back(-1);
      }
      auto [it, fresh] = sig_ids.emplace(std::move(sig), (int)sig_ids.size());
      next[q] = it->second;
    }
    if (next != block) {
      changed = true;
      block = std::move(next);
    }
  }

  // breadth-first discovery from the axioms over block representatives
  std::map<int, int> block_rep;
  for (int q = 0; q < n; ++q) block_rep.emplace(block[q], q);

  CanonicalResult res;
  res.transducer.advice = A.advice;
  res.transducer.output = A.output;
  res.transducer.name = A.name;
  res.pi.assign(n, -1);
  std::map<int, int> new_id;
  std::vector<int> queue;
  auto discover = [&](int q) {
    int rep = block_rep.at(block[q]);
    if (new_id.count(block[q])) return;
    new_id[block[q]] =
        res.transducer.add_state("q" + std::to_string(new_id.size()), A.iota[rep]);
    queue.push_back(rep);
  };
  for (auto& [h, ax] : A.axioms)
    for (const Pos& p : call_positions(ax))
      discover(A.state_id(subtree_at(ax, p).call_state_name()));
  for (size_t i = 0; i < queue.size(); ++i) {
    int rep = queue[i];
    for (const Rule* r : by_state[rep])
      for (const Pos& p : call_positions(r->rhs))
        discover(A.state_id(subtree_at(r->rhs, p).call_state_name()));
  }
  for (int q = 0; q < n; ++q)
    if (new_id.count(block[q])) res.pi[q] = new_id[block[q]];

  auto rename = [&](Term t) {
    return subst_calls(t, [&](int qn, int j) {
      int b = block[A.state_id(interned_name(qn))];
      return Term::call(res.transducer.states[new_id.at(b)], j);
    });
  };
  for (auto& [h, ax] : A.axioms) res.transducer.axioms.emplace(h, rename(ax));
  for (int rep : queue)
    for (const Rule* r : by_state[rep])
      res.transducer.rules.push_back(
          {res.pi[rep], r->sym, r->child_advice, rename(r->rhs)});
  return res;
}

AheadnessMap aheadness(const AdviceTransducer& A, Mode mode) {
  PrefixSolution pref = pref_fixpoint(A, mode);
  AdviceTransducer E = make_earliest(A, mode);
  CanonicalResult canon = canonicalize(E);
  AheadnessMap m;
  m.entries.resize(A.states.size());
  for (size_t q = 0; q < A.states.size(); ++q) {
    if (is_constant(pref.values[q])) {
      m.entries[q].constant = *pref.values[q];
      continue;
    }
    m.entries[q].prefix = *pref.values[q];
    int e = E.state_id(A.states[q]);
    m.entries[q].canonical_state = canon.pi[e];
  }
  m.canonical = std::move(canon.transducer);
  return m;
}

namespace {

// lift A over the product advice: states <q, other-component>
AdviceTransducer lift(const AdviceTransducer& A, const TreeAutomaton& prod,
                      const std::vector<std::pair<int, int>>& pairs, bool first) {
  auto mine = [&](int ps) { return first ? pairs[ps].first : pairs[ps].second; };
  AdviceTransducer L;
  L.advice = prod;
  L.output = A.output;
  L.name = A.name;
  std::map<std::pair<int, int>, int> id;  // (q, product state) -> lifted state
  for (int q = 0; q < (int)A.states.size(); ++q)
    for (int ps = 0; ps < (int)prod.states.size(); ++ps)
      if (mine(ps) == A.iota[q])
        id[{q, ps}] =
            L.add_state(A.states[q] + "@" + prod.states[ps], ps);
  for (int h : prod.accepting) {
    Term ax = A.axioms.at(first ? pairs[h].first : pairs[h].second);
    L.axioms.emplace(h, subst_calls(ax, [&](int qn, int j) {
                       int q = A.state_id(interned_name(qn));
                       return Term::call(L.states[id.at({q, h})], j);
                     }));
  }
  for (auto& [key, lq] : id) {
    auto [q, ps] = key;
    for (const Transition& tr : prod.transitions) {
      if (tr.target != ps) continue;
      // the A-rule on the projected transition
      for (const Rule& r : A.rules) {
        if (r.state != q || r.sym != tr.sym) continue;
        bool match = true;
        for (size_t j = 0; j < tr.children.size() && match; ++j)
          match = mine(tr.children[j]) == r.child_advice[j];
        if (!match) continue;
        Term rhs = subst_calls(r.rhs, [&](int qn, int j) {
          int qj = A.state_id(interned_name(qn));
          return Term::call(L.states[id.at({qj, tr.children[j - 1]})], j);
        });
        L.rules.push_back({lq, tr.sym, tr.children, rhs});
        break;
      }
    }
  }
  return L;
}

bool same_rules(const AdviceTransducer& X, const AdviceTransducer& Y) {
  if (X.states.size() != Y.states.size() || X.iota != Y.iota) return false;
  if (X.axioms != Y.axioms) return false;
  auto key = [](const AdviceTransducer& T) {
    std::set<std::tuple<int, int, std::vector<int>, uint32_t>> s;
    for (const Rule& r : T.rules)
      s.insert({r.state, r.sym, r.child_advice, r.rhs.id()});
    return s;
  };
  return key(X) == key(Y);
}

}  // namespace

EquivResult equivalent(const AdviceTransducer& A1, const AdviceTransducer& A2,
                       Mode mode) {
  EquivResult res;
  std::optional<bool> lang = language_equal(A1.advice, A2.advice);
  if (!lang.has_value()) {
    // budget exhausted: fall back to bounded-depth language comparison
    res.exact = false;
    res.confidence_depth = 4;
    lang = true;
    for (Term t : enumerate_trees(A1.advice.alphabet, res.confidence_depth))
      if (accepts(A1.advice, t) != accepts(A2.advice, t)) {
        lang = false;
        res.witness = t;
        break;
      }
  }
  if (!*lang) {
    res.equivalent = false;
    for (int d = 1; d <= 5 && !res.witness; ++d)
      for (Term t : enumerate_trees(A1.advice.alphabet, d)) {
        if (accepts(A1.advice, t) != accepts(A2.advice, t)) {
          res.witness = t;
          break;
        }
      }
    return res;
  }

  std::vector<std::pair<int, int>> pairs;
  TreeAutomaton prod = product(A1.advice, A2.advice, &pairs);
  AdviceTransducer L1 = lift(A1, prod, pairs, true);
  AdviceTransducer L2 = lift(A2, prod, pairs, false);
  AdviceTransducer C1 = canonicalize(make_earliest(L1, mode)).transducer;
  AdviceTransducer C2 = canonicalize(make_earliest(L2, mode)).transducer;
  res.equivalent = same_rules(C1, C2);
  if (!res.equivalent)
    for (int d = 1; d <= 4 && !res.witness; ++d) res.witness = oracle_equiv(A1, A2, d);
  return res;
}

}  // namespace tdtt
