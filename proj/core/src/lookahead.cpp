#include "tdtt/lookahead.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace tdtt {

namespace {

// Reversible call <-> nullary-marker translation, so that the pattern
// machinery (which only knows ground terms and x1) applies to retained
// outputs of the form u.q(x1).
struct CallMarker {
  std::map<int, std::pair<int, int>> back;  // marker symbol -> (state, var)

  Term mark(Term t) {
    return subst_calls(t, [&](int q, int j) {
      int m = intern("@" + interned_name(q) + "#" + std::to_string(j));
      back[m] = {q, j};
      return Term::sym(m, {});
    });
  }

  Term unmark(Term t) {
    std::unordered_map<uint32_t, Term> memo;
    auto go = [&](auto&& self, Term u) -> Term {
      if (u.kind() != Kind::Sym) return u;
      auto it = back.find(u.sym_id());
      if (it != back.end()) return Term::call(it->second.first, it->second.second);
      auto m = memo.find(u.id());
      if (m != memo.end()) return m->second;
      std::vector<Term> kids;
      kids.reserve(u.arity());
      for (int i = 0; i < u.arity(); ++i) kids.push_back(self(self, u.child(i)));
      Term r = Term::sym(u.sym_id(), kids);
      memo.emplace(u.id(), r);
      return r;
    };
    return go(go, t);
  }
};

// distinct variable indices of the Call leaves of t, dag-cached
const std::set<int>& call_vars_of(Term t) {
  static std::unordered_map<uint32_t, std::set<int>> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  std::set<int> s;
  if (t.kind() == Kind::Call) s.insert(t.call_var());
  else if (t.kind() == Kind::Sym)
    for (int i = 0; i < t.arity(); ++i) {
      const std::set<int>& c = call_vars_of(t.child(i));
      s.insert(c.begin(), c.end());
    }
  return cache.emplace(t.id(), std::move(s)).first->second;
}

// the leftmost Call leaf, found by guided descent (cheap on shared terms)
Term first_call(Term t) {
  if (t.kind() == Kind::Call) return t;
  for (int i = 0; i < t.arity(); ++i)
    if (contains_call(t.child(i))) return first_call(t.child(i));
  throw std::logic_error("first_call: no call present");
}

}  // namespace

int variation(Term s1, Term s2) {
  if (s1 == s2) return 0;
  CallMarker cm;
  Term m1 = cm.mark(s1), m2 = cm.mark(s2);
  Pat s0 = lub({Pat(m1), Pat(m2)});
  int d = 0;
  for (Term m : {m1, m2}) {
    auto r = strip_prefix(*s0, m);
    if (!r) throw std::logic_error("variation: prefix does not factor");
    d = std::max(d, depth(*r));
  }
  return d;
}

std::variant<HSolution, HFailure> solve_H(const AdviceTransducer& A,
                                          const SubsetAutomaton& btop,
                                          const RhoState& rho,
                                          const Transition& tr, Mode mode) {
  int k = (int)tr.children.size();
  auto in_subset = [&](int bstate, int subset_state) {
    const auto& v = btop.subsets[subset_state];
    return std::binary_search(v.begin(), v.end(), bstate);
  };

  // the indexed family: one output value per base transition into the subset
  std::vector<std::vector<int>> tuples;
  std::vector<Term> vals;
  for (const Transition& bt : btop.base.transitions) {
    if (bt.sym != tr.sym || !in_subset(bt.target, tr.target)) continue;
    bool inside = true;
    for (int j = 0; j < k && inside; ++j)
      inside = in_subset(bt.children[j], tr.children[j]);
    if (!inside) continue;
    Term entry = rho.entries.at(bt.target);
    Term val = entry;
    if (contains_call(entry)) {
      // entry = u.q(x1): splice in the source rule for (q, sym, children)
      int qn = first_call(entry).call_state();
      int q = A.state_id(interned_name(qn));
      const Rule* rule = nullptr;
      for (const Rule& r : A.rules)
        if (r.state == q && r.sym == bt.sym && r.child_advice == bt.children) {
          rule = &r;
          break;
        }
      if (!rule) throw transducer_error("solve_H: source transducer is incomplete");
      Term rhs = rule->rhs;
      val = subst_calls(entry, [&](int, int) { return rhs; });
    }
    tuples.push_back(bt.children);
    vals.push_back(val);
  }
  if (vals.empty()) throw transducer_error("solve_H: no source transition matches");

  HSolution sol;
  std::optional<HFailure> fail;

  // at a cut position, attribute the divergence (or continuation) to the
  // unique coordinate the subtrees are a function of
  auto attribute = [&](const std::vector<Term>& sub) -> std::optional<int> {
    std::set<int> call_vars;
    for (Term s : sub) {
      const std::set<int>& c = call_vars_of(s);
      call_vars.insert(c.begin(), c.end());
    }
    std::vector<int> cands;
    for (int j = 1; j <= k; ++j) {
      if (!call_vars.empty() && (call_vars.size() > 1 || *call_vars.begin() != j)) continue;
      std::map<int, Term> per_state;
      bool functional = true;
      for (size_t i = 0; i < sub.size() && functional; ++i) {
        auto [it, fresh] = per_state.emplace(tuples[i][j - 1], sub[i]);
        functional = fresh || it->second == sub[i];
      }
      if (functional) cands.push_back(j);
    }
    if (cands.empty()) {
      fail = HFailure{"hypothesis-H",
                      call_vars.size() > 1
                          ? "continuations on distinct children under one divergence"
                          : "divergence not attributable to a single child"};
      return std::nullopt;
    }
    if (cands.size() > 1) {
      fail = HFailure{"ambiguous-attribution",
                      "divergence attributable to more than one child"};
      return std::nullopt;
    }
    int j = cands[0];
    for (size_t i = 0; i < sub.size(); ++i) {
      auto [it, fresh] = sol.residuals.emplace(std::pair{j, tuples[i][j - 1]}, sub[i]);
      if (!fresh && it->second != sub[i]) {
        fail = HFailure{"hypothesis-H",
                        "inconsistent residual for child " + std::to_string(j)};
        return std::nullopt;
      }
    }
    return j;
  };

  // descend while every value agrees on a ground constructor; cut elsewhere.
  // Memoized on the id tuple: the spliced values share structure heavily.
  std::map<std::vector<uint32_t>, std::optional<Term>> memo;
  std::function<std::optional<Term>(const std::vector<Term>&)> build =
      [&](const std::vector<Term>& sub) -> std::optional<Term> {
    std::vector<uint32_t> key;
    key.reserve(sub.size());
    for (Term s : sub) key.push_back(s.id());
    auto mit = memo.find(key);
    if (mit != memo.end()) return mit->second;
    std::optional<Term> res;
    bool same_sym = true;
    for (Term s : sub)
      same_sym = same_sym && s.kind() == Kind::Sym && s.sym_id() == sub[0].sym_id();
    if (same_sym) {
      std::vector<Term> kids;
      bool ok = true;
      for (int c = 0; c < sub[0].arity() && ok; ++c) {
        std::vector<Term> csub;
        csub.reserve(sub.size());
        for (Term s : sub) csub.push_back(s.child(c));
        auto r = build(csub);
        if (r) kids.push_back(*r);
        else ok = false;
      }
      if (ok) res = Term::sym(sub[0].sym_id(), kids);
    } else {
      auto j = attribute(sub);
      if (j) res = Term::var(*j);
    }
    memo.emplace(std::move(key), res);
    return res;
  };
  auto p = build(vals);
  if (!p) return *fail;

  if (mode == Mode::linear) {
    // collapse repeated occurrences of one variable to their common ancestor
    while (true) {
      int dup = -1;
      for (int j : var_indices(*p))
        if (var_positions(*p, j).size() > 1) {
          dup = j;
          break;
        }
      if (dup < 0) break;
      auto ps = var_positions(*p, dup);
      Pos lca = ps[0];
      for (const Pos& q : ps) {
        size_t c = 0;
        while (c < lca.size() && c < q.size() && lca[c] == q[c]) ++c;
        lca.resize(c);
      }
      for (int j2 : var_indices(subtree_at(*p, lca)))
        if (j2 != dup)
          return HFailure{"hypothesis-H", "linear pattern collapse mixes children"};
      for (auto it = sol.residuals.begin(); it != sol.residuals.end();)
        it = (it->first.first == dup) ? sol.residuals.erase(it) : std::next(it);
      std::vector<Term> sub;
      sub.reserve(vals.size());
      for (Term v : vals) sub.push_back(subtree_at(v, lca));
      auto j = attribute(sub);
      if (!j) return *fail;
      p = replace_at(*p, lca, Term::var(*j));
    }
  }

  sol.p = *p;
  sol.J = var_indices(*p);
  for (auto it = sol.residuals.begin(); it != sol.residuals.end();)
    it = std::binary_search(sol.J.begin(), sol.J.end(), it->first.first)
             ? std::next(it)
             : sol.residuals.erase(it);
  // conditions 1-2: every indexed value reassembles from p and the residuals;
  // full coverage of the child subsets follows from the passed domain gate
  for (int j : sol.J)
    for (int hj : btop.subsets[tr.children[j - 1]])
      if (!sol.residuals.count({j, hj}))
        throw transducer_error("solve_H: child subset not fully covered");
  for (size_t i = 0; i < vals.size(); ++i) {
    std::vector<std::pair<int, Term>> m;
    for (int j : sol.J) m.push_back({j, sol.residuals.at({j, tuples[i][j - 1]})});
    if (subst_vars(sol.p, m) != vals[i])
      return HFailure{"hypothesis-H", "reassembly check failed"};
  }
  return sol;
}

RemovalResult remove_lookahead(const AdviceTransducer& A, Mode mode) {
  Validation v = validate(A);
  if (!v.valid()) throw transducer_error("remove_lookahead: invalid transducer");
  if (!v.advice_bottom_up)
    throw transducer_error("remove_lookahead: advice must be bottom-up deterministic");

  RemovalResult res;
  res.source = canonicalize(make_earliest(A, mode)).transducer;
  const AdviceTransducer& A0 = res.source;
  const TreeAutomaton& B = A0.advice;
  SubsetAutomaton btop = powerset_topdown(B);
  res.variation_bound = size(A0) * (size(A0) + (int)B.states.size());
  if (!gate_equivalent(B, btop)) {
    res.reason = "domain-not-topdown";
    res.detail = "the advice language is not recognized by its top-down powerset automaton";
    return res;
  }

  AdviceTransducer& Ap = res.transducer;
  Ap.advice = btop.automaton;
  Ap.output = A0.output;
  Ap.name = A0.name + "_i";

  std::map<std::pair<int, std::vector<std::pair<int, uint32_t>>>, int> ids;
  std::string vio_detail;
  auto check_variation = [&](const RhoState& r) -> bool {
    for (auto i1 = r.entries.begin(); i1 != r.entries.end(); ++i1)
      for (auto i2 = std::next(i1); i2 != r.entries.end(); ++i2) {
        if (is_ground(i1->second) && is_ground(i2->second)) continue;
        int d = variation(i1->second, i2->second);
        if (d > res.variation_bound) {
          vio_detail = "variation " + std::to_string(d) + " between " +
                       B.states[i1->first] + " and " + B.states[i2->first] +
                       " exceeds bound " + std::to_string(res.variation_bound);
          return false;
        }
      }
    return true;
  };
  auto intern_state = [&](RhoState r) -> std::optional<int> {
    std::vector<std::pair<int, uint32_t>> key;
    for (auto& [h, t] : r.entries) key.push_back({h, t.id()});
    auto it = ids.find({r.subset, key});
    if (it != ids.end()) return it->second;
    if (!check_variation(r)) return std::nullopt;
    int id = Ap.add_state("r" + std::to_string(res.rho.size()), r.subset);
    ids.emplace(std::pair{r.subset, key}, id);
    res.rho.push_back(std::move(r));
    return id;
  };

  // axiom: the common prefix of all source axioms, continuations retained
  CallMarker cm;
  std::vector<Pat> P0;
  for (auto& [h, ax] : A0.axioms) P0.push_back(cm.mark(ax));
  Pat s = mode == Mode::uc ? lub(P0) : lub1(P0);
  std::map<int, int> aux;
  int next_aux = 2;
  std::function<Term(Term)> tovars = [&](Term t) -> Term {
    if (t.kind() != Kind::Sym) return t;
    auto it = cm.back.find(t.sym_id());
    if (it != cm.back.end()) {
      auto [a, fresh] = aux.emplace(t.sym_id(), next_aux);
      if (fresh) ++next_aux;
      return Term::var(a->second);
    }
    std::vector<Term> kids;
    kids.reserve(t.arity());
    for (int i = 0; i < t.arity(); ++i) kids.push_back(tovars(t.child(i)));
    return Term::sym(t.sym_id(), kids);
  };
  Term su = tovars(*s);
  int F = *Ap.advice.accepting.begin();
  if (var_indices(su).empty()) {
    Ap.axioms = {{F, su}};  // all source axioms agree on one ground output
    res.success = true;
    return res;
  }
  Term u = pattern_prefix(su, mode);
  RhoState r0;
  r0.subset = F;
  for (auto& [h, ax] : A0.axioms) {
    auto w = strip_prefix(u, cm.mark(ax));
    if (!w) throw std::logic_error("remove_lookahead: axiom prefix does not factor");
    r0.entries[h] = cm.unmark(*w);
  }
  auto id0 = intern_state(std::move(r0));
  if (!id0) {
    res.reason = "variation-bound";
    res.detail = "axiom state: " + vio_detail;
    return res;
  }
  Ap.axioms = {{F, compose(u, Term::call(Ap.states[*id0], 1))}};

  // breadth-first rule construction
  for (size_t i = 0; i < res.rho.size(); ++i) {
    const RhoState r = res.rho[i];  // copy: the vector grows below
    for (const Transition& tr : Ap.advice.transitions) {
      if (tr.target != r.subset) continue;
      auto out = solve_H(A0, btop, r, tr, mode);
      if (auto* f = std::get_if<HFailure>(&out)) {
        res.reason = f->reason;
        res.detail = "state " + Ap.states[i] + ", symbol " +
                     interned_name(tr.sym) + ": " + f->detail;
        return res;
      }
      HSolution& sol = std::get<HSolution>(out);
      std::vector<std::pair<int, Term>> repl;
      for (int j : sol.J) {
        RhoState rj;
        rj.subset = tr.children[j - 1];
        for (int hj : btop.subsets[rj.subset])
          rj.entries[hj] = subst_calls(sol.residuals.at({j, hj}),
                                       [&](int q, int) { return Term::call(q, 1); });
        auto idj = intern_state(std::move(rj));
        if (!idj) {
          res.reason = "variation-bound";
          res.detail = "state " + Ap.states[i] + ", symbol " +
                       interned_name(tr.sym) + ", child " + std::to_string(j) +
                       ": " + vio_detail;
          return res;
        }
        repl.push_back({j, Term::call(Ap.states[*idj], j)});
      }
      Ap.rules.push_back({(int)i, tr.sym, tr.children, subst_vars(sol.p, repl)});
      if (res.rho.size() > 100000)
        throw std::logic_error("remove_lookahead: state explosion");
    }
  }
  res.success = true;
  return res;
}

}  // namespace tdtt
