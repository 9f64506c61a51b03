#include "tdtt/transducer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tdtt {

std::vector<int> Rule::vars() const {
  std::set<int> js;
  for (const Pos& p : call_positions(rhs)) js.insert(subtree_at(rhs, p).call_var());
  return {js.begin(), js.end()};
}

Term Rule::pattern() const {
  return subst_calls(rhs, [](int, int j) { return Term::var(j); });
}

int AdviceTransducer::state_id(std::string_view q) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i] == q) return (int)i;
  throw transducer_error("unknown state: " + std::string(q));
}

int AdviceTransducer::add_state(const std::string& q, int advice_state) {
  states.push_back(q);
  iota.push_back(advice_state);
  return (int)states.size() - 1;
}

namespace {

std::string rule_id(const AdviceTransducer& A, const Rule& r) {
  std::ostringstream os;
  os << A.states[r.state] << "(" << interned_name(r.sym) << "(";
  for (size_t j = 0; j < r.child_advice.size(); ++j) {
    if (j) os << ",";
    os << "x" << j + 1 << ":" << A.advice.states[r.child_advice[j]];
  }
  os << "))";
  return os.str();
}

void check_output_term(const AdviceTransducer& A, Term t, bool allow_calls,
                       int max_var, std::vector<std::string>& errors,
                       const std::string& where) {
  switch (t.kind()) {
    case Kind::Var:
      errors.push_back(where + ": bare variable x" + std::to_string(t.var_index()));
      return;
    case Kind::Call: {
      if (!allow_calls) {
        errors.push_back(where + ": unexpected state call");
        return;
      }
      if (t.call_var() < 1 || t.call_var() > max_var)
        errors.push_back(where + ": call variable x" + std::to_string(t.call_var()) +
                         " out of range");
      return;
    }
    case Kind::Sym: {
      auto rk = A.output.rank_of(t.sym_name());
      if (!rk)
        errors.push_back(where + ": unknown output symbol " + t.sym_name());
      else if (*rk != t.arity())
        errors.push_back(where + ": output symbol " + t.sym_name() + " used with rank " +
                         std::to_string(t.arity()));
      for (int i = 0; i < t.arity(); ++i)
        check_output_term(A, t.child(i), allow_calls, max_var, errors, where);
      return;
    }
  }
}

// all Call leaves, checking uniform copying: one state per variable
std::map<int, int> call_map(const AdviceTransducer& A, Term t,
                            std::vector<std::string>& errors, const std::string& where) {
  std::map<int, int> by_var;  // var -> state
  for (const Pos& p : call_positions(t)) {
    Term c = subtree_at(t, p);
    int q;
    try {
      q = A.state_id(c.call_state_name());
    } catch (const transducer_error&) {
      errors.push_back(where + ": unknown state " + c.call_state_name());
      continue;
    }
    auto [it, fresh] = by_var.emplace(c.call_var(), q);
    if (!fresh && it->second != q)
      errors.push_back(where + ": uniform-copying violation on x" +
                       std::to_string(c.call_var()) + " (" + A.states[it->second] +
                       " vs " + A.states[q] + ")");
  }
  return by_var;
}

}  // namespace

Validation validate(const AdviceTransducer& A) {
  Validation v;
  auto& errors = v.errors;
  try {
    A.advice.check();
    A.output.check();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
    return v;
  }
  if (!is_trim(A.advice)) errors.push_back("advice automaton is not trim");
  Classification cl = classify(A.advice);
  if (!cl.unambiguous) errors.push_back("advice automaton is ambiguous");
  v.advice_bottom_up = cl.bottom_up_deterministic;
  v.advice_top_down = cl.top_down_deterministic;

  if (A.iota.size() != A.states.size()) errors.push_back("iota/state size mismatch");
  for (size_t q = 0; q < A.iota.size(); ++q)
    if (A.iota[q] < 0 || A.iota[q] >= (int)A.advice.states.size())
      errors.push_back("iota out of range for state " + A.states[q]);
  if (!errors.empty()) return v;

  // axioms: exactly one per accepting advice state
  for (int h : A.advice.accepting)
    if (!A.axioms.count(h))
      errors.push_back("missing axiom for accepting state " + A.advice.states[h]);
  for (auto& [h, ax] : A.axioms) {
    std::string where = "axiom " + A.advice.states[h];
    if (!A.advice.accepting.count(h)) {
      errors.push_back(where + ": state is not accepting");
      continue;
    }
    check_output_term(A, ax, true, 1, errors, where);
    auto calls = call_map(A, ax, errors, where);
    if (calls.size() == 1 && errors.empty()) {
      int q = calls.begin()->second;
      if (A.iota[q] != h)
        errors.push_back(where + ": start state " + A.states[q] + " has iota " +
                         A.advice.states[A.iota[q]]);
    }
  }

  // rules: shape, and exactly one per (q, advice transition with target iota(q))
  std::map<std::tuple<int, int, std::vector<int>>, int> seen;  // (q,f,hs) -> count
  for (const Rule& r : A.rules) {
    std::string where = "rule " + rule_id(A, r);
    if (r.state < 0 || r.state >= (int)A.states.size()) {
      errors.push_back(where + ": bad state");
      continue;
    }
    auto rk = A.advice.alphabet.rank_of(interned_name(r.sym));
    if (!rk) {
      errors.push_back(where + ": unknown input symbol");
      continue;
    }
    if ((int)r.child_advice.size() != *rk) {
      errors.push_back(where + ": annotation count != rank");
      continue;
    }
    Transition want{A.iota[r.state], r.sym, r.child_advice};
    if (std::find(A.advice.transitions.begin(), A.advice.transitions.end(), want) ==
        A.advice.transitions.end())
      errors.push_back(where + ": no matching advice transition");
    if (++seen[{r.state, r.sym, r.child_advice}] == 2)
      errors.push_back(where + ": duplicate rule");
    check_output_term(A, r.rhs, true, *rk, errors, where);
    auto calls = call_map(A, r.rhs, errors, where);
    for (auto [j, q] : calls)
      if (A.iota[q] != r.child_advice[j - 1])
        errors.push_back(where + ": call " + A.states[q] + "(x" + std::to_string(j) +
                         ") has iota " + A.advice.states[A.iota[q]] + ", annotation is " +
                         A.advice.states[r.child_advice[j - 1]]);
  }
  for (size_t q = 0; q < A.states.size(); ++q)
    for (const Transition& tr : A.advice.transitions)
      if (tr.target == A.iota[q] &&
          !seen.count({(int)q, tr.sym, tr.children}))
        errors.push_back("missing rule for " + A.states[q] + " on transition " +
                         interned_name(tr.sym) + " at " + A.advice.states[tr.target]);

  // flags
  v.linear = true;
  for (const Rule& r : A.rules) {
    std::map<int, int> occ;
    for (const Pos& p : call_positions(r.rhs)) ++occ[subtree_at(r.rhs, p).call_var()];
    for (auto [j, n] : occ)
      if (n > 1) v.linear = false;
  }
  std::set<int> top = universal_states(A.advice);
  v.without_inspection = true;
  for (const Rule& r : A.rules) {
    auto js = r.vars();
    for (int j = 1; j <= (int)r.child_advice.size(); ++j)
      if (!std::binary_search(js.begin(), js.end(), j) &&
          !top.count(r.child_advice[j - 1]))
        v.without_inspection = false;
  }
  return v;
}

int size(const AdviceTransducer& A) {
  int n = 0;
  for (auto& [h, ax] : A.axioms) n += dag_size(ax);
  for (const Rule& r : A.rules) n += (int)r.child_advice.size() + 1 + dag_size(r.rhs);
  return n;
}

const std::set<int>& Evaluator::advice_states(Term t) {
  auto it = run_memo_.find(t.id());
  if (it == run_memo_.end()) it = run_memo_.emplace(t.id(), run(A_.advice, t)).first;
  return it->second;
}

// the unique applicable rule for (q, f(t1..tk)), or nullptr
const Rule* Evaluator::find_rule(int q, Term t) {
  const Rule* found = nullptr;
  for (const Rule& r : A_.rules) {
    if (r.state != q || r.sym != t.sym_id()) continue;
    bool ok = true;
    for (int i = 0; i < t.arity() && ok; ++i)
      ok = advice_states(t.child(i)).count(r.child_advice[i]) > 0;
    if (!ok) continue;
    if (found) throw transducer_error("ambiguous computation");
    found = &r;
  }
  return found;
}

Term Evaluator::state(int q, Term t) {
  auto key = std::make_pair(q, t.id());
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const Rule* r = find_rule(q, t);
  if (!r) throw transducer_error("outside state domain");
  Term out = subst_calls(r->rhs, [&](int qj_name, int j) {
    return state(A_.state_id(interned_name(qj_name)), t.child(j - 1));
  });
  memo_.emplace(key, out);
  return out;
}

Term Evaluator::context(int q, Term c, int h_prime) {
  if (c.kind() == Kind::Var) {
    if (A_.iota[q] != h_prime) throw transducer_error("no computation on context");
    return Term::call(A_.states[q], 1);
  }
  int hole = -1;
  for (int i = 0; i < c.arity(); ++i)
    if (contains_var(c.child(i), 1)) hole = i;
  const Rule* found = nullptr;
  for (const Rule& r : A_.rules) {
    if (r.state != q || r.sym != c.sym_id()) continue;
    bool ok = true;
    for (int i = 0; i < c.arity() && ok; ++i) {
      if (i == hole)
        ok = run_context(A_.advice, c.child(i)).count({r.child_advice[i], h_prime}) > 0;
      else
        ok = advice_states(c.child(i)).count(r.child_advice[i]) > 0;
    }
    if (!ok) continue;
    if (found) throw transducer_error("ambiguous computation");
    found = &r;
  }
  if (!found) throw transducer_error("no computation on context");
  return subst_calls(found->rhs, [&](int qj_name, int j) {
    int qj = A_.state_id(interned_name(qj_name));
    if (j - 1 == hole) return context(qj, c.child(j - 1), h_prime);
    return state(qj, c.child(j - 1));
  });
}

std::optional<Term> Evaluator::eval(Term t) {
  int h = -1;
  for (int s : advice_states(t))
    if (A_.advice.accepting.count(s)) h = s;
  if (h < 0) return std::nullopt;
  return subst_calls(A_.axioms.at(h), [&](int q_name, int) {
    return state(A_.state_id(interned_name(q_name)), t);
  });
}

std::optional<Term> eval(const AdviceTransducer& A, Term t) {
  return Evaluator(A).eval(t);
}

Term eval_state(const AdviceTransducer& A, int q, Term t) {
  return Evaluator(A).state(q, t);
}

Term eval_context(const AdviceTransducer& A, int q, Term c, int h_prime) {
  return Evaluator(A).context(q, c, h_prime);
}

Term eval_context_axiom(const AdviceTransducer& A, Term c, int h_prime) {
  auto rc = run_context(A.advice, c);
  int h = -1;
  for (auto [a, b] : rc)
    if (b == h_prime && A.advice.accepting.count(a)) {
      if (h >= 0) throw transducer_error("ambiguous computation");
      h = a;
    }
  if (h < 0) throw transducer_error("no computation on context");
  Evaluator ev{A};
  Term ax = A.axioms.at(h);
  return subst_calls(ax, [&](int q_name, int) {
    return ev.context(A.state_id(interned_name(q_name)), c, h_prime);
  });
}

AdviceTransducer embed_bottom_up(const TreeAutomaton& B, const std::vector<Term>& rhs,
                                 const RankedAlphabet& output) {
  if (rhs.size() != B.transitions.size())
    throw transducer_error("one rhs per transition required");
  if (!classify(B).bottom_up_deterministic)
    throw transducer_error("source is not bottom-up deterministic");
  AdviceTransducer A;
  A.advice = B;
  A.output = output;
  A.name = B.name;
  for (size_t h = 0; h < B.states.size(); ++h)
    A.add_state(B.states[h], (int)h);
  for (int h : B.accepting) A.axioms.emplace(h, Term::call(B.states[h], 1));
  for (size_t i = 0; i < B.transitions.size(); ++i) {
    const Transition& tr = B.transitions[i];
    Term t = subst_vars(rhs[i], [&] {
      std::vector<std::pair<int, Term>> m;
      for (size_t j = 0; j < tr.children.size(); ++j)
        m.emplace_back((int)j + 1, Term::call(B.states[tr.children[j]], (int)j + 1));
      return m;
    }());
    A.rules.push_back({tr.target, tr.sym, tr.children, t});
  }
  Validation v = validate(A);
  if (!v.valid()) throw transducer_error("embedding invalid: " + v.errors.front());
  return A;
}

}  // namespace tdtt
