#include "tdtt/recognizability.hpp"

#include "tdtt/automata.hpp"

#include <algorithm>
#include <functional>

namespace tdtt {

namespace {

void collect_positions(Term t, Pos& cur, std::vector<Pos>& out) {
  out.push_back(cur);
  for (int i = 0; i < (t.kind() == Kind::Sym ? t.arity() : 0); ++i) {
    cur.push_back(i + 1);
    collect_positions(t.child(i), cur, out);
    cur.pop_back();
  }
}

std::vector<Pos> all_positions(Term t) {
  std::vector<Pos> out;
  Pos cur;
  collect_positions(t, cur, out);
  return out;
}

bool is_prefix(const Pos& a, const Pos& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool disjoint(const Pos& a, const Pos& b) {
  return !is_prefix(a, b) && !is_prefix(b, a);
}

// Backtracking over the non-top children in ascending order, trying
// occurrences in preorder: the first complete assignment is the
// lexicographically least disjoint tuple.
std::optional<std::vector<std::pair<int, Pos>>> find_decomp(
    const OrecTable& tbl, Term sub, const Transition& tr) {
  std::vector<int> J;
  for (int j = 0; j < (int)tr.children.size(); ++j)
    if (!tbl.top.count(tr.children[j])) J.push_back(j + 1);
  std::vector<std::pair<int, Pos>> chosen;
  if (J.empty()) return chosen;
  std::vector<Pos> occ = all_positions(sub);
  auto rec_at = [&](int h, const Pos& p) {
    auto it = tbl.rec.find({h, subtree_at(sub, p).id()});
    return it != tbl.rec.end() && it->second;
  };
  std::function<bool(size_t)> assign = [&](size_t i) {
    if (i == J.size()) return true;
    int j = J[i];
    for (const Pos& p : occ) {
      if (!rec_at(tr.children[j - 1], p)) continue;
      bool ok = true;
      for (auto& [_, q] : chosen) ok &= disjoint(p, q);
      if (!ok) continue;
      chosen.push_back({j, p});
      if (assign(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!assign(0)) return std::nullopt;
  return chosen;
}

}  // namespace

bool OrecTable::recognizable(int h, Term sub) const {
  auto it = rec.find({h, sub.id()});
  return it != rec.end() && it->second;
}

std::vector<Term> OrecTable::minimal(int h) const {
  std::vector<Term> out;
  for (Term sub : subtrees) {
    if (!recognizable(h, sub)) continue;
    bool min = true;
    for (Term smaller : distinct_subtrees(sub))
      if (smaller != sub && recognizable(h, smaller)) min = false;
    if (min) out.push_back(sub);
  }
  return out;
}

OrecTable orec_table(const TreeAutomaton& B, Term s) {
  if (!classify(B).top_down_deterministic)
    throw automaton_error("orec_table: automaton not top-down deterministic");
  if (!is_trim(B)) throw automaton_error("orec_table: automaton not trim");
  OrecTable tbl;
  tbl.base = B;
  tbl.target = s;
  tbl.top = universal_states(B);
  tbl.subtrees = distinct_subtrees(s);
  for (int h = 0; h < (int)B.states.size(); ++h) {
    if (tbl.top.count(h)) continue;
    for (Term sub : tbl.subtrees) tbl.rec[{h, sub.id()}] = true;
  }
  std::map<uint32_t, Term> by_id;
  for (Term sub : tbl.subtrees) by_id.emplace(sub.id(), sub);
  // greatest fixpoint: falsify pairs with an unsatisfiable transition
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [key, ok] : tbl.rec) {
      if (!ok) continue;
      Term sub = by_id.at(key.second);
      for (const Transition& tr : B.transitions) {
        if (tr.target != key.first) continue;
        if (!find_decomp(tbl, sub, tr)) {
          ok = false;
          changed = true;
          break;
        }
      }
    }
  }
  for (auto& [key, ok] : tbl.rec) {
    if (!ok) continue;
    Term sub = by_id.at(key.second);
    for (int ti = 0; ti < (int)B.transitions.size(); ++ti) {
      if (B.transitions[ti].target != key.first) continue;
      tbl.decomp[{key.first, sub.id(), ti}] =
          *find_decomp(tbl, sub, B.transitions[ti]);
    }
  }
  return tbl;
}

AdviceTransducer build_checker(const OrecTable& table, int h) {
  const TreeAutomaton& B = table.base;
  if (table.top.count(h))
    throw transducer_error("build_checker: universal state needs no checker");
  if (!table.recognizable(h, table.target))
    throw transducer_error("build_checker: not recognizable");

  AdviceTransducer A;
  A.name = "checker";
  TreeAutomaton adv = B;
  adv.accepting = {h};
  A.advice = trim(adv);
  auto advice_id = [&](int b) { return A.advice.state_id(B.states[b]); };
  for (Term sub : distinct_subtrees(table.target))
    if (!A.output.has_symbol(sub.sym_name()))
      A.output.symbols.push_back({sub.sym_name(), sub.arity()});

  // states <sub, h'>, discovered from <s, h>
  std::map<std::pair<uint32_t, int>, int> seen;
  std::vector<std::pair<Term, int>> todo;
  auto state_of = [&](Term sub, int b) {
    auto it = seen.find({sub.id(), b});
    if (it != seen.end()) return it->second;
    int q = A.add_state("q" + std::to_string(A.states.size()), advice_id(b));
    seen[{sub.id(), b}] = q;
    todo.push_back({sub, b});
    return q;
  };
  int q0 = state_of(table.target, h);
  A.axioms = {{advice_id(h), Term::call(A.states[q0], 1)}};
  while (!todo.empty()) {
    auto [sub, b] = todo.back();
    todo.pop_back();
    int q = seen.at({sub.id(), b});
    for (int ti = 0; ti < (int)B.transitions.size(); ++ti) {
      const Transition& tr = B.transitions[ti];
      if (tr.target != b) continue;
      const auto& occ = table.decomp.at({b, sub.id(), ti});
      Term rhs = sub;
      for (auto& [j, p] : occ)
        rhs = replace_at(
            rhs, p,
            Term::call(
                A.states[state_of(subtree_at(sub, p), tr.children[j - 1])], j));
      std::vector<int> annot;
      for (int c : tr.children) annot.push_back(advice_id(c));
      A.rules.push_back({q, tr.sym, annot, rhs});
    }
  }
  return A;
}

AdviceTransducer build_checker(const TreeAutomaton& B, int h, Term s) {
  return build_checker(orec_table(B, s), h);
}

}  // namespace tdtt
