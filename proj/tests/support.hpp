#pragma once
// Helpers shared between test binaries.

#include "tdtt/io.hpp"

#include <algorithm>

namespace support {

// canonical printed form under breadth-first state renaming, for
// up-to-renaming comparison of rule sets
inline std::string signature(const tdtt::AdviceTransducer& A) {
  using namespace tdtt;
  std::vector<int> order;
  std::vector<int> name(A.states.size(), -1);
  auto visit = [&](int q) {
    if (name[q] == -1) {
      name[q] = (int)order.size();
      order.push_back(q);
    }
  };
  for (auto& [h, ax] : A.axioms)
    for (const Pos& p : call_positions(ax))
      visit(A.call_state(subtree_at(ax, p)));
  for (size_t i = 0; i < order.size(); ++i) {
    std::vector<const Rule*> rs;
    for (const Rule& r : A.rules)
      if (r.state == order[i]) rs.push_back(&r);
    std::sort(rs.begin(), rs.end(), [&](const Rule* a, const Rule* b) {
      return std::tie(a->sym, a->child_advice) < std::tie(b->sym, b->child_advice);
    });
    for (const Rule* r : rs)
      for (const Pos& p : call_positions(r->rhs))
        visit(A.call_state(subtree_at(r->rhs, p)));
  }
  AdviceTransducer R = A;
  R.name = "T";
  R.states.clear();
  R.iota.clear();
  for (int q : order) R.add_state("s" + std::to_string(name[q]), A.iota[q]);
  auto map_term = [&](Term t) {
    return subst_calls(t, [&](int q, int j) {
      return Term::call(R.states[name[A.state_id(interned_name(q))]], j);
    });
  };
  for (auto& [h, ax] : R.axioms) ax = map_term(ax);
  for (Rule& r : R.rules) {
    r.state = name[r.state];
    r.rhs = map_term(r.rhs);
  }
  std::sort(R.rules.begin(), R.rules.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.state, a.sym, a.child_advice) <
           std::tie(b.state, b.sym, b.child_advice);
  });
  return print_transducer(R, R.advice.name);
}

}  // namespace support
