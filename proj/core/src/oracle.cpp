#include "tdtt/oracle.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace tdtt {

std::vector<Term> enumerate_trees(const RankedAlphabet& alphabet, int depth,
                                  const EnumFilter* filter) {
  alphabet.check();
  if (!alphabet.has_nullary())
    throw std::invalid_argument("alphabet has no nullary symbol");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  // by exact depth; lexicographic = symbol declaration order, then child
  // tuples ordered by enumeration index
  std::vector<std::vector<Term>> by_depth(depth + 1);
  std::vector<Term> prefix;  // all trees of depth < d, enumeration order
  std::vector<int> tree_depth;
  for (int d = 1; d <= depth; ++d) {
    for (const Symbol& s : alphabet.symbols) {
      if (d == 1) {
        if (s.rank == 0) by_depth[d].push_back(Term::sym(s.name));
        continue;
      }
      if (s.rank == 0) continue;
      // odometer over prefix indices, requiring max child depth == d-1
      std::vector<size_t> idx(s.rank, 0);
      if (prefix.empty()) continue;
      while (true) {
        int maxd = 0;
        for (size_t i : idx) maxd = std::max(maxd, tree_depth[i]);
        if (maxd == d - 1) {
          std::vector<Term> kids;
          for (size_t i : idx) kids.push_back(prefix[i]);
          by_depth[d].push_back(Term::sym(s.name, kids));
        }
        int p = s.rank - 1;
        while (p >= 0 && ++idx[p] == prefix.size()) idx[p--] = 0;
        if (p < 0) break;
      }
    }
    for (Term t : by_depth[d]) {
      prefix.push_back(t);
      tree_depth.push_back(d);
    }
  }
  if (!filter) return prefix;
  std::vector<Term> out;
  for (Term t : prefix)
    if (run(*filter->automaton, t).count(filter->state)) out.push_back(t);
  return out;
}

std::optional<Term> oracle_equiv(const AdviceTransducer& A1,
                                 const AdviceTransducer& A2, int depth) {
  Evaluator e1(A1), e2(A2);
  for (Term t : enumerate_trees(A1.advice.alphabet, depth))
    if (e1.eval(t) != e2.eval(t)) return t;
  return std::nullopt;
}

std::vector<Term> domain_trees(const TreeAutomaton& B, int state, int depth,
                               size_t budget) {
  std::map<std::pair<int, int>, std::vector<Term>> memo;
  std::function<const std::vector<Term>&(int, int)> gen =
      [&](int h, int d) -> const std::vector<Term>& {
    auto key = std::make_pair(h, d);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Term>& out = memo[key];
    if (d == 0) return out;
    std::set<uint32_t> seen;
    for (const Transition& tr : B.transitions) {
      if (tr.target != h || out.size() >= budget) continue;
      if (tr.children.empty()) {
        Term t = Term::sym(tr.sym, {});
        if (seen.insert(t.id()).second) out.push_back(t);
        continue;
      }
      std::vector<const std::vector<Term>*> kids;
      bool feasible = true;
      for (int c : tr.children) {
        kids.push_back(&gen(c, d - 1));
        feasible &= !kids.back()->empty();
      }
      if (!feasible) continue;
      std::vector<size_t> idx(tr.children.size(), 0);
      while (out.size() < budget) {
        std::vector<Term> sub;
        for (size_t i = 0; i < idx.size(); ++i) sub.push_back((*kids[i])[idx[i]]);
        Term t = Term::sym(tr.sym, sub);
        if (seen.insert(t.id()).second) out.push_back(t);
        int p = (int)idx.size() - 1;
        while (p >= 0 && ++idx[p] == kids[p]->size()) idx[p--] = 0;
        if (p < 0) break;
      }
    }
    return out;
  };
  return gen(state, depth);
}

std::optional<Term> oracle_equiv_domain(const AdviceTransducer& A1,
                                        const AdviceTransducer& A2, int depth,
                                        size_t budget) {
  Evaluator e1(A1), e2(A2);
  for (int h : A1.advice.accepting)
    for (Term t : domain_trees(A1.advice, h, depth, budget))
      if (e1.eval(t) != e2.eval(t)) return t;
  return std::nullopt;
}

namespace {

using Rng = std::mt19937_64;

int pick(Rng& rng, int n) { return (int)(rng() % (uint64_t)n); }

TreeAutomaton random_advice(Rng& rng, const Profile& p) {
  TreeAutomaton B;
  B.name = "B";
  for (int i = 0; i < p.input_nullary; ++i)
    B.alphabet.symbols.push_back({"e" + std::to_string(i + 1), 0});
  for (int i = 0; i < p.input_binary; ++i)
    B.alphabet.symbols.push_back({"g" + std::to_string(i + 1), 2});
  int n = p.advice_states;
  for (int i = 0; i < n; ++i) B.add_state("h" + std::to_string(i));
  for (const Symbol& s : B.alphabet.symbols) {
    int sym = intern(s.name);
    if (s.rank == 0) {
      B.transitions.push_back({pick(rng, n), sym, {}});
      continue;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (pick(rng, 10) < 7) B.transitions.push_back({pick(rng, n), sym, {i, j}});
  }
  int k = 1 + pick(rng, n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  B.accepting = std::set<int>(order.begin(), order.begin() + k);
  return trim(B);  // throws on empty language; caller retries
}

}  // namespace

AdviceTransducer random_instance(uint64_t seed, const Profile& p) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Rng rng(seed * 1000003 + attempt);
    AdviceTransducer A;
    A.name = "rand" + std::to_string(seed);
    try {
      A.advice = random_advice(rng, p);
    } catch (const automaton_error&) {
      continue;
    }
    for (int i = 0; i < p.output_symbols; ++i)
      A.output.symbols.push_back({"d" + std::to_string(i), i % 3});
    if (!A.output.has_nullary()) A.output.symbols.push_back({"d0", 0});
    std::vector<std::string> out0, out1, out2;
    for (const Symbol& s : A.output.symbols)
      (s.rank == 0 ? out0 : s.rank == 1 ? out1 : out2).push_back(s.name);

    int n = (int)A.advice.states.size();
    int m = std::max(p.transducer_states, n);
    std::vector<std::vector<int>> by_advice(n);
    for (int i = 0; i < m; ++i) {
      int h = i < n ? i : pick(rng, n);
      by_advice[h].push_back(A.add_state("q" + std::to_string(i), h));
    }

    // random ground output tree
    auto ground = [&](auto&& self, int d) -> Term {
      int r = (d <= 0 || out1.empty() || pick(rng, 3) == 0) ? 0
              : (out2.empty() || pick(rng, 2) == 0)         ? 1
                                                            : 2;
      if (r == 0 || (r == 1 && out1.empty()) || (r == 2 && out2.empty()))
        return Term::sym(out0[pick(rng, (int)out0.size())]);
      if (r == 1)
        return Term::sym(out1[pick(rng, (int)out1.size())], {self(self, d - 1)});
      return Term::sym(out2[pick(rng, (int)out2.size())],
                       {self(self, d - 1), self(self, d - 1)});
    };

    // rhs over available calls; uc: one state per variable, fixed up front
    auto rhs_gen = [&](const std::vector<std::pair<int, int>>& calls) -> Term {
      std::vector<bool> used(calls.size(), false);
      auto gen = [&](auto&& self, int d) -> Term {
        bool may_call = false;
        for (size_t i = 0; i < calls.size(); ++i)
          if (!p.linear || !used[i]) may_call = true;
        if (may_call && pick(rng, 3) == 0) {
          int i = pick(rng, (int)calls.size());
          if (!p.linear || !used[i]) {
            used[i] = true;
            return Term::call(A.states[calls[i].second], calls[i].first);
          }
        }
        if (d <= 0) return Term::sym(out0[pick(rng, (int)out0.size())]);
        int r = pick(rng, 3);
        if (r == 1 && !out1.empty())
          return Term::sym(out1[pick(rng, (int)out1.size())], {self(self, d - 1)});
        if (r == 2 && !out2.empty())
          return Term::sym(out2[pick(rng, (int)out2.size())],
                           {self(self, d - 1), self(self, d - 1)});
        return Term::sym(out0[pick(rng, (int)out0.size())]);
      };
      return gen(gen, p.rhs_depth);
    };

    for (int q = 0; q < (int)A.states.size(); ++q)
      for (const Transition& tr : A.advice.transitions) {
        if (tr.target != A.iota[q]) continue;
        std::vector<std::pair<int, int>> calls;  // (j, q_j)
        for (size_t j = 0; j < tr.children.size(); ++j) {
          auto& cand = by_advice[tr.children[j]];
          if (!cand.empty()) calls.emplace_back((int)j + 1, cand[pick(rng, (int)cand.size())]);
        }
        A.rules.push_back({q, tr.sym, tr.children, rhs_gen(calls)});
      }

    for (int h : A.advice.accepting) {
      if (pick(rng, 4) == 0 || by_advice[h].empty()) {
        A.axioms.emplace(h, ground(ground, p.rhs_depth));
        continue;
      }
      Term call = Term::call(A.states[by_advice[h][pick(rng, (int)by_advice[h].size())]], 1);
      if (pick(rng, 2) && !out1.empty())
        call = Term::sym(out1[pick(rng, (int)out1.size())], {call});
      A.axioms.emplace(h, call);
    }

    Validation v = validate(A);
    if (v.valid() && (!p.linear || v.linear)) return A;
  }
  throw std::runtime_error("random_instance: no valid instance found");
}

}  // namespace tdtt
