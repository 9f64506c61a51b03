#include "tdtt/inspection.hpp"

#include <algorithm>
#include <functional>

namespace tdtt {

namespace {

std::vector<Pos> all_positions(Term t) {
  std::vector<Pos> out;
  std::function<void(Term, Pos&)> go = [&](Term s, Pos& cur) {
    out.push_back(cur);
    for (int i = 0; i < (s.kind() == Kind::Sym ? s.arity() : 0); ++i) {
      cur.push_back(i + 1);
      go(s.child(i), cur);
      cur.pop_back();
    }
  };
  Pos cur;
  go(t, cur);
  return out;
}

bool is_pos_prefix(const Pos& a, const Pos& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool disjoint(const Pos& a, const Pos& b) {
  return !is_pos_prefix(a, b) && !is_pos_prefix(b, a);
}

std::vector<Term> factors_of(Term u) {
  if (u == Term::var(1)) return {};
  return factorize(u);
}

Term compose_range(const std::vector<Term>& fs, size_t a, size_t b) {
  Term t = Term::var(1);
  for (size_t i = a; i < b; ++i) t = compose(t, fs[i]);
  return t;
}

// all members of a downward-closed family given by its maximal elements
std::vector<InspectionNeed> members(const SatFamily& phi) {
  std::set<InspectionNeed> out;
  out.insert(InspectionNeed{});
  for (const InspectionNeed& m : phi.maximal) {
    std::vector<std::pair<int, int>> v(m.pairs.begin(), m.pairs.end());
    for (unsigned mask = 0; mask < (1u << v.size()); ++mask) {
      InspectionNeed s;
      for (size_t i = 0; i < v.size(); ++i)
        if (mask & (1u << i)) s.pairs.insert(v[i]);
      out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<InspectionNeed> antichain(std::set<InspectionNeed> all) {
  std::vector<InspectionNeed> max;
  for (const InspectionNeed& m : all) {
    bool dominated = false;
    for (const InspectionNeed& o : all)
      if (o != m && std::includes(o.pairs.begin(), o.pairs.end(),
                                  m.pairs.begin(), m.pairs.end()))
        dominated = true;
    if (!dominated) max.push_back(m);
  }
  return max;
}

InspectionNeed need_minus(const InspectionNeed& a, const InspectionNeed& b) {
  InspectionNeed out;
  std::set_difference(a.pairs.begin(), a.pairs.end(), b.pairs.begin(),
                      b.pairs.end(), std::inserter(out.pairs, out.pairs.end()));
  return out;
}

InspectionNeed need_union(const InspectionNeed& a, const InspectionNeed& b) {
  InspectionNeed out = a;
  out.pairs.insert(b.pairs.begin(), b.pairs.end());
  return out;
}

SatFamily trivial_family(const InspectionNeed& over) {
  return {over, {InspectionNeed{}}};
}

// the state called on x_j in the rhs of r (unique by uniform copying)
int child_state(const AdviceTransducer& A, const Rule& r, int j) {
  for (const Pos& p : call_positions(r.rhs)) {
    Term c = subtree_at(r.rhs, p);
    if (c.call_var() == j) return A.call_state(c);
  }
  throw transducer_error("no call on child " + std::to_string(j));
}

// maximal positions of p whose subtree mentions exactly variable j
std::vector<Pos> max_var_only_positions(Term p, int j) {
  std::vector<Pos> out;
  std::function<void(Term, Pos&)> go = [&](Term t, Pos& cur) {
    if (var_indices(t) == std::vector<int>{j}) {
      out.push_back(cur);
      return;
    }
    for (int i = 0; i < (t.kind() == Kind::Sym ? t.arity() : 0); ++i) {
      cur.push_back(i + 1);
      go(t.child(i), cur);
      cur.pop_back();
    }
  };
  Pos cur;
  go(p, cur);
  return out;
}

struct VarSplit {
  Term skeleton;            // p' with Var(j) holes
  std::map<int, Term> pj;   // maximal common unary context above x_j
};

// p = p'{x_j -> p_j . x_j} with each p_j as long as possible
VarSplit split_pattern(Term p, const std::vector<int>& J) {
  VarSplit out;
  out.skeleton = p;
  for (int j : J) {
    std::vector<Pos> occ = max_var_only_positions(p, j);
    std::vector<std::vector<Term>> fss;
    for (const Pos& pos : occ)
      fss.push_back(
          factors_of(subst_vars(subtree_at(p, pos), {{j, Term::var(1)}})));
    size_t L = fss[0].size();
    for (const auto& fs : fss) L = std::min(L, fs.size());
    size_t common = 0;
    while (common < L) {
      Term f = fss[0][fss[0].size() - 1 - common];
      bool same = true;
      for (const auto& fs : fss) same &= (fs[fs.size() - 1 - common] == f);
      if (!same) break;
      ++common;
    }
    out.pj[j] = compose_range(fss[0], fss[0].size() - common, fss[0].size());
    for (size_t k = 0; k < occ.size(); ++k) {
      Term w = compose_range(fss[k], 0, fss[k].size() - common);
      out.skeleton = replace_at(out.skeleton, occ[k],
                                subst_vars(w, {{1, Term::var(j)}}));
    }
  }
  return out;
}

// minimal suffix u of s with shed(u, alpha) = eps, plus complementary prefix
std::optional<std::pair<Term, Term>> discharge_split(NeedAnalysis& ctx, Term s,
                                                     const GenNeed& alpha) {
  std::vector<Term> fs = factors_of(s);
  for (size_t i = fs.size() + 1; i-- > 0;) {
    Term v = compose_range(fs, i, fs.size());
    if (ctx.shed(v, alpha).is_epsilon())
      return std::pair{compose_range(fs, 0, i), v};
  }
  return std::nullopt;
}

std::string rule_tag(const AdviceTransducer& A, const Rule& r) {
  return "state " + A.states[r.state] + ", symbol " + interned_name(r.sym);
}

struct delay_fail {
  std::string reason, detail;
};

}  // namespace

bool SatFamily::contains(const InspectionNeed& m) const {
  if (m.empty()) return true;
  for (const InspectionNeed& o : maximal)
    if (std::includes(o.pairs.begin(), o.pairs.end(), m.pairs.begin(),
                      m.pairs.end()))
      return true;
  return false;
}

std::string to_string(const AdviceTransducer& A, const GenNeed& g) {
  if (g.is_epsilon()) return "eps";
  auto ns = [&](const InspectionNeed& m) {
    std::string s = "{";
    bool first = true;
    for (auto& [j, h] : m.pairs) {
      if (!first) s += ",";
      first = false;
      s += "(" + std::to_string(j) + "," + A.advice.states[h] + ")";
    }
    return s + "}";
  };
  std::string out;
  for (auto& [M, phi] : g.seq) {
    out += "(" + ns(M) + "|";
    bool first = true;
    for (const InspectionNeed& m : phi.maximal) {
      if (!first) out += ",";
      first = false;
      out += ns(m);
    }
    out += ")";
  }
  return out;
}

InspectionNeed rule_need(const AdviceTransducer& A, const Rule& r) {
  InspectionNeed eta;
  std::set<int> top = universal_states(A.advice);
  std::vector<int> used = r.vars();
  for (int j = 1; j <= (int)r.child_advice.size(); ++j) {
    if (std::find(used.begin(), used.end(), j) != used.end()) continue;
    if (top.count(r.child_advice[j - 1])) continue;
    eta.pairs.insert({j, r.child_advice[j - 1]});
  }
  return eta;
}

NeedAnalysis::NeedAnalysis(const TreeAutomaton& B) : B_(B) {}

const OrecTable& NeedAnalysis::table(Term ground) {
  auto it = tables_.find(ground.id());
  if (it == tables_.end())
    it = tables_.emplace(ground.id(), orec_table(B_, ground)).first;
  return it->second;
}

SatFamily NeedAnalysis::sat_family(const std::vector<Term>& G,
                                   const InspectionNeed& M) {
  std::vector<std::pair<int, int>> items(M.pairs.begin(), M.pairs.end());
  // candidate occurrences per item: (tree index, position)
  std::vector<std::vector<std::pair<int, Pos>>> cand(items.size());
  for (size_t i = 0; i < items.size(); ++i)
    for (int gi = 0; gi < (int)G.size(); ++gi) {
      const OrecTable& tbl = table(G[gi]);
      for (const Pos& p : all_positions(G[gi]))
        if (tbl.recognizable(items[i].second, subtree_at(G[gi], p)))
          cand[i].push_back({gi, p});
    }
  auto satisfiable = [&](unsigned mask) {
    std::vector<std::pair<int, Pos>> chosen;
    std::vector<size_t> sel;
    for (size_t i = 0; i < items.size(); ++i)
      if (mask & (1u << i)) sel.push_back(i);
    std::function<bool(size_t)> assign = [&](size_t k) {
      if (k == sel.size()) return true;
      for (auto& [gi, p] : cand[sel[k]]) {
        bool ok = true;
        for (auto& [g2, q] : chosen)
          if (g2 == gi && !disjoint(p, q)) ok = false;
        if (!ok) continue;
        chosen.push_back({gi, p});
        if (assign(k + 1)) return true;
        chosen.pop_back();
      }
      return false;
    };
    return assign(0);
  };
  std::set<InspectionNeed> sat;
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << items.size()); ++m) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return __builtin_popcount(a) > __builtin_popcount(b);
  });
  for (unsigned m : masks) {
    InspectionNeed sub;
    for (size_t i = 0; i < items.size(); ++i)
      if (m & (1u << i)) sub.pairs.insert(items[i]);
    bool covered = false;
    for (const InspectionNeed& o : sat)
      if (std::includes(o.pairs.begin(), o.pairs.end(), sub.pairs.begin(),
                        sub.pairs.end()))
        covered = true;
    if (covered) continue;
    if (satisfiable(m)) sat.insert(sub);
  }
  if (sat.empty()) sat.insert(InspectionNeed{});
  return {M, antichain(sat)};
}

GenNeed NeedAnalysis::shed(Term p, const GenNeed& alpha) {
  if (alpha.is_epsilon()) return alpha;
  const auto& [M, phi] = alpha.seq.back();
  GenNeed head{{alpha.seq.begin(), alpha.seq.end() - 1}};
  auto extend = [&](Term v) {
    std::set<InspectionNeed> all;
    for (const InspectionNeed& r1 : members(phi)) {
      SatFamily f2 = sat_family(max_ground_subtrees(v), need_minus(M, r1));
      for (const InspectionNeed& r2 : f2.maximal)
        all.insert(need_union(r1, r2));
    }
    return SatFamily{M, antichain(all)};
  };
  std::vector<Term> fs = factors_of(p);
  for (size_t i = fs.size() + 1; i-- > 0;) {
    Term v = compose_range(fs, i, fs.size());
    SatFamily pv = extend(v);
    if (pv.contains(M)) return shed(compose_range(fs, 0, i), head);
    if (i == 0) {
      GenNeed out = head;
      out.seq.push_back({M, pv});
      return out;
    }
  }
  throw std::logic_error("shed: unreachable");
}

std::optional<std::pair<Term, Term>> NeedAnalysis::split_min(
    Term s, const std::vector<GenNeed>& S) {
  std::vector<Term> fs = factors_of(s);
  for (size_t i = fs.size() + 1; i-- > 0;) {
    Term v = compose_range(fs, i, fs.size());
    bool ok = true;
    for (const GenNeed& a : S) ok &= shed(v, a).is_epsilon();
    if (ok) return std::pair{compose_range(fs, 0, i), v};
  }
  return std::nullopt;
}

std::optional<GenNeed> apply_rule_need(NeedAnalysis& ctx,
                                       const AdviceTransducer& A, const Rule& r,
                                       const std::map<int, GenNeed>& children,
                                       bool count_ground_rhs) {
  InspectionNeed eta = rule_need(A, r);
  std::vector<int> J = r.vars();
  Term p = r.pattern();
  if (J.size() == 1) {
    int j = J[0];
    GenNeed a = children.at(j);
    if (!eta.empty()) a.seq.insert(a.seq.begin(), {eta, trivial_family(eta)});
    return ctx.shed(subst_vars(p, {{j, Term::var(1)}}), a);
  }
  VarSplit vs = split_pattern(p, J);
  Term skeleton = vs.skeleton;
  for (int j : J) {
    auto s = discharge_split(ctx, vs.pj[j], children.at(j));
    if (!s) return std::nullopt;
    // keep only the undischarged part of p_j in the skeleton
    skeleton =
        subst_vars(skeleton, {{j, subst_vars(s->first, {{1, Term::var(j)}})}});
  }
  std::vector<Term> G;
  if (!J.empty() || count_ground_rhs) G = max_ground_subtrees(skeleton);
  SatFamily phi = ctx.sat_family(G, eta);
  if (phi.contains(eta)) return GenNeed{};
  GenNeed out;
  out.seq.push_back({eta, phi});
  return out;
}

NeedsResult compute_needs(const AdviceTransducer& A, bool count_ground_rhs) {
  NeedsResult res;
  NeedAnalysis ctx(A.advice);
  int bound = size(A);
  std::map<int, std::set<GenNeed>> S;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : A.rules) {
      std::vector<int> J = r.vars();
      std::vector<std::vector<GenNeed>> choices;
      for (int j : J) {
        auto& s = S[child_state(A, r, j)];
        choices.push_back({s.begin(), s.end()});
      }
      bool any_empty = false;
      for (auto& c : choices) any_empty |= c.empty();
      if (any_empty) continue;
      std::map<int, GenNeed> pick;
      std::function<bool(size_t)> go = [&](size_t i) -> bool {
        if (i == J.size()) {
          auto g = apply_rule_need(ctx, A, r, pick, count_ground_rhs);
          if (!g) {
            res.success = false;
            res.reason = "no-discharging-split";
            res.detail = rule_tag(A, r) + ": a child pattern has no suffix "
                         "shedding the child's need";
            return false;
          }
          if ((int)g->seq.size() > bound) {
            res.success = false;
            res.reason = "need-length-bound";
            res.detail = rule_tag(A, r) + ": generalized need longer than " +
                         std::to_string(bound);
            return false;
          }
          changed |= S[r.state].insert(*g).second;
          return true;
        }
        for (const GenNeed& a : choices[i]) {
          pick[J[i]] = a;
          if (!go(i + 1)) return false;
        }
        return true;
      };
      if (!go(0)) return res;
    }
  }
  res.needs = std::move(S);
  return res;
}

DelayResult delay_outputs(const AdviceTransducer& A) {
  DelayResult res;
  NeedsResult nr = compute_needs(A, true);
  if (!nr.success) {
    res.reason = nr.reason;
    res.detail = nr.detail;
    return res;
  }
  NeedAnalysis ctx(A.advice);
  auto Sset = [&](int q) {
    auto& s = nr.needs[q];
    return std::vector<GenNeed>(s.begin(), s.end());
  };
  auto [h0, ax] = *A.axioms.begin();
  if (is_ground(ax)) {
    res.success = true;
    res.transducer = A;
    return res;
  }
  int max_rank = 0;
  for (const Symbol& s : A.advice.alphabet.symbols)
    max_rank = std::max(max_rank, s.rank);
  long n = (long)A.states.size(), sz = size(A);
  long bound = (long)(max_rank - 1) * n * sz * sz;

  AdviceTransducer R;
  R.advice = A.advice;
  R.output = A.output;
  R.name = A.name;
  std::map<std::pair<int, uint32_t>, int> seen;
  std::vector<std::tuple<int, Term, int>> todo;  // (source q, buffer, new q)
  auto state_of = [&](int q, Term buf) {
    auto it = seen.find({q, buf.id()});
    if (it != seen.end()) return it->second;
    if ((long)factors_of(buf).size() > bound)
      throw delay_fail{"buffer-bound",
                       "state " + A.states[q] + ": buffer exceeds " +
                           std::to_string(bound) + " factors"};
    int nq = R.add_state("b" + std::to_string(R.states.size()), A.iota[q]);
    seen[{q, buf.id()}] = nq;
    res.buffers.push_back({q, buf});
    todo.push_back({q, buf, nq});
    return nq;
  };

  try {
    int q0 = A.call_state(subtree_at(ax, call_positions(ax)[0]));
    Term u0 = subst_calls(ax, [](int, int) { return Term::var(1); });
    auto sp = ctx.split_min(u0, Sset(q0));
    if (!sp)
      throw delay_fail{"no-discharging-split",
                       "axiom: no suffix discharges the needs of " +
                           A.states[q0]};
    R.axioms = {{h0, compose(sp->first, Term::call(
                                 R.states[state_of(q0, sp->second)], 1))}};
    while (!todo.empty()) {
      auto [q, buf, nq] = todo.back();
      todo.pop_back();
      for (const Rule& r : A.rules) {
        if (r.state != q) continue;
        std::vector<int> J = r.vars();
        Term p = r.pattern();
        InspectionNeed eta = rule_need(A, r);
        Term rhs;
        if (J.empty()) {
          rhs = compose(buf, p);
          if (!eta.empty() && !ctx.sat_family({rhs}, eta).contains(eta))
            throw delay_fail{"unsatisfiable-rule-need",
                             rule_tag(A, r) +
                                 ": output cannot host all checkers"};
        } else if (J.size() == 1) {
          int j = J[0], qj = child_state(A, r, j);
          Term w = compose(buf, subst_vars(p, {{j, Term::var(1)}}));
          for (const GenNeed& a : Sset(qj)) {
            GenNeed g = a;
            if (!eta.empty())
              g.seq.insert(g.seq.begin(), {eta, trivial_family(eta)});
            if (!ctx.shed(w, g).is_epsilon())
              throw delay_fail{"unsatisfiable-rule-need",
                               rule_tag(A, r) +
                                   ": emitted prefix cannot shed the needs"};
          }
          auto s = ctx.split_min(w, Sset(qj));
          if (!s)
            throw delay_fail{"no-discharging-split",
                             rule_tag(A, r) +
                                 ": no suffix discharges the child's needs"};
          rhs = compose(s->first,
                        Term::call(R.states[state_of(qj, s->second)], j));
        } else {
          VarSplit vsp = split_pattern(p, J);
          std::vector<Term> G = max_ground_subtrees(buf);
          for (Term g : max_ground_subtrees(vsp.skeleton)) G.push_back(g);
          Term body = vsp.skeleton;
          for (int j : J) {
            int qj = child_state(A, r, j);
            auto s = ctx.split_min(vsp.pj[j], Sset(qj));
            if (!s)
              throw delay_fail{"no-discharging-split",
                               rule_tag(A, r) + ": no suffix of the child " +
                                   std::to_string(j) +
                                   " pattern discharges its needs"};
            for (Term g : max_ground_subtrees(s->first)) G.push_back(g);
            body = subst_vars(
                body, {{j, compose(s->first,
                                   Term::call(R.states[state_of(qj, s->second)],
                                              j))}});
          }
          if (!eta.empty() && !ctx.sat_family(G, eta).contains(eta))
            throw delay_fail{"unsatisfiable-rule-need",
                             rule_tag(A, r) +
                                 ": retained output cannot host all checkers"};
          rhs = compose(buf, body);
        }
        R.rules.push_back({nq, r.sym, r.child_advice, rhs});
      }
    }
  } catch (const delay_fail& f) {
    res = DelayResult{};
    res.reason = f.reason;
    res.detail = f.detail;
    return res;
  }
  res.success = true;
  res.transducer = R;
  return res;
}

AdviceTransducer strip_inspection(const AdviceTransducer& A) {
  AdviceTransducer R = A;
  NeedAnalysis ctx(A.advice);
  std::map<std::pair<int, uint32_t>, int> checkers;  // (h, tree) -> entry state
  int counter = 0;
  auto checker_for = [&](int h, Term s) {
    auto it = checkers.find({h, s.id()});
    if (it != checkers.end()) return it->second;
    AdviceTransducer C = build_checker(A.advice, h, s);
    std::string pre = "w" + std::to_string(counter++) + "_";
    auto to_base = [&](int c) { return A.advice.state_id(C.advice.states[c]); };
    std::vector<int> map(C.states.size());
    for (size_t i = 0; i < C.states.size(); ++i)
      map[i] = R.add_state(pre + C.states[i], to_base(C.iota[i]));
    for (const Rule& cr : C.rules) {
      std::vector<int> annot;
      for (int c : cr.child_advice) annot.push_back(to_base(c));
      R.rules.push_back(
          {map[cr.state], cr.sym, annot, subst_calls(cr.rhs, [&](int st, int j) {
             return Term::call(
                 R.states[map[C.state_id(interned_name(st))]], j);
           })});
    }
    int entry = map[C.call_state(C.axioms.begin()->second)];
    checkers[{h, s.id()}] = entry;
    return entry;
  };

  size_t original = A.rules.size();
  for (size_t ri = 0; ri < original; ++ri) {
    InspectionNeed eta = rule_need(A, A.rules[ri]);
    if (eta.empty()) continue;
    Term rhs = R.rules[ri].rhs;
    std::vector<std::pair<int, int>> items(eta.pairs.begin(), eta.pairs.end());
    // candidates: ground subtree occurrences, smallest first then preorder
    std::vector<Pos> ground;
    {
      std::vector<Pos> pre = all_positions(rhs);
      for (const Pos& p : pre)
        if (is_ground(subtree_at(rhs, p))) ground.push_back(p);
      std::stable_sort(ground.begin(), ground.end(),
                       [&](const Pos& a, const Pos& b) {
                         return node_count(subtree_at(rhs, a)) <
                                node_count(subtree_at(rhs, b));
                       });
    }
    std::vector<Pos> chosen;
    std::function<bool(size_t)> assign = [&](size_t i) {
      if (i == items.size()) return true;
      for (const Pos& p : ground) {
        if (!ctx.table(subtree_at(rhs, p))
                 .recognizable(items[i].second, subtree_at(rhs, p)))
          continue;
        bool ok = true;
        for (const Pos& q : chosen) ok &= disjoint(p, q);
        if (!ok) continue;
        chosen.push_back(p);
        if (assign(i + 1)) return true;
        chosen.pop_back();
      }
      return false;
    };
    if (!assign(0))
      throw transducer_error("strip_inspection: unsatisfiable need, " +
                             rule_tag(A, A.rules[ri]));
    for (size_t i = 0; i < items.size(); ++i) {
      int entry = checker_for(items[i].second, subtree_at(rhs, chosen[i]));
      rhs = replace_at(rhs, chosen[i], Term::call(R.states[entry], items[i].first));
    }
    R.rules[ri].rhs = rhs;
  }
  return R;
}

InspectionResult remove_inspection(const AdviceTransducer& A, Mode mode) {
  Validation v0 = validate(A);
  if (!v0.valid())
    throw transducer_error("remove_inspection: invalid transducer");
  if (!v0.advice_top_down)
    throw transducer_error(
        "remove_inspection: advice not top-down deterministic");
  InspectionResult res;
  res.source = canonicalize(make_earliest(A, mode)).transducer;
  NeedsResult strict = compute_needs(res.source, true);
  if (!strict.success) {
    res.reason = strict.reason;
    res.detail = strict.detail;
    return res;
  }
  NeedsResult display = compute_needs(res.source, false);
  res.needs = display.success ? display.needs : strict.needs;

  auto [h0, ax] = *res.source.axioms.begin();
  if (is_ground(ax)) {
    res.delayed = res.source;
    if (universal_states(res.source.advice).count(h0)) {
      res.transducer = res.source;
      res.success = true;
      return res;
    }
    OrecTable tbl = orec_table(res.source.advice, ax);
    if (!tbl.recognizable(h0, ax)) {
      res.reason = "unsatisfiable-rule-need";
      res.detail = "axiom: domain not output-recognizable by the axiom tree";
      return res;
    }
    res.transducer = build_checker(tbl, h0);
    res.success = true;
    return res;
  }

  DelayResult d = delay_outputs(res.source);
  if (!d.success) {
    res.reason = d.reason;
    res.detail = d.detail;
    return res;
  }
  res.delayed = d.transducer;
  res.buffers = d.buffers;
  res.transducer = strip_inspection(d.transducer);
  res.success = true;
  return res;
}

}  // namespace tdtt
