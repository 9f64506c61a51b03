#include "doctest.h"
#include "fixtures.hpp"
#include "tdtt/inspection.hpp"
#include "tdtt/io.hpp"
#include "tdtt/oracle.hpp"

#include <algorithm>

using namespace tdtt;

namespace {

InspectionNeed need(std::initializer_list<std::pair<int, int>> ps) {
  InspectionNeed n;
  for (auto& p : ps) n.pairs.insert(p);
  return n;
}

SatFamily triv(const InspectionNeed& m) { return {m, {InspectionNeed{}}}; }

GenNeed gn(std::vector<std::pair<InspectionNeed, SatFamily>> seq) {
  return {std::move(seq)};
}

const Rule* rule_of(const AdviceTransducer& A, int q, std::string_view sym) {
  for (const Rule& r : A.rules)
    if (r.state == q && r.sym == intern(sym)) return &r;
  return nullptr;
}

int state_with_buffer(const DelayResult& d, int q, Term buf) {
  for (size_t i = 0; i < d.buffers.size(); ++i)
    if (d.buffers[i] == std::pair{q, buf}) return (int)i;
  return -1;
}

Term a() { return Term::sym("a"); }
Term x1() { return Term::var(1); }

}  // namespace

TEST_CASE("per-rule inspection needs") {
  AdviceTransducer A = fixtures::generalized();
  int ha = A.advice.state_id("ha"), hb = A.advice.state_id("hb");
  CHECK(rule_need(A, A.rules[0]) == need({{2, ha}}));
  CHECK(rule_need(A, A.rules[1]) == need({{2, hb}}));
  CHECK(rule_need(A, A.rules[2]) == need({{2, hb}, {3, hb}}));
  CHECK(rule_need(A, A.rules[3]) == need({}));
  // universal annotations never contribute
  AdviceTransducer N = fixtures::noninspecting();
  for (const Rule& r : N.rules) CHECK(rule_need(N, r).empty());
}

TEST_CASE("satisfiability family over ground trees") {
  TreeAutomaton B = fixtures::buffer_doms();
  NeedAnalysis ctx(B);
  InspectionNeed M = need({{1, B.state_id("h1")}, {2, B.state_id("h2")}});
  // one leaf hosts only one checker
  SatFamily one = ctx.sat_family({a()}, M);
  CHECK(one.maximal ==
        std::vector<InspectionNeed>{need({{1, B.state_id("h1")}}),
                                    need({{2, B.state_id("h2")}})});
  CHECK(!one.contains(M));
  // two disjoint leaves host both
  SatFamily two = ctx.sat_family({Term::sym("f1", {a(), a()})}, M);
  CHECK(two.maximal == std::vector<InspectionNeed>{M});
  CHECK(two.contains(M));
  // no trees: only the empty need
  SatFamily none = ctx.sat_family({}, M);
  CHECK(none.maximal == std::vector<InspectionNeed>{InspectionNeed{}});
  CHECK(none.contains(need({})));
}

TEST_CASE("generalized needs of the chained example") {
  AdviceTransducer A = fixtures::generalized();
  NeedAnalysis ctx(A.advice);
  int ha = A.advice.state_id("ha"), hb = A.advice.state_id("hb");
  InspectionNeed e1 = need({{2, ha}}), e2 = need({{2, hb}});
  InspectionNeed e3 = need({{2, hb}, {3, hb}});
  SatFamily phi3{e3, {need({{2, hb}}), need({{3, hb}})}};

  // rule-level transformations
  std::map<int, GenNeed> eps = {{1, gn({})}};
  CHECK(*apply_rule_need(ctx, A, A.rules[1], eps, false) == gn({{e2, triv(e2)}}));
  CHECK(*apply_rule_need(ctx, A, A.rules[2], eps, false) == gn({{e3, phi3}}));
  CHECK(*apply_rule_need(ctx, A, A.rules[3], {}, false) == gn({}));
  std::map<int, GenNeed> c2 = {{1, gn({{e2, triv(e2)}})}};
  CHECK(*apply_rule_need(ctx, A, A.rules[0], c2, false) ==
        gn({{e1, triv(e1)}, {e2, triv(e2)}}));
  std::map<int, GenNeed> c3 = {{1, gn({{e3, phi3}})}};
  CHECK(*apply_rule_need(ctx, A, A.rules[0], c3, false) ==
        gn({{e1, triv(e1)}, {e3, phi3}}));

  NeedsResult nr = compute_needs(A);
  REQUIRE(nr.success);
  CHECK(nr.needs[0] == std::set<GenNeed>{gn({{e1, triv(e1)}, {e2, triv(e2)}}),
                                         gn({{e1, triv(e1)}, {e3, phi3}})});
  CHECK(nr.needs[1] == std::set<GenNeed>{gn({{e2, triv(e2)}}), gn({{e3, phi3}})});
  CHECK(nr.needs[2] == std::set<GenNeed>{gn({})});
  CHECK(to_string(A, gn({{e3, phi3}})) == "({(2,hb),(3,hb)}|{(2,hb)},{(3,hb)})");
}

TEST_CASE("needs of the buffering example") {
  AdviceTransducer A = fixtures::buffer();
  int h1 = 1, h2 = 2, h3 = 3;
  InspectionNeed M = need({{1, h1}, {2, h2}, {3, h3}});
  SatFamily singles{M, {need({{1, h1}}), need({{2, h2}}), need({{3, h3}})}};
  SatFamily pairs{M,
                  {need({{1, h1}, {2, h2}}), need({{1, h1}, {3, h3}}),
                   need({{2, h2}, {3, h3}})}};

  NeedsResult nr = compute_needs(A);
  REQUIRE(nr.success);
  CHECK(nr.needs[0] == std::set<GenNeed>{gn({{M, triv(M)}}), gn({{M, singles}}),
                                         gn({{M, pairs}}), gn({})});
  // the construction's view counts the ground right-hand side as a host
  NeedsResult cr = compute_needs(A, true);
  REQUIRE(cr.success);
  CHECK(cr.needs[0] ==
        std::set<GenNeed>{gn({{M, singles}}), gn({{M, pairs}}), gn({})});
}

TEST_CASE("delayed outputs of the buffering example") {
  AdviceTransducer A = fixtures::buffer();
  Term a1 = Term::sym("f1", {a(), x1()});
  Term a2 = Term::sym("f2", {a(), x1()});
  Term a3 = Term::sym("f3", {x1(), a()});

  DelayResult d = delay_outputs(A);
  REQUIRE(d.success);
  const AdviceTransducer& R = d.transducer;
  CHECK(R.states.size() == 3);
  CHECK(R.rules.size() == 6);
  int b12 = state_with_buffer(d, 0, compose(a1, a2));
  int b23 = state_with_buffer(d, 0, compose(a2, a3));
  int b33 = state_with_buffer(d, 0, compose(a3, a3));
  REQUIRE(b12 >= 0);
  REQUIRE(b23 >= 0);
  REQUIRE(b33 >= 0);
  CHECK(R.axioms.at(0) == Term::call(R.states[b12], 1));
  auto call = [&](int q) { return Term::call(R.states[q], 1); };
  CHECK(rule_of(R, b12, "f")->rhs == Term::sym("f1", {a(), call(b23)}));
  CHECK(rule_of(R, b23, "f")->rhs == Term::sym("f2", {a(), call(b33)}));
  CHECK(rule_of(R, b33, "f")->rhs == Term::sym("f3", {call(b33), a()}));
  CHECK(rule_of(R, b12, "g")->rhs ==
        Term::sym("f1", {a(), Term::sym("f2", {a(), a()})}));
  CHECK(rule_of(R, b23, "g")->rhs ==
        Term::sym("f2", {a(), Term::sym("f3", {a(), a()})}));
  CHECK(rule_of(R, b33, "g")->rhs ==
        Term::sym("f3", {Term::sym("f3", {a(), a()}), a()}));
  CHECK(validate(R).errors == std::vector<std::string>{});

  // buffer bounds: factor count and factor size
  int max_rank = 0;
  for (const Symbol& s : A.advice.alphabet.symbols)
    max_rank = std::max(max_rank, s.rank);
  long bound = (long)(max_rank - 1) * (long)A.states.size() * size(A) * size(A);
  for (auto& [q, buf] : d.buffers) {
    std::vector<Term> fs = factorize(buf);
    CHECK((long)fs.size() <= bound);
    for (Term f : fs) CHECK(node_count(f) <= size(A));
  }

  // shedding invariant: every buffer discharges its state's needs
  NeedAnalysis ctx(A.advice);
  NeedsResult cr = compute_needs(A, true);
  for (auto& [q, buf] : d.buffers)
    for (const GenNeed& al : cr.needs[q]) CHECK(ctx.shed(buf, al).is_epsilon());
}

TEST_CASE("delayed outputs of the chained example") {
  AdviceTransducer A = fixtures::generalized();
  Term fa = Term::sym("f", {a(), x1()});
  DelayResult d = delay_outputs(A);
  REQUIRE(d.success);
  const AdviceTransducer& R = d.transducer;
  CHECK(R.states.size() == 3);
  CHECK(R.rules.size() == 4);
  int b0 = state_with_buffer(d, 0, compose(fa, fa));
  int b1 = state_with_buffer(d, 1, fa);
  int b2 = state_with_buffer(d, 2, x1());
  REQUIRE(b0 >= 0);
  REQUIRE(b1 >= 0);
  REQUIRE(b2 >= 0);
  CHECK(R.axioms.at(0) == Term::call(R.states[b0], 1));
  auto call = [&](int q) { return Term::call(R.states[q], 1); };
  CHECK(rule_of(R, b0, "f")->rhs == Term::sym("f", {a(), call(b1)}));
  CHECK(rule_of(R, b1, "f")->rhs == Term::sym("f", {a(), call(b2)}));
  CHECK(rule_of(R, b1, "g")->rhs ==
        Term::sym("f", {a(), Term::sym("f", {a(), call(b2)})}));
  CHECK(rule_of(R, b2, "a")->rhs == a());
  CHECK(validate(R).errors == std::vector<std::string>{});
}

TEST_CASE("checker splicing replaces needed ground subtrees") {
  AdviceTransducer A = fixtures::splice();
  AdviceTransducer R = strip_inspection(A);
  CHECK(R.rules.size() == A.rules.size() + 2);
  // both needs share one checker; the smaller host b wins over r(b)
  Term b = Term::sym("b");
  CHECK(R.rules[0].rhs ==
        Term::sym("g", {Term::call("qp", 1),
                        Term::sym("r", {Term::call("w0_q0", 2)}),
                        Term::call("w0_q0", 3)}));
  const Rule* k0 = rule_of(R, R.state_id("w0_q0"), "g");
  REQUIRE(k0);
  CHECK(k0->rhs == Term::call("w0_q1", 1));
  CHECK(k0->child_advice ==
        std::vector<int>{A.advice.state_id("ha"), A.advice.state_id("top")});
  const Rule* k1 = rule_of(R, R.state_id("w0_q1"), "a");
  REQUIRE(k1);
  CHECK(k1->rhs == b);
  Validation v = validate(R);
  CHECK(v.errors == std::vector<std::string>{});
  CHECK(v.without_inspection);
  CHECK(!validate(A).without_inspection);
  CHECK(!oracle_equiv(A, R, 4).has_value());
}

TEST_CASE("inspection removal pipeline") {
  SUBCASE("intro example") {
    InspectionResult r = remove_inspection(fixtures::inspecting(), Mode::uc);
    REQUIRE(r.success);
    CHECK(validate(r.transducer).without_inspection);
    CHECK(!oracle_equiv(r.transducer, fixtures::inspecting(), 4).has_value());
    CHECK(!oracle_equiv(r.transducer, fixtures::noninspecting(), 4).has_value());
  }
  SUBCASE("chained example") {
    InspectionResult r = remove_inspection(fixtures::generalized(), Mode::uc);
    REQUIRE(r.success);
    CHECK(validate(r.transducer).without_inspection);
    CHECK(!oracle_equiv(r.transducer, fixtures::generalized(), 3).has_value());
  }
  SUBCASE("buffering example") {
    InspectionResult r = remove_inspection(fixtures::buffer(), Mode::uc);
    REQUIRE(r.success);
    CHECK(validate(r.transducer).without_inspection);
    CHECK(!oracle_equiv(r.transducer, fixtures::buffer(), 4).has_value());
  }
  SUBCASE("already inspection-free input is preserved") {
    InspectionResult r = remove_inspection(fixtures::noninspecting(), Mode::uc);
    REQUIRE(r.success);
    CHECK(validate(r.transducer).without_inspection);
    CHECK(!oracle_equiv(r.transducer, fixtures::noninspecting(), 4).has_value());
  }
}

TEST_CASE("unsatisfiable needs are rejected") {
  // constant output a cannot host two disjoint checkers
  AdviceTransducer A;
  A.advice = fixtures::binary_doms();
  A.output.symbols = {{"a", 0}};
  int q0 = A.add_state("q0", 0);
  A.axioms = {{0, Term::call("q0", 1)}};
  A.rules = {{q0, intern("f"), {1, 2}, a()}};
  REQUIRE(validate(A).valid());
  InspectionResult r = remove_inspection(A, Mode::uc);
  CHECK(!r.success);
  CHECK(r.reason == "unsatisfiable-rule-need");

  // monadic output spine: the needed host only appears inside the child
  AdviceTransducer S;
  S.advice = fixtures::binary_doms();
  S.output.symbols = {{"g", 1}, {"c", 0}};
  int p0 = S.add_state("q0", 0);
  int pa = S.add_state("qa", 1);
  S.axioms = {{0, Term::call("q0", 1)}};
  S.rules = {
      {p0, intern("f"), {1, 2}, Term::sym("g", {Term::call("qa", 1)})},
      {pa, intern("f"), {1, 3}, Term::sym("g", {Term::call("qa", 1)})},
      {pa, intern("a"), {}, Term::sym("c")},
  };
  REQUIRE(validate(S).valid());
  InspectionResult rs = remove_inspection(S, Mode::uc);
  CHECK(!rs.success);
  CHECK(rs.reason == "no-discharging-split");
  // the same verdict, deterministically
  InspectionResult rs2 = remove_inspection(S, Mode::uc);
  CHECK(rs2.reason == rs.reason);
  CHECK(rs2.detail == rs.detail);
}
