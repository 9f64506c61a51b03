#include "doctest.h"
#include "fixtures.hpp"
#include "tdtt/io.hpp"

using namespace tdtt;

namespace {

const char* kDoc = R"(
# monadic trees with a distinguished leaf
alphabet s { a/1 e/0 f/0 }
automaton leaf over s {
  states he hf;
  accept he hf;
  he <- e; he <- a(he);
  hf <- f; hf <- a(hf);
}
transducer erasing over leaf {
  state q0e : he; state q0f : hf; state qid : hf;
  axiom he = q0e(x1);
  axiom hf = q0f(x1);
  rule q0e(a(x1:he)) -> a(a(e));
  rule q0e(e) -> a(a(e));
  rule q0f(a(x1:hf)) -> a(qid(x1));
  rule q0f(f) -> f;
  rule qid(a(x1:hf)) -> a(qid(x1));
  rule qid(f) -> f;
}
)";

}  // namespace

TEST_CASE("parse alphabet") {
  Document d = parse_document("alphabet s { f/2 a/0 }");
  REQUIRE(d.alphabets.size() == 1);
  CHECK(d.alphabets[0].name == "s");
  REQUIRE(d.alphabets[0].alphabet.symbols.size() == 2);
  CHECK(d.alphabets[0].alphabet.rank_of("f") == std::optional<int>(2));
  CHECK(d.alphabets[0].alphabet.rank_of("a") == std::optional<int>(0));
}

TEST_CASE("parse a full document") {
  Document d = parse_document(kDoc);
  REQUIRE(d.automata.size() == 1);
  REQUIRE(d.transducers.size() == 1);
  const AdviceTransducer& A = d.transducers[0];
  CHECK(validate(A).valid());
  // identical to the hand-built fixture
  AdviceTransducer E = fixtures::erasing_la();
  CHECK(A.states == E.states);
  CHECK(A.iota == E.iota);
  CHECK(A.axioms == E.axioms);
  REQUIRE(A.rules.size() == E.rules.size());
  for (size_t i = 0; i < A.rules.size(); ++i) {
    CHECK(A.rules[i].state == E.rules[i].state);
    CHECK(A.rules[i].sym == E.rules[i].sym);
    CHECK(A.rules[i].child_advice == E.rules[i].child_advice);
    CHECK(A.rules[i].rhs == E.rules[i].rhs);
  }
}

TEST_CASE("omitted annotations are filled from top-down deterministic advice") {
  const char* doc = R"(
alphabet s { f/2 a/0 b/0 }
automaton intro over s {
  states h0 hab ha hb top;
  accept h0;
  h0 <- f(hab,top); hab <- f(ha,hb);
  ha <- f(ha,top); ha <- a;
  hb <- f(top,hb); hb <- b;
  top <- f(top,top); top <- a; top <- b;
}
transducer noninspecting over intro {
  state q0 : h0; state q : hab; state qa : ha; state qb : hb; state qid : top;
  axiom h0 = q0(x1);
  rule q0(f(x1, x2)) -> f(q(x1), qid(x2));
  rule q(f(x1, x2)) -> f(qa(x1), qb(x2));
  rule qa(f(x1, x2)) -> qa(x1);
  rule qa(a) -> b;
  rule qb(f(x1, x2)) -> qb(x2);
  rule qb(b) -> b;
  rule qid(f(x1, x2)) -> f(qid(x1), qid(x2));
  rule qid(a) -> a;
  rule qid(b) -> b;
}
)";
  Document d = parse_document(doc);
  const AdviceTransducer& A = d.transducers[0];
  Validation v = validate(A);
  CHECK(v.errors == std::vector<std::string>{});
  CHECK(v.without_inspection);
  // annotations got filled: q0's rule is (hab, top)
  CHECK(A.rules[0].child_advice ==
        std::vector<int>{A.advice.state_id("hab"), A.advice.state_id("top")});
  // behaves like the hand-built fixture
  AdviceTransducer N = fixtures::noninspecting();
  Term t = parse_term("f(f(a,b), f(b,a))");
  CHECK(eval(A, t) == eval(N, t));
  CHECK(eval(A, parse_term("f(b,a)")) == std::nullopt);
}

TEST_CASE("round trip: print then parse gives an identical document") {
  Document d = parse_document(kDoc);
  std::string text = print_document(d);
  Document d2 = parse_document(text);
  CHECK(print_document(d2) == text);
  REQUIRE(d2.transducers.size() == 1);
  CHECK(d2.transducers[0].axioms == d.transducers[0].axioms);
  CHECK(d2.transducers[0].states == d.transducers[0].states);
  CHECK(d2.automata[0].transitions == d.automata[0].transitions);
  CHECK(d2.automata[0].accepting == d.automata[0].accepting);
}

TEST_CASE("parse_term") {
  Term t = parse_term("f(g(a), x1)");
  CHECK(to_string(t) == "f(g(a),x1)");
  CHECK(parse_term("a") == Term::sym("a"));
  CHECK_THROWS_AS(parse_term("f(a"), parse_error);
  CHECK_THROWS_AS(parse_term("f(a) b"), parse_error);
}

TEST_CASE("angle-bracket symbols parse") {
  Term t = parse_term("<a,b>(f(a,a))");
  CHECK(t.sym_name() == "<a,b>");
  CHECK(t.arity() == 1);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_document("alphabet s { f/x }");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("1:") == 0);
  }
  CHECK_THROWS_AS(parse_document("automaton B over nope { states h; accept h; }"),
                  parse_error);
  // rank conflict in inferred output alphabet
  const char* bad = R"(
alphabet s { a/1 e/0 }
automaton B over s { states h; accept h; h <- e; h <- a(h); }
transducer T over B {
  state q : h;
  axiom h = q(x1);
  rule q(a(x1:h)) -> a(q(x1));
  rule q(e) -> a;
}
)";
  CHECK_THROWS_AS(parse_document(bad), parse_error);
}
