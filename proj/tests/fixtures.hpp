#pragma once
// Shared example automata used across the test suite.

#include "tdtt/automata.hpp"
#include "tdtt/transducer.hpp"

namespace fixtures {

// Binary trees over {f/2,a,b}; accepts f(t1,t2) where t1 has left-most leaf a
// and t2 has right-most leaf b. Top-down deterministic, has a universal state.
inline tdtt::TreeAutomaton binary_doms() {
  tdtt::TreeAutomaton B;
  B.name = "binary";
  B.alphabet.symbols = {{"f", 2}, {"a", 0}, {"b", 0}};
  int h0 = B.add_state("h0");
  int ha = B.add_state("ha");
  int hb = B.add_state("hb");
  int top = B.add_state("top");
  B.accepting = {h0};
  int f = tdtt::intern("f"), a = tdtt::intern("a"), b = tdtt::intern("b");
  B.transitions = {
      {h0, f, {ha, hb}}, {ha, f, {ha, top}}, {ha, a, {}},
      {hb, f, {top, hb}}, {hb, b, {}},
      {top, f, {top, top}}, {top, a, {}}, {top, b, {}},
  };
  B.check();
  return B;
}

// Monadic trees a(...a(e)...) or a(...a(f)...); h_e/h_f track the leaf.
// Bottom-up deterministic, two accepting states.
inline tdtt::TreeAutomaton monadic_leaf() {
  tdtt::TreeAutomaton B;
  B.name = "leaf";
  B.alphabet.symbols = {{"a", 1}, {"e", 0}, {"f", 0}};
  int he = B.add_state("he");
  int hf = B.add_state("hf");
  B.accepting = {he, hf};
  int a = tdtt::intern("a"), e = tdtt::intern("e"), f = tdtt::intern("f");
  B.transitions = {
      {he, e, {}}, {he, a, {he}}, {hf, f, {}}, {hf, a, {hf}},
  };
  B.check();
  return B;
}

// Binary trees over {f/2,a,b}; accepts f(t1,t2) where t1 has left-most leaf a
// AND right-most leaf b, t2 arbitrary.
inline tdtt::TreeAutomaton intro_doms() {
  tdtt::TreeAutomaton B;
  B.name = "intro";
  B.alphabet.symbols = {{"f", 2}, {"a", 0}, {"b", 0}};
  int h0 = B.add_state("h0");
  int hab = B.add_state("hab");
  int ha = B.add_state("ha");
  int hb = B.add_state("hb");
  int top = B.add_state("top");
  B.accepting = {h0};
  int f = tdtt::intern("f"), a = tdtt::intern("a"), b = tdtt::intern("b");
  B.transitions = {
      {h0, f, {hab, top}}, {hab, f, {ha, hb}},
      {ha, f, {ha, top}}, {ha, a, {}},
      {hb, f, {top, hb}}, {hb, b, {}},
      {top, f, {top, top}}, {top, a, {}}, {top, b, {}},
  };
  B.check();
  return B;
}

// Look-ahead transducer: trees with an e-leaf go to the fixed tree a(a(e)),
// trees with an f-leaf map to themselves.
inline tdtt::AdviceTransducer erasing_la() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "erasing";
  A.advice = monadic_leaf();
  A.output.symbols = {{"a", 1}, {"e", 0}, {"f", 0}};
  int he = 0, hf = 1;
  int q0e = A.add_state("q0e", he);
  int q0f = A.add_state("q0f", hf);
  int qid = A.add_state("qid", hf);
  A.axioms = {{he, Term::call("q0e", 1)}, {hf, Term::call("q0f", 1)}};
  int a = intern("a"), e = intern("e"), f = intern("f");
  Term aae = Term::sym("a", {Term::sym("a", {Term::sym("e")})});
  A.rules = {
      {q0e, a, {he}, aae},
      {q0e, e, {}, aae},
      {q0f, a, {hf}, Term::sym("a", {Term::call("qid", 1)})},
      {q0f, f, {}, Term::sym("f")},
      {qid, a, {hf}, Term::sym("a", {Term::call("qid", 1)})},
      {qid, f, {}, Term::sym("f")},
  };
  return A;
}

namespace detail {
// identity states over intro_doms: qid at top, plus qa/qb/q as requested
inline void intro_identity_top(tdtt::AdviceTransducer& A, int qid, int top) {
  using namespace tdtt;
  int f = intern("f"), a = intern("a"), b = intern("b");
  A.rules.push_back({qid, f, {top, top},
                     Term::sym("f", {Term::call("qid", 1), Term::call("qid", 2)})});
  A.rules.push_back({qid, a, {}, Term::sym("a")});
  A.rules.push_back({qid, b, {}, Term::sym("b")});
}
}  // namespace detail

// q0(f(x1:hab,x2:top)) -> f(f(b,b),qid(x2)): deletes a non-universal child.
inline tdtt::AdviceTransducer inspecting() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "inspecting";
  A.advice = intro_doms();
  A.output.symbols = {{"f", 2}, {"a", 0}, {"b", 0}};
  int h0 = 0, hab = 1, top = 4;
  int q0 = A.add_state("q0", h0);
  int qid = A.add_state("qid", top);
  A.axioms = {{h0, Term::call("q0", 1)}};
  int f = intern("f");
  Term fbb = Term::sym("f", {Term::sym("b"), Term::sym("b")});
  A.rules = {{q0, f, {hab, top}, Term::sym("f", {fbb, Term::call("qid", 2)})}};
  detail::intro_identity_top(A, qid, top);
  return A;
}

// Equivalent transducer that produces f(b,b) by actually walking the checked
// subtree; every deleted child is annotated with the universal state.
inline tdtt::AdviceTransducer noninspecting() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "noninspecting";
  A.advice = intro_doms();
  A.output.symbols = {{"f", 2}, {"a", 0}, {"b", 0}};
  int h0 = 0, hab = 1, ha = 2, hb = 3, top = 4;
  int q0 = A.add_state("q0", h0);
  int q = A.add_state("q", hab);
  int qa = A.add_state("qa", ha);
  int qb = A.add_state("qb", hb);
  int qid = A.add_state("qid", top);
  A.axioms = {{h0, Term::call("q0", 1)}};
  int f = intern("f"), a = intern("a"), b = intern("b");
  A.rules = {
      {q0, f, {hab, top}, Term::sym("f", {Term::call("q", 1), Term::call("qid", 2)})},
      {q, f, {ha, hb}, Term::sym("f", {Term::call("qa", 1), Term::call("qb", 2)})},
      {qa, f, {ha, top}, Term::call("qa", 1)},
      {qa, a, {}, Term::sym("b")},
      {qb, f, {top, hb}, Term::call("qb", 2)},
      {qb, b, {}, Term::sym("b")},
  };
  detail::intro_identity_top(A, qid, top);
  return A;
}

// Domains for the generalized-need chain: accepts f(t1,s1) where t1 is
// f(a,s2) or g(a,s2,s3), s1 has left-most leaf a and each s_i left-most leaf b.
inline tdtt::TreeAutomaton generalized_doms() {
  tdtt::TreeAutomaton B;
  B.name = "gen";
  B.alphabet.symbols = {{"f", 2}, {"g", 3}, {"a", 0}, {"b", 0}};
  int h0 = B.add_state("h0");
  int h1 = B.add_state("h1");
  int h2 = B.add_state("h2");
  int ha = B.add_state("ha");
  int hb = B.add_state("hb");
  int top = B.add_state("top");
  B.accepting = {h0};
  int f = tdtt::intern("f"), g = tdtt::intern("g");
  int a = tdtt::intern("a"), b = tdtt::intern("b");
  B.transitions = {
      {h0, f, {h1, ha}},
      {h1, f, {h2, hb}}, {h1, g, {h2, hb, hb}},
      {h2, a, {}},
      {ha, a, {}}, {ha, f, {ha, top}}, {ha, g, {ha, top, top}},
      {hb, b, {}}, {hb, f, {hb, top}}, {hb, g, {hb, top, top}},
      {top, f, {top, top}}, {top, g, {top, top, top}},
      {top, a, {}}, {top, b, {}},
  };
  B.check();
  return B;
}

// Chain of needs discharged one axiom factor at a time.
inline tdtt::AdviceTransducer generalized() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "generalized";
  A.advice = generalized_doms();
  A.output.symbols = {{"f", 2}, {"a", 0}};
  int h0 = 0, h1 = 1, h2 = 2, ha = 3, hb = 4;
  int q0 = A.add_state("q0", h0);
  int q1 = A.add_state("q1", h1);
  int q2 = A.add_state("q2", h2);
  Term inner = Term::sym("f", {Term::sym("a"), Term::call("q0", 1)});
  A.axioms = {{h0, Term::sym("f", {Term::sym("a"), inner})}};
  int f = intern("f"), g = intern("g"), a = intern("a");
  A.rules = {
      {q0, f, {h1, ha}, Term::call("q1", 1)},
      {q1, f, {h2, hb}, Term::call("q2", 1)},
      {q1, g, {h2, hb, hb},
       Term::sym("f", {Term::sym("a"), Term::call("q2", 1)})},
      {q2, a, {}, Term::sym("a")},
  };
  return A;
}

// Domains for the buffering example: f-spine over a g(a,a,a) base.
inline tdtt::TreeAutomaton buffer_doms() {
  tdtt::TreeAutomaton B;
  B.name = "buf";
  B.alphabet.symbols = {{"f", 1}, {"g", 3}, {"a", 0}};
  int h0 = B.add_state("h0");
  int h1 = B.add_state("h1");
  int h2 = B.add_state("h2");
  int h3 = B.add_state("h3");
  B.accepting = {h0};
  int f = tdtt::intern("f"), g = tdtt::intern("g"), a = tdtt::intern("a");
  B.transitions = {
      {h0, f, {h0}}, {h0, g, {h1, h2, h3}},
      {h1, a, {}}, {h2, a, {}}, {h3, a, {}},
  };
  B.check();
  return B;
}

// Single-state transducer whose g-rule needs three checkers but whose buffer
// can only ever hold two leaves.
inline tdtt::AdviceTransducer buffer() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "buffer";
  A.advice = buffer_doms();
  A.output.symbols = {{"f1", 2}, {"f2", 2}, {"f3", 2}, {"a", 0}};
  int h0 = 0, h1 = 1, h2 = 2, h3 = 3;
  int q = A.add_state("q", h0);
  A.axioms = {
      {h0, Term::sym("f1", {Term::sym("a"),
                            Term::sym("f2", {Term::sym("a"),
                                             Term::call("q", 1)})})}};
  int f = intern("f"), g = intern("g");
  A.rules = {
      {q, f, {h0}, Term::sym("f3", {Term::call("q", 1), Term::sym("a")})},
      {q, g, {h1, h2, h3}, Term::sym("a")},
  };
  return A;
}

// Domains for the checker-splicing example: f(t1,t2,t3) with t2,t3 of the
// form g(a,s).
inline tdtt::TreeAutomaton splice_doms() {
  tdtt::TreeAutomaton B;
  B.name = "splice";
  B.alphabet.symbols = {{"f", 3}, {"g", 2}, {"a", 0}};
  int h0 = B.add_state("h0");
  int h = B.add_state("h");
  int ha = B.add_state("ha");
  int top = B.add_state("top");
  B.accepting = {h0};
  int f = tdtt::intern("f"), g = tdtt::intern("g"), a = tdtt::intern("a");
  B.transitions = {
      {h0, f, {top, h, h}},
      {h, g, {ha, top}},
      {ha, a, {}},
      {top, f, {top, top, top}}, {top, g, {top, top}}, {top, a, {}},
  };
  B.check();
  return B;
}

// Deletes two g(a,*) children while the output already carries enough ground
// material to host both checkers.
inline tdtt::AdviceTransducer splice() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "splice";
  A.advice = splice_doms();
  A.output.symbols = {{"g", 3}, {"r", 1}, {"b", 0}};
  int h0 = 0, h = 1, top = 3;
  int q0 = A.add_state("q0", h0);
  int qp = A.add_state("qp", top);
  A.axioms = {{h0, Term::call("q0", 1)}};
  int f = intern("f"), g = intern("g"), a = intern("a");
  Term b = Term::sym("b");
  A.rules = {
      {q0, f, {top, h, h},
       Term::sym("g", {Term::call("qp", 1), Term::sym("r", {b}), b})},
      {qp, f, {top, top, top}, b},
      {qp, g, {top, top}, b},
      {qp, a, {}, b},
  };
  return A;
}

// identity translation whose advice distinguishes e- from f-leaf spines;
// look-ahead removal succeeds with delayed output
inline tdtt::AdviceTransducer identity_la() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "idla";
  A.advice = fixtures::monadic_leaf();
  A.output = A.advice.alphabet;
  int q0e = A.add_state("q0e", 0), q0f = A.add_state("q0f", 1);
  A.axioms = {{0, Term::call("q0e", 1)}, {1, Term::call("q0f", 1)}};
  A.rules = {{q0e, intern("a"), {0}, Term::sym("a", {Term::call("q0e", 1)})},
             {q0e, intern("e"), {}, Term::sym("e")},
             {q0f, intern("a"), {1}, Term::sym("a", {Term::call("q0f", 1)})},
             {q0f, intern("f"), {}, Term::sym("f")}};
  return A;
}

// same two-leaf look-ahead transducer as in the normal-form tests
inline tdtt::AdviceTransducer two_leaves() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "twoleaves";
  TreeAutomaton B;
  B.name = "B";
  B.alphabet.symbols = {{"f", 1}, {"c1", 0}, {"c2", 0}};
  int h = B.add_state("h"), h1 = B.add_state("h1"), h2 = B.add_state("h2");
  B.accepting = {h};
  B.transitions = {{h, intern("f"), {h1}}, {h, intern("f"), {h2}},
                   {h1, intern("c1"), {}}, {h2, intern("c2"), {}}};
  A.advice = B;
  A.output.symbols = {{"g", 2}, {"a", 0}, {"b", 0}};
  int q = A.add_state("q", h);
  A.axioms = {{h, Term::call("q", 1)}};
  A.rules = {{q, intern("f"), {h1}, Term::sym("g", {Term::sym("a"), Term::sym("a")})},
             {q, intern("f"), {h2}, Term::sym("g", {Term::sym("b"), Term::sym("b")})}};
  return A;
}

// the non-uniform-copying counterexample: g(a,b,t2) vs g(c,d,t2) keyed on the
// left-most leaf of t1
inline tdtt::AdviceTransducer nonuc_counterexample() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "nonuc";
  TreeAutomaton B;
  B.name = "B";
  B.alphabet.symbols = {{"f", 2}, {"a", 0}, {"b", 0}};
  int aa = B.add_state("aa"), bb = B.add_state("bb");
  int fa = B.add_state("fa"), fb = B.add_state("fb");
  B.accepting = {fa, fb};
  int f = intern("f");
  B.transitions = {{aa, intern("a"), {}}, {bb, intern("b"), {}}};
  for (int y : {aa, bb, fa, fb}) {
    for (int x : {aa, fa}) B.transitions.push_back({fa, f, {x, y}});
    for (int x : {bb, fb}) B.transitions.push_back({fb, f, {x, y}});
  }
  A.advice = B;
  A.output.symbols = {{"g", 3}, {"f", 2}, {"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}};
  int q0a = A.add_state("q0a", fa), q0b = A.add_state("q0b", fb);
  std::map<int, std::string> id{{aa, "ia"}, {bb, "ib"}, {fa, "ifa"}, {fb, "ifb"}};
  for (auto& [h, n] : id) A.add_state(n, h);
  A.axioms = {{fa, Term::call("q0a", 1)}, {fb, Term::call("q0b", 1)}};
  for (const Transition& tr : B.transitions) {
    if (tr.sym != f) continue;
    Term copy2 = Term::call(id.at(tr.children[1]), 2);
    Term copy1 = Term::call(id.at(tr.children[0]), 1);
    if (tr.target == fa)
      A.rules.push_back({q0a, f, tr.children,
                         Term::sym("g", {Term::sym("a"), Term::sym("b"), copy2})});
    else
      A.rules.push_back({q0b, f, tr.children,
                         Term::sym("g", {Term::sym("c"), Term::sym("d"), copy2})});
    // identity states copy structurally
    A.rules.push_back({A.state_id(id.at(tr.target)), f, tr.children,
                       Term::sym("f", {copy1, copy2})});
  }
  A.rules.push_back({A.state_id("ia"), intern("a"), {}, Term::sym("a")});
  A.rules.push_back({A.state_id("ib"), intern("b"), {}, Term::sym("b")});
  return A;
}

// a(b(f(g(t1,t2),t3))) -> <a,b,g>(f(g(t1,t2),t3)): the triple symbol needs
// information that arrives only after the binary output must be committed
inline tdtt::AdviceTransducer unsynchronized() {
  using namespace tdtt;
  AdviceTransducer A;
  A.name = "sync";
  TreeAutomaton B;
  B.name = "B";
  B.alphabet.symbols = {{"a", 1}, {"b", 1}, {"f", 2}, {"g", 2}, {"e", 0}};
  int e0 = B.add_state("e0"), bg = B.add_state("bg");
  int bff = B.add_state("bff"), bfg = B.add_state("bfg"), bfe = B.add_state("bfe");
  int wf = B.add_state("wf"), wg = B.add_state("wg");
  int zf = B.add_state("zf"), zg = B.add_state("zg");
  B.accepting = {zf, zg};
  std::vector<int> b5{e0, bg, bff, bfg, bfe};
  int f = intern("f"), g = intern("g");
  B.transitions.push_back({e0, intern("e"), {}});
  for (int x : b5)
    for (int y : b5) {
      B.transitions.push_back({bg, g, {x, y}});
      int t = (x == bg) ? bfg : (x == e0) ? bfe : bff;
      B.transitions.push_back({t, f, {x, y}});
    }
  for (const char* s : {"a", "b"}) {
    B.transitions.push_back({wf, intern(s), {bff}});
    B.transitions.push_back({wg, intern(s), {bfg}});
    B.transitions.push_back({zf, intern(s), {wf}});
    B.transitions.push_back({zg, intern(s), {wg}});
  }
  A.advice = B;
  A.output.symbols = {{"f", 2}, {"g", 2}, {"e", 0}};
  for (const char* s1 : {"a", "b"})
    for (const char* s2 : {"a", "b"})
      for (const char* gm : {"f", "g"})
        A.output.symbols.push_back(
            {std::string("<") + s1 + "," + s2 + "," + gm + ">", 1});
  std::map<int, std::string> id{
      {e0, "ide"}, {bg, "idg"}, {bff, "idff"}, {bfg, "idfg"}, {bfe, "idfe"}};
  int p0f = A.add_state("p0f", zf), p0g = A.add_state("p0g", zg);
  std::map<std::pair<std::string, std::string>, int> p1;
  for (const char* s : {"a", "b"}) {
    p1[{s, "f"}] = A.add_state(std::string("p1") + s + "f", wf);
    p1[{s, "g"}] = A.add_state(std::string("p1") + s + "g", wg);
  }
  for (auto& [h, n] : id) A.add_state(n, h);
  A.axioms = {{zf, Term::call("p0f", 1)}, {zg, Term::call("p0g", 1)}};
  for (const char* s : {"a", "b"}) {
    A.rules.push_back({p0f, intern(s), {wf},
                       Term::call(A.states[p1.at({s, "f"})], 1)});
    A.rules.push_back({p0g, intern(s), {wg},
                       Term::call(A.states[p1.at({s, "g"})], 1)});
    for (const char* s2 : {"a", "b"}) {
      for (const char* gm : {"f", "g"}) {
        int src = p1.at({s, gm});
        int child = (*gm == 'f') ? bff : bfg;
        std::string sym = std::string("<") + s + "," + s2 + "," + gm + ">";
        A.rules.push_back({src, intern(s2), {child},
                           Term::sym(sym, {Term::call(id.at(child), 1)})});
      }
    }
  }
  A.rules.push_back({A.state_id("ide"), intern("e"), {}, Term::sym("e")});
  for (const Transition& tr : B.transitions) {
    if (tr.sym != f && tr.sym != g) continue;
    if (!id.count(tr.target)) continue;
    A.rules.push_back({A.state_id(id.at(tr.target)), tr.sym, tr.children,
                       Term::sym(tr.sym, {Term::call(id.at(tr.children[0]), 1),
                                          Term::call(id.at(tr.children[1]), 2)})});
  }
  return A;
}


}  // namespace fixtures
