#pragma once
// Look-ahead removal: the domain gate, the <rho>-state construction with its
// pattern solver, and the variation-bound failure check.

#include "tdtt/normalform.hpp"

#include <variant>

namespace tdtt {

// Variation of two retained outputs. Each argument is ground or of the form
// u.q(x1) (a term whose calls all are q(x1)). 0 if equal; otherwise the
// maximal depth of the residuals left after removing the maximal common
// prefix. Leaves and calls have depth 1.
int variation(Term s1, Term s2);

// A state of the constructed transducer: for every advice state h jointly
// possible at this point, the output the source has already produced but the
// target could not emit yet (ground), or pending-output-plus-continuation
// u.q(x1) with iota(q) = h in the source.
struct RhoState {
  int subset = -1;             // state of the powerset automaton
  std::map<int, Term> entries;  // source advice state -> ground or u.q(x1)
};

// Solution of the per-rule pattern problem: the unique maximal pattern p over
// {x_j : j in J} and minimal residuals u_{j,h_j} reassembling every indexed
// output. Residual calls use variable j.
struct HSolution {
  std::vector<int> J;
  Term p;
  std::map<std::pair<int, int>, Term> residuals;  // (j, h_j) -> u_{j,h_j}
};

struct HFailure {
  std::string reason;  // "hypothesis-H" | "ambiguous-attribution"
  std::string detail;
};

// Solve the pattern problem for state <rho> and one powerset transition
// (tr.target must be rho.subset). Assumes the domain gate has passed, so the
// indexed family covers the full product of the child subsets.
std::variant<HSolution, HFailure> solve_H(const AdviceTransducer& A,
                                          const SubsetAutomaton& btop,
                                          const RhoState& rho,
                                          const Transition& tr, Mode mode);

struct RemovalResult {
  bool success = false;
  AdviceTransducer transducer;  // over the powerset inspection automaton
  std::vector<RhoState> rho;    // parallel to transducer.states
  AdviceTransducer source;      // the canonical earliest input actually used
  std::string reason;  // "domain-not-topdown" | "variation-bound" |
                       // "hypothesis-H" | "ambiguous-attribution"
  std::string detail;
  int variation_bound = 0;  // |source| * (|source| + m)
};

// Decide whether the translation of A (with bottom-up deterministic advice)
// can be realized without look-ahead but with inspection; on success the
// result transducer is the canonical earliest such realization.
RemovalResult remove_lookahead(const AdviceTransducer& A, Mode mode);

}  // namespace tdtt
