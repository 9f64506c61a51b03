#pragma once
// Maximal-common-prefix fixpoints, the earliest transform, canonical
// minimization, aheadness, and polynomial-time equivalence.

#include "tdtt/transducer.hpp"

namespace tdtt {

enum class Mode { uc, linear };

struct PrefixSolution {
  Mode mode;
  std::vector<Pat> values;  // per state; never bottom for trim advice
  int iterations = 0;       // fixpoint passes until stable (<= n*|A|)
};

// Least solution of the prefix constraint system: values[q] is the maximal
// common prefix of all outputs of q (within the 1-pattern lattice in linear
// mode).
PrefixSolution pref_fixpoint(const AdviceTransducer& A, Mode mode);

// Maximal u with t = u . t' where the suffix t' contains all variables of t
// (single hole at the variables' common ancestor in linear mode). Terms
// without variables are all prefix: returns t itself.
Term pattern_prefix(Term t, Mode mode);

// Equivalent transducer with pref identically x1: constant states removed and
// their outputs absorbed, prefixes moved toward the axioms.
AdviceTransducer make_earliest(const AdviceTransducer& A, Mode mode);

struct CanonicalResult {
  AdviceTransducer transducer;
  std::vector<int> pi;  // old state -> canonical state (-1: unreachable)
};

// Coarsest merge of states with equal rule tables (pattern + successors),
// then breadth-first renaming from the axioms. Input must be earliest.
CanonicalResult canonicalize(const AdviceTransducer& A);

struct Aheadness {
  std::optional<Term> constant;  // set for constant states
  Term prefix;                   // pref(q), for non-constant states
  int canonical_state = -1;      // pi(q) in the canonical transducer
};

struct AheadnessMap {
  AdviceTransducer canonical;
  std::vector<Aheadness> entries;  // per state of the input
};

AheadnessMap aheadness(const AdviceTransducer& A, Mode mode);

struct EquivResult {
  bool equivalent = false;
  bool exact = true;         // false when the language check fell back to
  int confidence_depth = 0;  // enumeration up to this depth
  std::optional<Term> witness;  // a distinguishing input, when found
};

// Decide equivalence: advice language equality, product-advice lift,
// canonical earliest normal forms, isomorphism.
EquivResult equivalent(const AdviceTransducer& A1, const AdviceTransducer& A2,
                       Mode mode = Mode::uc);

}  // namespace tdtt
