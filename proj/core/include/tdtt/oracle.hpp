#pragma once
// Brute-force ground truth: exhaustive tree enumeration, pointwise transducer
// comparison, and seeded random instance generation.

#include "tdtt/transducer.hpp"

namespace tdtt {

struct EnumFilter {
  const TreeAutomaton* automaton;
  int state;  // keep trees t with state in run(automaton, t)
};

// All ground trees of depth <= depth, in depth-then-lexicographic order
// (symbols ordered as declared). Throws if the alphabet has no nullary symbol.
std::vector<Term> enumerate_trees(const RankedAlphabet& alphabet, int depth,
                                  const EnumFilter* filter = nullptr);

// Pointwise comparison of eval (including undefinedness) over the enumeration;
// returns the first counterexample, or nullopt when equal up to the depth.
std::optional<Term> oracle_equiv(const AdviceTransducer& A1,
                                 const AdviceTransducer& A2, int depth);

// Trees t of depth <= depth with state in run(B, t), generated top-down from
// the transitions (feasible where full enumeration is not). Deterministic
// order; truncated at budget trees.
std::vector<Term> domain_trees(const TreeAutomaton& B, int state, int depth,
                               size_t budget = 100000);

// oracle_equiv restricted to the domain of A1's advice, using domain_trees
// per accepting state. Sound when both domains coincide.
std::optional<Term> oracle_equiv_domain(const AdviceTransducer& A1,
                                        const AdviceTransducer& A2, int depth,
                                        size_t budget = 100000);

struct Profile {
  int advice_states = 2;
  int transducer_states = 3;
  int input_nullary = 2;   // leaf symbols e1, e2, ...
  int input_binary = 1;    // binary symbols g1, ...
  int output_symbols = 3;  // d0/0, d1/1, d2/2, then d3/0, ...
  bool linear = false;
  int rhs_depth = 2;
};

// A valid transducer, deterministic in the seed.
AdviceTransducer random_instance(uint64_t seed, const Profile& profile = {});

}  // namespace tdtt
