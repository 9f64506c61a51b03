#pragma once
// Output-recognizability of top-down deterministic domains by a fixed output
// tree, and construction of the constant-output checker transducer.

#include "tdtt/transducer.hpp"

#include <tuple>

namespace tdtt {

struct OrecTable {
  TreeAutomaton base;          // top-down deterministic, trim
  Term target;                 // s
  std::set<int> top;           // universal states of base
  std::vector<Term> subtrees;  // distinct subtrees of target
  // (state, subtree id) -> recognizable; universal states are not tabulated
  std::map<std::pair<int, uint32_t>, bool> rec;
  // (state, subtree id, transition index) -> chosen occurrence per non-top
  // child, the lexicographically least disjoint tuple
  std::map<std::tuple<int, uint32_t, int>, std::vector<std::pair<int, Pos>>>
      decomp;

  bool recognizable(int h, Term sub) const;
  std::vector<Term> minimal(int h) const;  // minimal recognizable subtrees
};

// Greatest fixpoint over (state, subtree-of-s) pairs: a pair survives iff
// every transition of the state admits a decomposition of the subtree into a
// linear pattern whose holes sit at pairwise disjoint occurrences of
// recognizable subtrees, one per non-universal child.
OrecTable orec_table(const TreeAutomaton& B, Term s);

// The linear, inspection-free transducer with domain dom_B(h) and constant
// output s on the whole domain. Throws transducer_error when the table says
// not recognizable (or h is universal).
AdviceTransducer build_checker(const OrecTable& table, int h);
AdviceTransducer build_checker(const TreeAutomaton& B, int h, Term s);

}  // namespace tdtt
