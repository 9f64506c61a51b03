#pragma once
// Finite tree automata: trimming, determinism classification, runs, the
// top-down powerset construction, the equivalence gate, and products.

#include "tdtt/terms.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tdtt {

struct Transition {
  int target;                 // state index
  int sym;                    // interned symbol name
  std::vector<int> children;  // state indices, length = rank

  auto operator<=>(const Transition&) const = default;
};

struct TreeAutomaton {
  RankedAlphabet alphabet;
  std::vector<std::string> states;
  std::set<int> accepting;
  std::vector<Transition> transitions;
  std::string name = "B";

  int state_id(std::string_view s) const;
  int add_state(const std::string& s);
  void check() const;  // structural well-formedness
};

struct Classification {
  bool bottom_up_deterministic = false;
  bool top_down_deterministic = false;
  bool unambiguous = false;
};

struct automaton_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Remove states/transitions not occurring in an accepting computation.
// Throws automaton_error("empty language") if nothing remains.
TreeAutomaton trim(const TreeAutomaton& B);
bool is_trim(const TreeAutomaton& B);

Classification classify(const TreeAutomaton& B);

// All states h with an h-computation for ground t.
std::set<int> run(const TreeAutomaton& B, Term t);
bool accepts(const TreeAutomaton& B, Term t);
// All (h, h') with an (h,h')-computation on the context c (exactly one x1).
std::set<std::pair<int, int>> run_context(const TreeAutomaton& B, Term c);

// Least-fixpoint set of jointly inhabited state pairs (used by unambiguity
// and by the product construction).
std::set<std::pair<int, int>> joint_inhabited(const TreeAutomaton& B1,
                                              const TreeAutomaton& B2);

struct SubsetAutomaton {
  TreeAutomaton base;       // the bottom-up deterministic source
  TreeAutomaton automaton;  // B-top, trim, top-down deterministic
  std::vector<std::vector<int>> subsets;  // per B-top state: sorted base states
};

// The powerset construction B-top. Requires B trim and bottom-up deterministic.
SubsetAutomaton powerset_topdown(const TreeAutomaton& B);

// True iff L(B) = L(B-top): every tuple of every constructed transition is
// covered by some transition of B.
bool gate_equivalent(const TreeAutomaton& B, const SubsetAutomaton& Btop);

// Product automaton restricted to jointly inhabited, jointly co-reachable
// pairs; unambiguous when both inputs are; language = intersection.
TreeAutomaton product(const TreeAutomaton& B1, const TreeAutomaton& B2,
                      std::vector<std::pair<int, int>>* pair_states = nullptr);

// Exact language-equality of two unambiguous trim automata over one alphabet,
// via bottom-up subset determinization of both sides (with a state budget).
// Returns nullopt if the budget is exhausted.
std::optional<bool> language_equal(const TreeAutomaton& B1, const TreeAutomaton& B2,
                                   int state_budget = 4096);

// States whose domain is all of T_Sigma (the universal state "top"),
// detected by a greatest fixpoint over transitions.
std::set<int> universal_states(const TreeAutomaton& B);

}  // namespace tdtt
