#pragma once
// Inspection-need analysis and removal: per-rule needs, the satisfiability
// family over ground trees, generalized needs with shedding, the needs
// fixpoint, the buffered delay construction, and final inspection stripping.

#include "tdtt/normalform.hpp"
#include "tdtt/recognizability.hpp"

namespace tdtt {

// The deleted, non-universal child positions of one rule.
struct InspectionNeed {
  std::set<std::pair<int, int>> pairs;  // (child index j, advice state h)

  bool empty() const { return pairs.empty(); }
  auto operator<=>(const InspectionNeed&) const = default;
};

// A downward-closed family of subsets of `over`, kept as its maximal
// elements: the sub-needs simultaneously dischargeable so far.
struct SatFamily {
  InspectionNeed over;                  // M
  std::vector<InspectionNeed> maximal;  // sorted antichain; never empty

  bool contains(const InspectionNeed& m) const;
  auto operator<=>(const SatFamily&) const = default;
};

// A sequence of pending needs; the last pair lies farthest in the future and
// is the only one that may carry a nontrivial family. Empty = epsilon.
struct GenNeed {
  std::vector<std::pair<InspectionNeed, SatFamily>> seq;

  bool is_epsilon() const { return seq.empty(); }
  auto operator<=>(const GenNeed&) const = default;
};

std::string to_string(const AdviceTransducer& A, const GenNeed& g);

// eta of one rule: deleted children whose annotation is not universal.
InspectionNeed rule_need(const AdviceTransducer& A, const Rule& r);

// Shared recognizability tables over one top-down deterministic automaton.
class NeedAnalysis {
 public:
  explicit NeedAnalysis(const TreeAutomaton& B);

  const OrecTable& table(Term ground);

  // <<G,M>>: subsets of M dischargeable by pairwise-disjoint recognizable
  // subtree occurrences across the trees of the multiset G.
  SatFamily sat_family(const std::vector<Term>& G, const InspectionNeed& M);

  // [[p]]## : discharge the tail of alpha against the ground subtrees of
  // suffixes of the unary pattern p.
  GenNeed shed(Term p, const GenNeed& alpha);

  // [s]^S with its complementary prefix: s = u.v for the minimal suffix v
  // shedding every alpha in S to epsilon; nullopt when none does.
  std::optional<std::pair<Term, Term>> split_min(Term s,
                                                 const std::vector<GenNeed>& S);

 private:
  TreeAutomaton B_;
  std::map<uint32_t, OrecTable> tables_;
};

// [[tau]]# : the generalized need of a rule given its children's needs
// (keyed by child index). nullopt = some child pattern has no discharging
// suffix. count_ground_rhs: let a ground right-hand side's own subtrees enter
// the family of its pair (the construction's view); off, the per-tree
// analysis view.
std::optional<GenNeed> apply_rule_need(NeedAnalysis& ctx,
                                       const AdviceTransducer& A, const Rule& r,
                                       const std::map<int, GenNeed>& children,
                                       bool count_ground_rhs);

struct NeedsResult {
  bool success = true;
  std::map<int, std::set<GenNeed>> needs;  // per state: S[q]
  std::string reason;  // "need-length-bound" | "no-discharging-split"
  std::string detail;
};

// Least solution of the needs constraint system; lengths capped by |A|.
NeedsResult compute_needs(const AdviceTransducer& A,
                          bool count_ground_rhs = false);

struct DelayResult {
  bool success = false;
  AdviceTransducer transducer;  // inspection needs satisfied rule-by-rule
  std::vector<std::pair<int, Term>> buffers;  // per new state: (source q, u)
  std::string reason;  // "no-discharging-split" | "unsatisfiable-rule-need" |
                       // "buffer-bound" | "need-length-bound"
  std::string detail;
};

// Buffered delay construction on a canonical earliest input with top-down
// deterministic advice and a non-ground axiom.
DelayResult delay_outputs(const AdviceTransducer& A);

// Replace every rule's needed ground subtrees by checker transducers; input
// must have all rule needs satisfiable (as delay_outputs guarantees).
AdviceTransducer strip_inspection(const AdviceTransducer& A);

struct InspectionResult {
  bool success = false;
  AdviceTransducer transducer;  // without inspection
  AdviceTransducer delayed;     // with inspection but needs satisfied
  AdviceTransducer source;      // the canonical earliest input actually used
  std::map<int, std::set<GenNeed>> needs;        // S[q] on source
  std::vector<std::pair<int, Term>> buffers;     // of `delayed`
  std::string reason, detail;
};

// Decide whether the translation of A (with top-down deterministic advice)
// can be realized without inspection, and construct the witness.
InspectionResult remove_inspection(const AdviceTransducer& A, Mode mode);

}  // namespace tdtt
