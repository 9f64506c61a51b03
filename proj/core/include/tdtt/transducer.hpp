#pragma once
// Deterministic uniform-copying top-down tree transducers with advice:
// the model, validation, tree and context semantics, and the embedding of
// deterministic bottom-up transducers.

#include "tdtt/automata.hpp"

#include <map>
#include <optional>

namespace tdtt {

struct transducer_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One rule q(f(x1:h1,...,xk:hk)) -> rhs, where rhs is a term over the output
// alphabet with Call(q_j, j) leaves. Uniform copying: all calls on the same
// x_j use the same state.
struct Rule {
  int state;                    // q, index into states
  int sym;                      // interned input symbol f
  std::vector<int> child_advice;  // h_1..h_k, advice state indices
  Term rhs;

  std::vector<int> vars() const;  // J: variables occurring in rhs, sorted
  Term pattern() const;           // rhs with Call(q_j, j) replaced by Var(j)
};

struct AdviceTransducer {
  TreeAutomaton advice;  // B: trim, unambiguous
  RankedAlphabet output;
  std::vector<std::string> states;  // Q
  std::vector<int> iota;            // Q -> advice state
  // accepting advice state -> axiom: a ground term, or p . q(x1) encoded as a
  // term whose Call leaves are all Call(q, 1) for a single state q.
  std::map<int, Term> axioms;
  std::vector<Rule> rules;
  std::string name = "A";

  int state_id(std::string_view q) const;
  int add_state(const std::string& q, int advice_state);
  // state of a Call leaf in a rhs of this transducer
  int call_state(Term call) const { return state_id(call.call_state_name()); }
};

struct Validation {
  std::vector<std::string> errors;
  bool linear = false;
  bool advice_bottom_up = false;   // DT^r
  bool advice_top_down = false;    // DT^i
  bool without_inspection = false;  // deleted children are annotated with top

  bool valid() const { return errors.empty(); }
};

Validation validate(const AdviceTransducer& A);

// |A|: sum of axiom dag sizes plus, per rule, k+1 plus the rhs dag size.
int size(const AdviceTransducer& A);

// Stateful evaluator whose memo tables persist across calls (useful when
// evaluating many related inputs).
class Evaluator {
 public:
  explicit Evaluator(const AdviceTransducer& A) : A_(A) {}

  std::optional<Term> eval(Term t);       // the translation, or nullopt
  Term state(int q, Term t);              // [[t]]_{A,q}
  Term context(int q, Term c, int h_prime);
  const std::set<int>& advice_states(Term t);  // memoized run()

 private:
  const Rule* find_rule(int q, Term t);

  const AdviceTransducer& A_;
  std::map<uint32_t, std::set<int>> run_memo_;
  std::map<std::pair<int, uint32_t>, Term> memo_;
};

// The translation of A on ground t; nullopt when t is outside L(advice).
std::optional<Term> eval(const AdviceTransducer& A, Term t);

// [[t]]_{A,q}; throws "outside state domain" when t is not in dom(iota(q)).
Term eval_state(const AdviceTransducer& A, int q, Term t);

// Context semantics [[c]]^{h'}_{A,q} for a context c (exactly one x1):
// a ground term or u . q'(x1) encoded with Call(q', 1) leaves.
Term eval_context(const AdviceTransducer& A, int q, Term c, int h_prime);
// Axiom-level variant [[c]]^{h'}_A: applies alpha(h) for the unique accepting
// h with an (h,h')-computation on c.
Term eval_context_axiom(const AdviceTransducer& A, Term c, int h_prime);

// Embed a deterministic bottom-up transducer: advice states double as
// transducer states (iota = identity); rhs[i] is the output of transition i,
// a term over `output` with Var(j) leaves.
AdviceTransducer embed_bottom_up(const TreeAutomaton& B,
                                 const std::vector<Term>& rhs,
                                 const RankedAlphabet& output);

}  // namespace tdtt
