#pragma once
// Text formats: alphabets, automata, transducers, and ground terms.
//
//   alphabet s { f/2 a/0 }
//   automaton B over s { states h0 h1; accept h0; h0 <- f(h1,h0); h1 <- a; }
//   transducer A over B { state q0 : h0; axiom h0 = f(a, q0(x1));
//                         rule q0(f(x1:h1, x2:h2)) -> g(q1(x1), b); }
//
// Rule annotations may be omitted when the advice automaton is top-down
// deterministic; the parser fills them in.

#include "tdtt/transducer.hpp"

namespace tdtt {

struct NamedAlphabet {
  std::string name;
  RankedAlphabet alphabet;
};

struct Document {
  std::vector<NamedAlphabet> alphabets;
  std::vector<TreeAutomaton> automata;            // .name is the declared name
  std::vector<std::string> automaton_alphabet;    // parallel: alphabet name
  std::vector<AdviceTransducer> transducers;      // .name is the declared name
  std::vector<std::string> transducer_automaton;  // parallel: automaton name

  const RankedAlphabet* find_alphabet(std::string_view name) const;
  const TreeAutomaton* find_automaton(std::string_view name) const;
  const AdviceTransducer* find_transducer(std::string_view name) const;
};

// Parse a document; parse_error messages carry line:column.
Document parse_document(std::string_view text);

// Ground term (or context with x1): no state calls.
Term parse_term(std::string_view text);

std::string print_alphabet(const NamedAlphabet& a);
std::string print_automaton(const TreeAutomaton& B, std::string_view alphabet_name);
std::string print_transducer(const AdviceTransducer& A, std::string_view automaton_name);
std::string print_document(const Document& d);

}  // namespace tdtt
