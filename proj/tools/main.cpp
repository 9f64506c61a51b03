// Command-line driver: text formats in, transducers and verdicts out.
//
// Exit codes: 0 = positive verdict, 1 = negative verdict, 2 = input error.

#include "CLI11.hpp"
#include "tdtt/inspection.hpp"
#include "tdtt/io.hpp"
#include "tdtt/lookahead.hpp"
#include "tdtt/oracle.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace tdtt;

namespace {

struct cli_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string mode = "uc";
  int depth = 5;
  std::string report;
  bool explain = false;

  Mode lattice() const { return mode == "lin" ? Mode::linear : Mode::uc; }
};

struct Verdict {
  std::string command;
  std::string outcome;  // success | failure
  std::string reason;
  std::string stage;
  std::string artifact;
  std::string detail;
};

void emit(const Options& opt, const Verdict& v) {
  // stderr keeps stdout a clean, re-parseable artifact
  if (v.outcome == "success")
    std::cerr << "verdict: success"
              << (v.artifact.empty() ? "" : " artifact=" + v.artifact) << "\n";
  else
    std::cerr << "verdict: failure (" << v.reason << ") at " << v.stage
              << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
  if (opt.report.empty()) return;
  std::ofstream f(opt.report, std::ios::app);
  f << "command=" << v.command << " outcome=" << v.outcome
    << " reason=" << (v.reason.empty() ? "-" : v.reason)
    << " stage=" << (v.stage.empty() ? "-" : v.stage)
    << " artifact=" << (v.artifact.empty() ? "-" : v.artifact)
    << " detail=" << v.detail << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw cli_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Document load(const std::string& path) { return parse_document(read_file(path)); }

const AdviceTransducer& transducer_of(const Document& d, const std::string& name) {
  if (name.empty()) {
    if (d.transducers.size() == 1) return d.transducers[0];
    throw cli_error("document has " + std::to_string(d.transducers.size()) +
                    " transducers; name one");
  }
  const AdviceTransducer* A = d.find_transducer(name);
  if (!A) throw cli_error("no transducer named " + name);
  return *A;
}

const TreeAutomaton& automaton_of(const Document& d, const std::string& name) {
  if (name.empty()) {
    if (d.automata.size() == 1) return d.automata[0];
    throw cli_error("document has " + std::to_string(d.automata.size()) +
                    " automata; name one");
  }
  const TreeAutomaton* B = d.find_automaton(name);
  if (!B) throw cli_error("no automaton named " + name);
  return *B;
}

// a re-parseable document for one transducer
std::string print_full(const AdviceTransducer& A) {
  Document d;
  std::string an = A.advice.name.empty() ? "B" : A.advice.name;
  d.alphabets.push_back({"s", A.advice.alphabet});
  d.automata.push_back(A.advice);
  d.automata.back().name = an;
  d.automaton_alphabet.push_back("s");
  d.transducers.push_back(A);
  d.transducers.back().name = A.name.empty() ? "A" : A.name;
  d.transducer_automaton.push_back(an);
  return print_document(d);
}

std::string print_aut_full(const TreeAutomaton& B) {
  Document d;
  d.alphabets.push_back({"s", B.alphabet});
  d.automata.push_back(B);
  d.automaton_alphabet.push_back("s");
  return print_document(d);
}

void print_flags(const Validation& v) {
  std::cout << "valid=" << (v.valid() ? "true" : "false")
            << " linear=" << (v.linear ? "true" : "false")
            << " advice_bottom_up=" << (v.advice_bottom_up ? "true" : "false")
            << " advice_top_down=" << (v.advice_top_down ? "true" : "false")
            << " without_inspection=" << (v.without_inspection ? "true" : "false")
            << "\n";
  for (const std::string& e : v.errors) std::cout << "error: " << e << "\n";
}

void print_needs(const AdviceTransducer& A,
                 const std::map<int, std::set<GenNeed>>& needs) {
  for (auto& [q, set] : needs) {
    std::cout << "S[" << A.states[q] << "] =";
    bool first = true;
    for (const GenNeed& g : set) {
      std::cout << (first ? " " : " ; ") << to_string(A, g);
      first = false;
    }
    std::cout << "\n";
  }
}

int run_pipeline(const Options& opt, const AdviceTransducer& A) {
  Validation v = validate(A);
  if (!v.valid()) {
    for (const std::string& e : v.errors) std::cerr << "error: " << e << "\n";
    return 2;
  }
  AdviceTransducer cur = A;
  if (!v.advice_top_down) {
    if (!v.advice_bottom_up) throw cli_error("advice is neither bottom-up nor top-down deterministic");
    RemovalResult r = remove_lookahead(cur, opt.lattice());
    if (!r.success) {
      emit(opt, {"pipeline", "failure", r.reason, "remove-lookahead", "", r.detail});
      return 1;
    }
    if (opt.explain)
      std::cout << "# after remove-lookahead\n" << print_full(r.transducer);
    cur = r.transducer;
  }
  InspectionResult ri = remove_inspection(cur, opt.lattice());
  if (!ri.success) {
    emit(opt, {"pipeline", "failure", ri.reason, "remove-inspection", "", ri.detail});
    return 1;
  }
  if (opt.explain) {
    print_needs(ri.source, ri.needs);
    for (size_t i = 0; i < ri.buffers.size(); ++i)
      std::cout << "# buffer " << ri.delayed.states[i] << " = ("
                << ri.source.states[ri.buffers[i].first] << ", "
                << to_string(ri.buffers[i].second) << ")\n";
  }
  std::cout << print_full(ri.transducer);
  if (auto w = oracle_equiv_domain(A, ri.transducer, opt.depth)) {
    emit(opt, {"pipeline", "failure", "certificate", "certificate", "",
               "counterexample " + to_string(*w)});
    return 2;
  }
  if (auto w = oracle_equiv_domain(ri.transducer, A, opt.depth)) {
    emit(opt, {"pipeline", "failure", "certificate", "certificate", "",
               "counterexample " + to_string(*w)});
    return 2;
  }
  std::cerr << "certificate: oracle-equiv depth=" << opt.depth << " ok\n";
  emit(opt, {"pipeline", "success", "", "", ri.transducer.name, ""});
  return 0;
}

int run_fuzz(const Options& opt, int count) {
  std::map<std::string, int> tally;
  for (int seed = 1; seed <= count; ++seed) {
    AdviceTransducer A = random_instance((uint64_t)seed);
    Validation v = validate(A);
    if (!v.valid()) throw cli_error("seed " + std::to_string(seed) + ": invalid instance");
    AdviceTransducer C = canonicalize(make_earliest(A, opt.lattice())).transducer;
    if (oracle_equiv(A, C, 3))
      throw cli_error("seed " + std::to_string(seed) + ": canonicalization changed the translation");
    if (!v.advice_bottom_up) {
      ++tally["skipped-advice"];
      continue;
    }
    RemovalResult r = remove_lookahead(A, opt.lattice());
    if (!r.success) {
      ++tally["lookahead-" + r.reason];
      RemovalResult r2 = remove_lookahead(A, opt.lattice());
      if (r2.reason != r.reason || r2.detail != r.detail)
        throw cli_error("seed " + std::to_string(seed) + ": unstable failure");
      continue;
    }
    ++tally["lookahead-success"];
    if (oracle_equiv(A, r.transducer, 3))
      throw cli_error("seed " + std::to_string(seed) + ": lookahead removal changed the translation");
    Document round = parse_document(print_full(r.transducer));
    if (!validate(round.transducers.at(0)).valid())
      throw cli_error("seed " + std::to_string(seed) + ": artifact does not re-validate");
    InspectionResult ri = remove_inspection(r.transducer, opt.lattice());
    if (ri.success) {
      ++tally["inspection-success"];
      if (oracle_equiv(r.transducer, ri.transducer, 3))
        throw cli_error("seed " + std::to_string(seed) + ": inspection removal changed the translation");
    } else {
      ++tally["inspection-" + ri.reason];
    }
  }
  std::cout << "seeds=" << count << "\n";
  for (auto& [k, n] : tally) std::cout << k << "=" << n << "\n";
  emit(opt, {"fuzz", "success", "", "", "", std::to_string(count) + " seeds"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic top-down tree transducers with advice"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--mode", opt.mode, "lattice: uc or lin")
      ->check(CLI::IsMember({"uc", "lin"}));
  app.add_option("--depth", opt.depth, "enumeration depth for oracles");
  app.add_option("--report", opt.report, "append verdict records to FILE");
  app.add_flag("--explain", opt.explain, "print intermediate artifacts");

  std::string file, name, name2, state, term_text;
  int count = 100;

  auto* c_validate = app.add_subcommand("validate", "validate a transducer");
  c_validate->add_option("file", file)->required();
  c_validate->add_option("name", name);

  auto* c_trim = app.add_subcommand("trim", "trim an automaton");
  c_trim->add_option("file", file)->required();
  c_trim->add_option("name", name);

  auto* c_classify = app.add_subcommand("classify", "classify an automaton");
  c_classify->add_option("file", file)->required();
  c_classify->add_option("name", name);

  auto* c_powerset = app.add_subcommand("powerset", "top-down powerset of an automaton");
  c_powerset->add_option("file", file)->required();
  c_powerset->add_option("name", name);

  auto* c_earliest = app.add_subcommand("earliest", "earliest form of a transducer");
  c_earliest->add_option("file", file)->required();
  c_earliest->add_option("name", name);

  auto* c_canon = app.add_subcommand("canonicalize", "canonical earliest form");
  c_canon->add_option("file", file)->required();
  c_canon->add_option("name", name);

  auto* c_equiv = app.add_subcommand("equiv", "decide equivalence of two transducers");
  c_equiv->add_option("file", file)->required();
  c_equiv->add_option("name1", name)->required();
  c_equiv->add_option("name2", name2)->required();

  auto* c_rla = app.add_subcommand("remove-lookahead", "realize without look-ahead");
  c_rla->add_option("file", file)->required();
  c_rla->add_option("name", name);

  auto* c_needs = app.add_subcommand("needs", "per-state generalized inspection needs");
  c_needs->add_option("file", file)->required();
  c_needs->add_option("name", name);

  auto* c_orec = app.add_subcommand("orec", "output-recognizability table");
  c_orec->add_option("file", file)->required();
  c_orec->add_option("state", state)->required();
  c_orec->add_option("term", term_text)->required();
  c_orec->add_option("name", name);

  auto* c_checker = app.add_subcommand("checker", "constant-output domain checker");
  c_checker->add_option("file", file)->required();
  c_checker->add_option("state", state)->required();
  c_checker->add_option("term", term_text)->required();
  c_checker->add_option("name", name);

  auto* c_ri = app.add_subcommand("remove-inspection", "realize without inspection");
  c_ri->add_option("file", file)->required();
  c_ri->add_option("name", name);

  auto* c_pipe = app.add_subcommand("pipeline", "remove look-ahead, then inspection");
  c_pipe->add_option("file", file)->required();
  c_pipe->add_option("name", name);

  auto* c_eval = app.add_subcommand("eval", "apply a transducer to a ground term");
  c_eval->add_option("file", file)->required();
  c_eval->add_option("term", term_text)->required();
  c_eval->add_option("name", name);

  auto* c_enum = app.add_subcommand("enumerate", "trees of an alphabet or automaton");
  c_enum->add_option("file", file)->required();
  c_enum->add_option("name", name);

  auto* c_oeq = app.add_subcommand("oracle-equiv", "brute-force equivalence to a depth");
  c_oeq->add_option("file", file)->required();
  c_oeq->add_option("name1", name)->required();
  c_oeq->add_option("name2", name2)->required();

  auto* c_fuzz = app.add_subcommand("fuzz", "seeded random pipeline exercise");
  c_fuzz->add_option("count", count);

  for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
    s->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    Document doc;
    if (!*c_fuzz) doc = load(file);
    if (*c_validate) {
      Validation v = validate(transducer_of(doc, name));
      print_flags(v);
      emit(opt, {"validate", v.valid() ? "success" : "failure", "", "validate", name, ""});
      return v.valid() ? 0 : 2;
    }
    if (*c_trim) {
      std::cout << print_aut_full(trim(automaton_of(doc, name)));
      return 0;
    }
    if (*c_classify) {
      Classification c = classify(automaton_of(doc, name));
      std::cout << "bottom_up_deterministic=" << (c.bottom_up_deterministic ? "true" : "false")
                << " top_down_deterministic=" << (c.top_down_deterministic ? "true" : "false")
                << " unambiguous=" << (c.unambiguous ? "true" : "false") << "\n";
      return 0;
    }
    if (*c_powerset) {
      TreeAutomaton B = trim(automaton_of(doc, name));
      SubsetAutomaton S = powerset_topdown(B);
      for (size_t i = 0; i < S.subsets.size(); ++i) {
        std::cout << "# " << S.automaton.states[i] << " = {";
        for (size_t j = 0; j < S.subsets[i].size(); ++j)
          std::cout << (j ? "," : "") << B.states[S.subsets[i][j]];
        std::cout << "}\n";
      }
      std::cout << print_aut_full(S.automaton);
      bool gate = gate_equivalent(B, S);
      std::cout << "gate_equivalent=" << (gate ? "true" : "false") << "\n";
      return gate ? 0 : 1;
    }
    if (*c_earliest) {
      std::cout << print_full(make_earliest(transducer_of(doc, name), opt.lattice()));
      return 0;
    }
    if (*c_canon) {
      AdviceTransducer E = make_earliest(transducer_of(doc, name), opt.lattice());
      CanonicalResult c = canonicalize(E);
      for (size_t i = 0; i < E.states.size(); ++i)
        std::cout << "# pi: " << E.states[i] << " -> "
                  << (c.pi[i] < 0 ? "(unreachable)" : c.transducer.states[c.pi[i]])
                  << "\n";
      std::cout << print_full(c.transducer);
      return 0;
    }
    if (*c_equiv) {
      EquivResult r = equivalent(transducer_of(doc, name), transducer_of(doc, name2), opt.lattice());
      std::cout << "equivalent=" << (r.equivalent ? "true" : "false")
                << " exact=" << (r.exact ? "true" : "false")
                << " confidence_depth=" << r.confidence_depth << "\n";
      if (r.witness) std::cout << "witness=" << to_string(*r.witness) << "\n";
      emit(opt, {"equiv", r.equivalent ? "success" : "failure", "", "equiv", "", ""});
      return r.equivalent ? 0 : 1;
    }
    if (*c_rla) {
      RemovalResult r = remove_lookahead(transducer_of(doc, name), opt.lattice());
      if (!r.success) {
        emit(opt, {"remove-lookahead", "failure", r.reason, "remove-lookahead", "", r.detail});
        return 1;
      }
      if (opt.explain) {
        std::cout << "# variation_bound=" << r.variation_bound << "\n";
        for (size_t i = 0; i < r.rho.size(); ++i)
          for (auto& [h, t] : r.rho[i].entries)
            std::cout << "# rho[" << r.transducer.states[i] << "] "
                      << r.source.advice.states[h] << " -> " << to_string(t) << "\n";
      }
      std::cout << print_full(r.transducer);
      emit(opt, {"remove-lookahead", "success", "", "", r.transducer.name, ""});
      return 0;
    }
    if (*c_needs) {
      const AdviceTransducer& A = transducer_of(doc, name);
      NeedsResult nr = compute_needs(A);
      if (!nr.success) {
        emit(opt, {"needs", "failure", nr.reason, "needs", "", nr.detail});
        return 1;
      }
      print_needs(A, nr.needs);
      return 0;
    }
    if (*c_orec || *c_checker) {
      TreeAutomaton B = automaton_of(doc, name);
      int h = B.state_id(state);
      Term s = parse_term(term_text);
      if (*c_checker) {
        AdviceTransducer C = build_checker(B, h, s);
        std::cout << print_full(C);
        emit(opt, {"checker", "success", "", "", C.name, ""});
        return 0;
      }
      OrecTable tbl = orec_table(B, s);
      std::cout << "recognizable=" << (tbl.recognizable(h, s) ? "true" : "false") << "\n";
      for (int h2 = 0; h2 < (int)B.states.size(); ++h2) {
        if (tbl.top.count(h2)) continue;
        if (!opt.explain && h2 != h) continue;
        std::cout << "minimal(" << B.states[h2] << ") = {";
        bool first = true;
        for (Term m : tbl.minimal(h2)) {
          std::cout << (first ? " " : ", ") << to_string(m);
          first = false;
        }
        std::cout << " }\n";
      }
      return tbl.recognizable(h, s) ? 0 : 1;
    }
    if (*c_ri) {
      InspectionResult r = remove_inspection(transducer_of(doc, name), opt.lattice());
      if (!r.success) {
        emit(opt, {"remove-inspection", "failure", r.reason, "remove-inspection", "", r.detail});
        return 1;
      }
      if (opt.explain) {
        print_needs(r.source, r.needs);
        std::cout << "# delayed form\n" << print_full(r.delayed);
      }
      std::cout << print_full(r.transducer);
      emit(opt, {"remove-inspection", "success", "", "", r.transducer.name, ""});
      return 0;
    }
    if (*c_pipe) return run_pipeline(opt, transducer_of(doc, name));
    if (*c_eval) {
      auto out = eval(transducer_of(doc, name), parse_term(term_text));
      std::cout << (out ? to_string(*out) : "undefined") << "\n";
      return out ? 0 : 1;
    }
    if (*c_enum) {
      if (const TreeAutomaton* B = name.empty() && doc.automata.size() == 1
                                       ? &doc.automata[0]
                                       : doc.find_automaton(name)) {
        for (int h : B->accepting)
          for (Term t : domain_trees(*B, h, opt.depth)) std::cout << to_string(t) << "\n";
        return 0;
      }
      const RankedAlphabet* a = doc.find_alphabet(name);
      if (!a && doc.alphabets.size() == 1 && name.empty()) a = &doc.alphabets[0].alphabet;
      if (!a) throw cli_error("no automaton or alphabet named " + name);
      for (Term t : enumerate_trees(*a, opt.depth)) std::cout << to_string(t) << "\n";
      return 0;
    }
    if (*c_oeq) {
      auto w = oracle_equiv(transducer_of(doc, name), transducer_of(doc, name2), opt.depth);
      if (w) {
        std::cout << "witness=" << to_string(*w) << "\n";
        return 1;
      }
      std::cout << "equivalent-to-depth=" << opt.depth << "\n";
      return 0;
    }
    if (*c_fuzz) return run_fuzz(opt, count);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
