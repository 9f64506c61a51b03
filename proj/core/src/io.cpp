#include "tdtt/io.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace tdtt {

const RankedAlphabet* Document::find_alphabet(std::string_view name) const {
  for (auto& a : alphabets)
    if (a.name == name) return &a.alphabet;
  return nullptr;
}

const TreeAutomaton* Document::find_automaton(std::string_view name) const {
  for (auto& b : automata)
    if (b.name == name) return &b;
  return nullptr;
}

const AdviceTransducer* Document::find_transducer(std::string_view name) const {
  for (auto& t : transducers)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

struct Lexer {
  std::string_view src;
  size_t pos = 0;
  int line = 1, col = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {  // comment to end of line
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else if (std::isspace((unsigned char)c)) {
        if (c == '\n') {
          ++line;
          col = 0;
        }
        ++pos;
        ++col;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_ws();
    return pos == src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool try_punct(std::string_view p) {
    skip_ws();
    if (src.substr(pos, p.size()) != p) return false;
    pos += p.size();
    col += (int)p.size();
    return true;
  }

  void expect(std::string_view p) {
    if (!try_punct(p)) fail("expected '" + std::string(p) + "'");
  }

  bool ident_start(char c) { return std::isalnum((unsigned char)c) || c == '_' ||
                                    c == '<' || c == '>' || c == '\'' || c == ','; }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    int angle = 0;
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '<') ++angle;
      if (c == '>') {
        if (!angle) break;
        --angle;
      }
      if (c == ',' && !angle) break;
      if (!(std::isalnum((unsigned char)c) || c == '_' || c == '\'' || c == '<' ||
            c == '>' || c == ','))
        break;
      ++pos;
      ++col;
    }
    if (pos == start) fail("expected identifier");
    return std::string(src.substr(start, pos - start));
  }

  int number() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() && std::isdigit((unsigned char)src[pos])) {
      ++pos;
      ++col;
    }
    if (pos == start) fail("expected number");
    return std::stoi(std::string(src.substr(start, pos - start)));
  }
};

std::optional<int> var_of(std::string_view name) {
  if (name.size() < 2 || name[0] != 'x') return std::nullopt;
  for (size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit((unsigned char)name[i])) return std::nullopt;
  return std::stoi(std::string(name.substr(1)));
}

struct Parser {
  Lexer lx;
  Document doc;

  // terms in rule/axiom right-hand sides: `states` maps declared state names
  Term term(const std::map<std::string, int>* states) {
    std::string head = lx.ident();
    if (auto j = var_of(head)) return Term::var(*j);
    if (!lx.try_punct("(")) {
      if (states && states->count(head)) lx.fail("state " + head + " needs an argument");
      return Term::sym(head);
    }
    if (states && states->count(head)) {
      std::string arg = lx.ident();
      auto j = var_of(arg);
      if (!j) lx.fail("state call argument must be a variable");
      lx.expect(")");
      return Term::call(head, *j);
    }
    std::vector<Term> kids;
    if (!lx.try_punct(")")) {
      kids.push_back(term(states));
      while (lx.try_punct(",")) kids.push_back(term(states));
      lx.expect(")");
    }
    return Term::sym(head, kids);
  }

  void alphabet() {
    NamedAlphabet a;
    a.name = lx.ident();
    lx.expect("{");
    while (!lx.try_punct("}")) {
      Symbol s;
      s.name = lx.ident();
      lx.expect("/");
      s.rank = lx.number();
      a.alphabet.symbols.push_back(s);
    }
    a.alphabet.check();
    doc.alphabets.push_back(std::move(a));
  }

  void automaton() {
    TreeAutomaton B;
    B.name = lx.ident();
    if (lx.ident() != "over") lx.fail("expected 'over'");
    std::string aname = lx.ident();
    const RankedAlphabet* alpha = doc.find_alphabet(aname);
    if (!alpha) lx.fail("unknown alphabet " + aname);
    B.alphabet = *alpha;
    lx.expect("{");
    if (lx.ident() != "states") lx.fail("expected 'states'");
    while (lx.peek() != ';') B.add_state(lx.ident());
    lx.expect(";");
    if (lx.ident() != "accept") lx.fail("expected 'accept'");
    while (lx.peek() != ';') B.accepting.insert(B.state_id(lx.ident()));
    lx.expect(";");
    while (!lx.try_punct("}")) {
      Transition t;
      t.target = B.state_id(lx.ident());
      lx.expect("<-");
      t.sym = intern(lx.ident());
      if (lx.try_punct("(")) {
        if (!lx.try_punct(")")) {
          t.children.push_back(B.state_id(lx.ident()));
          while (lx.try_punct(",")) t.children.push_back(B.state_id(lx.ident()));
          lx.expect(")");
        }
      }
      lx.expect(";");
      B.transitions.push_back(std::move(t));
    }
    try {
      B.check();
    } catch (const automaton_error& e) {
      lx.fail(e.what());
    }
    doc.automata.push_back(std::move(B));
    doc.automaton_alphabet.push_back(aname);
  }

  void transducer() {
    AdviceTransducer A;
    A.name = lx.ident();
    if (lx.ident() != "over") lx.fail("expected 'over'");
    std::string bname = lx.ident();
    const TreeAutomaton* B = doc.find_automaton(bname);
    if (!B) lx.fail("unknown automaton " + bname);
    A.advice = *B;
    std::map<std::string, int> states;
    lx.expect("{");
    std::vector<std::pair<int, Term>> axioms;
    struct RawRule {
      int state, sym;
      std::vector<std::optional<int>> annot;
      Term rhs;
      int line, col;
    };
    std::vector<RawRule> raw;
    while (!lx.try_punct("}")) {
      std::string kw = lx.ident();
      if (kw == "state") {
        std::string q = lx.ident();
        lx.expect(":");
        std::string h = lx.ident();
        if (states.count(q)) lx.fail("duplicate state " + q);
        states[q] = A.add_state(q, A.advice.state_id(h));
      } else if (kw == "axiom") {
        int h = A.advice.state_id(lx.ident());
        lx.expect("=");
        axioms.emplace_back(h, Term());
        axioms.back().second = term(&states);
      } else if (kw == "rule") {
        RawRule r{0, 0, {}, Term(), lx.line, lx.col};
        std::string q = lx.ident();
        if (!states.count(q)) lx.fail("unknown state " + q);
        r.state = states[q];
        lx.expect("(");
        r.sym = intern(lx.ident());
        if (lx.try_punct("(")) {
          if (!lx.try_punct(")")) {
            int n = 0;
            do {
              ++n;
              std::string v = lx.ident();
              if (var_of(v) != n) lx.fail("expected x" + std::to_string(n));
              if (lx.try_punct(":"))
                r.annot.push_back(A.advice.state_id(lx.ident()));
              else
                r.annot.emplace_back();
            } while (lx.try_punct(","));
            lx.expect(")");
          }
        }
        lx.expect(")");
        lx.expect("->");
        r.rhs = term(&states);
        raw.push_back(std::move(r));
      } else {
        lx.fail("expected state/axiom/rule, got '" + kw + "'");
      }
      lx.expect(";");
    }
    for (auto& [h, t] : axioms) A.axioms.emplace(h, t);
    // fill omitted annotations from the (unique) advice transition
    for (RawRule& r : raw) {
      Rule rule{r.state, r.sym, {}, r.rhs};
      bool complete = true;
      for (auto& a : r.annot) complete &= a.has_value();
      if (complete) {
        for (auto& a : r.annot) rule.child_advice.push_back(*a);
      } else {
        const Transition* found = nullptr;
        for (const Transition& t : A.advice.transitions) {
          if (t.target != A.iota[r.state] || t.sym != r.sym ||
              t.children.size() != r.annot.size())
            continue;
          bool ok = true;
          for (size_t i = 0; i < r.annot.size(); ++i)
            if (r.annot[i] && *r.annot[i] != t.children[i]) ok = false;
          if (!ok) continue;
          if (found)
            throw parse_error(std::to_string(r.line) + ":" + std::to_string(r.col) +
                              ": ambiguous omitted annotation");
          found = &t;
        }
        if (!found)
          throw parse_error(std::to_string(r.line) + ":" + std::to_string(r.col) +
                            ": no advice transition matches this rule");
        rule.child_advice = found->children;
      }
      A.rules.push_back(std::move(rule));
    }
    // infer the output alphabet from axioms and right-hand sides
    std::map<std::string, int> out;
    auto walk = [&](auto&& self, Term t) -> void {
      if (t.kind() != Kind::Sym) return;
      auto [it, fresh] = out.emplace(t.sym_name(), t.arity());
      if (!fresh && it->second != t.arity())
        throw parse_error("output symbol " + t.sym_name() + " used with ranks " +
                          std::to_string(it->second) + " and " +
                          std::to_string(t.arity()));
      for (int i = 0; i < t.arity(); ++i) self(self, t.child(i));
    };
    for (auto& [h, t] : A.axioms) walk(walk, t);
    for (auto& r : A.rules) walk(walk, r.rhs);
    for (auto& [name, rank] : out) A.output.symbols.push_back({name, rank});
    doc.transducers.push_back(std::move(A));
    doc.transducer_automaton.push_back(bname);
  }

  Document run() {
    while (!lx.at_end()) {
      std::string kw = lx.ident();
      if (kw == "alphabet")
        alphabet();
      else if (kw == "automaton")
        automaton();
      else if (kw == "transducer")
        transducer();
      else
        lx.fail("expected alphabet/automaton/transducer, got '" + kw + "'");
    }
    return std::move(doc);
  }
};

}  // namespace

Document parse_document(std::string_view text) {
  Parser p{Lexer{text}};
  return p.run();
}

Term parse_term(std::string_view text) {
  Parser p{Lexer{text}};
  Term t = p.term(nullptr);
  if (!p.lx.at_end()) p.lx.fail("trailing input after term");
  return t;
}

std::string print_alphabet(const NamedAlphabet& a) {
  std::ostringstream os;
  os << "alphabet " << a.name << " {";
  for (auto& s : a.alphabet.symbols) os << " " << s.name << "/" << s.rank;
  os << " }\n";
  return os.str();
}

std::string print_automaton(const TreeAutomaton& B, std::string_view alphabet_name) {
  std::ostringstream os;
  os << "automaton " << B.name << " over " << alphabet_name << " {\n  states";
  for (auto& s : B.states) os << " " << s;
  os << ";\n  accept";
  for (int h : B.accepting) os << " " << B.states[h];
  os << ";\n";
  for (auto& t : B.transitions) {
    os << "  " << B.states[t.target] << " <- " << interned_name(t.sym);
    if (!t.children.empty()) {
      os << "(";
      for (size_t i = 0; i < t.children.size(); ++i)
        os << (i ? "," : "") << B.states[t.children[i]];
      os << ")";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string print_transducer(const AdviceTransducer& A, std::string_view automaton_name) {
  std::ostringstream os;
  os << "transducer " << A.name << " over " << automaton_name << " {\n";
  for (size_t q = 0; q < A.states.size(); ++q)
    os << "  state " << A.states[q] << " : " << A.advice.states[A.iota[q]] << ";\n";
  for (auto& [h, t] : A.axioms)
    os << "  axiom " << A.advice.states[h] << " = " << to_string(t) << ";\n";
  for (auto& r : A.rules) {
    os << "  rule " << A.states[r.state] << "(" << interned_name(r.sym);
    if (!r.child_advice.empty()) {
      os << "(";
      for (size_t i = 0; i < r.child_advice.size(); ++i)
        os << (i ? ", " : "") << "x" << i + 1 << ":"
           << A.advice.states[r.child_advice[i]];
      os << ")";
    }
    os << ") -> " << to_string(r.rhs) << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string print_document(const Document& d) {
  std::string out;
  for (auto& a : d.alphabets) out += print_alphabet(a);
  for (size_t i = 0; i < d.automata.size(); ++i)
    out += print_automaton(d.automata[i], d.automaton_alphabet[i]);
  for (size_t i = 0; i < d.transducers.size(); ++i)
    out += print_transducer(d.transducers[i], d.transducer_automaton[i]);
  return out;
}

}  // namespace tdtt
