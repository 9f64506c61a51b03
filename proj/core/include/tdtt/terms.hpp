#pragma once
// Ranked alphabets, hash-consed terms, and the unary-pattern monoid with its
// two prefix lattices.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdtt {

// Global string interner for symbol and state names.
int intern(std::string_view s);
const std::string& interned_name(int id);

struct Symbol {
  std::string name;
  int rank = 0;
};

struct RankedAlphabet {
  std::vector<Symbol> symbols;

  std::optional<int> rank_of(std::string_view name) const;
  bool has_symbol(std::string_view name) const { return rank_of(name).has_value(); }
  bool has_nullary() const;
  void check() const;  // unique names, nonempty
};

enum class Kind : uint8_t { Sym, Var, Call };

// Immutable hash-consed term handle. Sym(name, kids), Var(j), Call(state, j).
// Structural equality is identity equality.
class Term {
 public:
  Term() : id_(0) {}  // default: the term "x1" placeholder; avoid relying on it

  static Term sym(std::string_view name, const std::vector<Term>& kids = {});
  static Term sym(int name_id, const std::vector<Term>& kids);
  static Term var(int j);
  static Term call(std::string_view state, int j);
  static Term call(int state_id, int j);

  Kind kind() const;
  // Sym accessors
  int sym_id() const;
  const std::string& sym_name() const;
  int arity() const;
  Term child(int i) const;
  std::vector<Term> children() const;
  // Var accessor
  int var_index() const;
  // Call accessors
  int call_state() const;
  const std::string& call_state_name() const;
  int call_var() const;

  bool operator==(const Term& o) const { return id_ == o.id_; }
  bool operator!=(const Term& o) const { return id_ != o.id_; }
  bool operator<(const Term& o) const { return id_ < o.id_; }
  uint32_t id() const { return id_; }

 private:
  explicit Term(uint32_t id) : id_(id) {}
  uint32_t id_;
  friend struct TermStore;
};

// --- basic term utilities ---

bool is_ground(Term t);              // no Var, no Call
bool contains_var(Term t, int j);
bool contains_any_var(Term t);
bool contains_call(Term t);
std::vector<int> var_indices(Term t);   // sorted distinct Var indices
int depth(Term t);                      // leaves and Call nodes have depth 1
int node_count(Term t);                 // tree nodes (not dag)
int dag_size(Term t);                   // unique nodes + edges (shared counted once)

// Positions are root-to-node child-index paths (1-based indices).
using Pos = std::vector<int>;
Term subtree_at(Term t, const Pos& p);
Term replace_at(Term t, const Pos& p, Term s);
std::vector<Pos> var_positions(Term t, int j);   // positions of Var(j), preorder
std::vector<Pos> call_positions(Term t);         // positions of Call leaves, preorder

// Substitute Var(j) -> f(j) wherever f yields a value; Calls untouched.
Term subst_vars(Term t, const std::vector<std::pair<int, Term>>& m);
// Substitute every Call leaf via f(state_id, var_index).
template <class F>
Term subst_calls(Term t, F&& f);

// distinct subtrees of t (including t), no duplicates, preorder discovery
std::vector<Term> distinct_subtrees(Term t);

// --- unary-pattern monoid and prefix lattices ---

// A unary pattern is a Term over output symbols whose only variables are
// Var(1); ground terms are patterns too. Bottom is represented externally
// as an empty optional.
using Pat = std::optional<Term>;  // nullopt = the bottom element of P_Delta

inline bool is_bottom(const Pat& p) { return !p.has_value(); }

// u . v : substitution of v into every x1 of u. Identity element is x1.
Term compose(Term u, Term v);

// Order test: a <= b iff a = bottom or a = b{x1 -> s} for some s.
bool pattern_leq(const Pat& a, const Pat& b);
// If t = u{x1 -> r} for a single r, return r.
std::optional<Term> strip_prefix(Term u, Term t);

// Unique factorization into irreducible factors (input must contain x1).
std::vector<Term> factorize(Term u);
// All monoid suffixes of u, shortest first, starting with x1.
std::vector<Term> suffixes(Term u);

// Least upper bounds. Bottom inputs are absorbed; the lub of an empty or
// all-bottom family is bottom.
Pat lub(const std::vector<Pat>& elems);
Pat lub1(const std::vector<Pat>& elems);  // within P_Delta^(1)

// Number of x1 occurrences (0 for ground).
int hole_count(Term t);

// Multiset of maximal ground subtrees (no Var, no Call inside).
std::vector<Term> max_ground_subtrees(Term t);

// --- parse/print (term-level; full object grammar lives in io.hpp) ---
std::string to_string(Term t);
std::string to_string(const Pat& p);

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- template impl ---
template <class F>
Term subst_calls(Term t, F&& f) {
  // memoized per invocation: shared subterms are rewritten once
  std::unordered_map<uint32_t, Term> memo;
  auto go = [&](auto&& self, Term u) -> Term {
    switch (u.kind()) {
      case Kind::Var: return u;
      case Kind::Call: return f(u.call_state(), u.call_var());
      case Kind::Sym: {
        auto it = memo.find(u.id());
        if (it != memo.end()) return it->second;
        std::vector<Term> kids;
        kids.reserve(u.arity());
        bool changed = false;
        for (int i = 0; i < u.arity(); ++i) {
          Term c = self(self, u.child(i));
          changed |= (c != u.child(i));
          kids.push_back(c);
        }
        Term r = changed ? Term::sym(u.sym_id(), kids) : u;
        memo.emplace(u.id(), r);
        return r;
      }
    }
    throw std::logic_error("bad kind");
  };
  return go(go, t);
}

}  // namespace tdtt
