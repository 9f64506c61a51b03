#include "tdtt/terms.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tdtt {

// ---------------- interners ----------------

namespace {

struct NameTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
};
NameTable& names() {
  static NameTable t;
  return t;
}

struct NodeData {
  Kind kind;
  int a;  // Sym: name id; Var: index; Call: state id
  int b;  // Call: variable index
  std::vector<uint32_t> kids;
};

struct NodeKey {
  const NodeData* d;
  bool operator==(const NodeKey& o) const {
    return d->kind == o.d->kind && d->a == o.d->a && d->b == o.d->b && d->kids == o.d->kids;
  }
};
struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    size_t h = std::hash<int>()((int)k.d->kind * 1000003 + k.d->a * 31 + k.d->b);
    for (uint32_t c : k.d->kids) h = h * 1000000007u + c;
    return h;
  }
};

}  // namespace

int intern(std::string_view s) {
  auto& t = names();
  auto it = t.ids.find(std::string(s));
  if (it != t.ids.end()) return it->second;
  int id = (int)t.names.size();
  t.names.emplace_back(s);
  t.ids.emplace(t.names.back(), id);
  return id;
}
const std::string& interned_name(int id) { return names().names.at(id); }

namespace {

struct TermStoreImpl {
  // deque: node addresses stay stable, the key map stores pointers into it
  std::deque<NodeData> nodes;
  std::unordered_map<NodeKey, uint32_t, NodeKeyHash> map;
};
TermStoreImpl& store() {
  static TermStoreImpl* s = [] {
    auto* st = new TermStoreImpl;
    // id 0 is x1 so a default Term is well-formed
    NodeData d{Kind::Var, 1, 0, {}};
    st->nodes.push_back(d);
    st->map.emplace(NodeKey{&st->nodes[0]}, 0u);
    return st;
  }();
  return *s;
}

uint32_t intern_node(NodeData&& d) {
  auto& s = store();
  auto it = s.map.find(NodeKey{&d});
  if (it != s.map.end()) return it->second;
  uint32_t id = (uint32_t)s.nodes.size();
  s.nodes.push_back(std::move(d));
  s.map.emplace(NodeKey{&s.nodes.back()}, id);
  return id;
}

const NodeData& node(uint32_t id) { return store().nodes[id]; }

}  // namespace

}  // namespace tdtt

// Term factory/accessors
namespace tdtt {

struct TermStore {
  static Term make(uint32_t id) { return Term(id); }
};

Term Term::sym(std::string_view name, const std::vector<Term>& kids) {
  return sym(intern(name), kids);
}
Term Term::sym(int name_id, const std::vector<Term>& kids) {
  NodeData d{Kind::Sym, name_id, 0, {}};
  d.kids.reserve(kids.size());
  for (Term k : kids) d.kids.push_back(k.id());
  return TermStore::make(intern_node(std::move(d)));
}
Term Term::var(int j) {
  if (j < 1) throw std::invalid_argument("variable index must be >= 1");
  return TermStore::make(intern_node(NodeData{Kind::Var, j, 0, {}}));
}
Term Term::call(std::string_view state, int j) { return call(intern(state), j); }
Term Term::call(int state_id, int j) {
  return TermStore::make(intern_node(NodeData{Kind::Call, state_id, j, {}}));
}

Kind Term::kind() const { return node(id_).kind; }
int Term::sym_id() const { return node(id_).a; }
const std::string& Term::sym_name() const { return interned_name(node(id_).a); }
int Term::arity() const { return (int)node(id_).kids.size(); }
Term Term::child(int i) const { return TermStore::make(node(id_).kids[i]); }
std::vector<Term> Term::children() const {
  std::vector<Term> out;
  out.reserve(arity());
  for (uint32_t k : node(id_).kids) out.push_back(TermStore::make(k));
  return out;
}
int Term::var_index() const { return node(id_).a; }
int Term::call_state() const { return node(id_).a; }
const std::string& Term::call_state_name() const { return interned_name(node(id_).a); }
int Term::call_var() const { return node(id_).b; }

// ---------------- alphabet ----------------

std::optional<int> RankedAlphabet::rank_of(std::string_view name) const {
  for (const auto& s : symbols)
    if (s.name == name) return s.rank;
  return std::nullopt;
}
bool RankedAlphabet::has_nullary() const {
  for (const auto& s : symbols)
    if (s.rank == 0) return true;
  return false;
}
void RankedAlphabet::check() const {
  if (symbols.empty()) throw std::invalid_argument("alphabet must have at least one symbol");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.rank < 0) throw std::invalid_argument("negative rank");
    if (!seen.insert(s.name).second)
      throw std::invalid_argument("duplicate symbol name: " + s.name);
  }
}

// ---------------- basic utilities ----------------

// Terms are immutable and never reclaimed, so per-node attributes live in
// global caches; the recursions below then cost one visit per dag node even
// on heavily shared terms.

bool is_ground(Term t) {
  if (t.kind() != Kind::Sym) return false;
  static std::unordered_map<uint32_t, bool> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  bool r = true;
  for (int i = 0; i < t.arity() && r; ++i) r = is_ground(t.child(i));
  cache.emplace(t.id(), r);
  return r;
}

bool contains_var(Term t, int j) {
  switch (t.kind()) {
    case Kind::Var: return t.var_index() == j;
    case Kind::Call: return false;
    case Kind::Sym: break;
  }
  static std::unordered_map<uint64_t, bool> cache;
  uint64_t key = ((uint64_t)t.id() << 32) | (uint32_t)j;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  bool r = false;
  for (int i = 0; i < t.arity() && !r; ++i) r = contains_var(t.child(i), j);
  cache.emplace(key, r);
  return r;
}

bool contains_any_var(Term t) {
  switch (t.kind()) {
    case Kind::Var: return true;
    case Kind::Call: return false;
    case Kind::Sym: break;
  }
  static std::unordered_map<uint32_t, bool> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  bool r = false;
  for (int i = 0; i < t.arity() && !r; ++i) r = contains_any_var(t.child(i));
  cache.emplace(t.id(), r);
  return r;
}

bool contains_call(Term t) {
  switch (t.kind()) {
    case Kind::Var: return false;
    case Kind::Call: return true;
    case Kind::Sym: break;
  }
  static std::unordered_map<uint32_t, bool> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  bool r = false;
  for (int i = 0; i < t.arity() && !r; ++i) r = contains_call(t.child(i));
  cache.emplace(t.id(), r);
  return r;
}

std::vector<int> var_indices(Term t) {
  if (t.kind() == Kind::Var) return {t.var_index()};
  if (t.kind() == Kind::Call) return {};
  static std::unordered_map<uint32_t, std::vector<int>> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  std::set<int> s;
  for (int i = 0; i < t.arity(); ++i)
    for (int j : var_indices(t.child(i))) s.insert(j);
  std::vector<int> r(s.begin(), s.end());
  cache.emplace(t.id(), r);
  return r;
}

int depth(Term t) {
  if (t.kind() != Kind::Sym || t.arity() == 0) return 1;
  static std::unordered_map<uint32_t, int> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  int d = 0;
  for (int i = 0; i < t.arity(); ++i) d = std::max(d, depth(t.child(i)));
  cache.emplace(t.id(), d + 1);
  return d + 1;
}

int node_count(Term t) {
  if (t.kind() != Kind::Sym) return 1;
  static std::unordered_map<uint32_t, int> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  // saturate: shared subterms make tree sizes outgrow any integer type
  long long n = 1;
  for (int i = 0; i < t.arity(); ++i) n += node_count(t.child(i));
  int r = (int)std::min<long long>(n, std::numeric_limits<int>::max());
  cache.emplace(t.id(), r);
  return r;
}

int dag_size(Term t) {
  std::unordered_set<uint32_t> seen;
  int nodes_n = 0, edges = 0;
  std::function<void(Term)> go = [&](Term u) {
    if (!seen.insert(u.id()).second) return;
    ++nodes_n;
    if (u.kind() == Kind::Sym) {
      edges += u.arity();
      for (int i = 0; i < u.arity(); ++i) go(u.child(i));
    }
  };
  go(t);
  return nodes_n + edges;
}

Term subtree_at(Term t, const Pos& p) {
  Term u = t;
  for (int i : p) {
    if (u.kind() != Kind::Sym || i < 1 || i > u.arity())
      throw std::out_of_range("bad position");
    u = u.child(i - 1);
  }
  return u;
}

Term replace_at(Term t, const Pos& p, Term s) {
  std::function<Term(Term, size_t)> go = [&](Term u, size_t k) -> Term {
    if (k == p.size()) return s;
    std::vector<Term> kids = u.children();
    kids[p[k] - 1] = go(u.child(p[k] - 1), k + 1);
    return Term::sym(u.sym_id(), kids);
  };
  return go(t, 0);
}

static void collect_positions(Term t, Pos& cur, std::vector<Pos>& out,
                              const std::function<bool(Term)>& pred) {
  if (pred(t)) out.push_back(cur);
  if (t.kind() == Kind::Sym)
    for (int i = 0; i < t.arity(); ++i) {
      cur.push_back(i + 1);
      collect_positions(t.child(i), cur, out, pred);
      cur.pop_back();
    }
}

std::vector<Pos> var_positions(Term t, int j) {
  std::vector<Pos> out;
  Pos cur;
  collect_positions(t, cur, out,
                    [j](Term u) { return u.kind() == Kind::Var && u.var_index() == j; });
  return out;
}

std::vector<Pos> call_positions(Term t) {
  std::vector<Pos> out;
  Pos cur;
  collect_positions(t, cur, out, [](Term u) { return u.kind() == Kind::Call; });
  return out;
}

Term subst_vars(Term t, const std::vector<std::pair<int, Term>>& m) {
  std::unordered_map<uint32_t, Term> memo;
  std::function<Term(Term)> go = [&](Term u) -> Term {
    switch (u.kind()) {
      case Kind::Var:
        for (auto& [j, s] : m)
          if (j == u.var_index()) return s;
        return u;
      case Kind::Call: return u;
      case Kind::Sym: {
        auto it = memo.find(u.id());
        if (it != memo.end()) return it->second;
        std::vector<Term> kids;
        kids.reserve(u.arity());
        bool changed = false;
        for (int i = 0; i < u.arity(); ++i) {
          Term c = go(u.child(i));
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
  return go(t);
}

std::vector<Term> distinct_subtrees(Term t) {
  std::vector<Term> out;
  std::unordered_set<uint32_t> seen;
  std::function<void(Term)> go = [&](Term u) {
    if (!seen.insert(u.id()).second) return;
    out.push_back(u);
    if (u.kind() == Kind::Sym)
      for (int i = 0; i < u.arity(); ++i) go(u.child(i));
  };
  go(t);
  return out;
}

// ---------------- monoid & lattices ----------------

int hole_count(Term t) {
  switch (t.kind()) {
    case Kind::Var: return t.var_index() == 1 ? 1 : 0;
    case Kind::Call: return 0;
    case Kind::Sym: break;
  }
  static std::unordered_map<uint32_t, int> cache;
  auto it = cache.find(t.id());
  if (it != cache.end()) return it->second;
  long long n = 0;
  for (int i = 0; i < t.arity(); ++i) n += hole_count(t.child(i));
  int r = (int)std::min<long long>(n, std::numeric_limits<int>::max());
  cache.emplace(t.id(), r);
  return r;
}

Term compose(Term u, Term v) { return subst_vars(u, {{1, v}}); }

std::optional<Term> strip_prefix(Term u, Term t) {
  // find r with u{x1 -> r} == t: read r off t under one hole of u, then let
  // the (memoized) substitution check the whole equation at dag cost
  if (hole_count(u) == 0) {
    // ground prefix: t must equal u exactly; residual is arbitrary — report x1
    if (u == t) return Term::var(1);
    return std::nullopt;
  }
  Term p = u, s = t;
  while (!(p.kind() == Kind::Var && p.var_index() == 1)) {
    if (p.kind() != Kind::Sym || s.kind() != Kind::Sym ||
        p.sym_id() != s.sym_id() || p.arity() != s.arity())
      return std::nullopt;
    int i = 0;
    while (hole_count(p.child(i)) == 0) ++i;
    p = p.child(i);
    s = s.child(i);
  }
  Term r = s;
  if (subst_vars(u, {{1, r}}) != t) return std::nullopt;
  return r;
}

bool pattern_leq(const Pat& a, const Pat& b) {
  if (is_bottom(a)) return true;
  if (is_bottom(b)) return false;
  if (*a == *b) return true;
  if (hole_count(*b) == 0) return false;
  return strip_prefix(*b, *a).has_value();
}

namespace {

// replace maximal occurrences of subtree v in u by x1 (top-down)
Term replace_occurrences(Term u, Term v) {
  if (u == v) return Term::var(1);
  if (u.kind() != Kind::Sym) return u;
  std::vector<Term> kids;
  kids.reserve(u.arity());
  for (int i = 0; i < u.arity(); ++i) kids.push_back(replace_occurrences(u.child(i), v));
  return Term::sym(u.sym_id(), kids);
}

}  // namespace

std::vector<Term> factorize(Term u) {
  if (hole_count(u) == 0) throw std::invalid_argument("factorize: ground input");
  Term x1 = Term::var(1);
  if (u == x1) return {};  // empty product = identity
  // candidates for the largest proper right divisor: subtrees on the path
  // from the root to one x1 occurrence, largest first
  Pos p = var_positions(u, 1).front();
  for (size_t k = 1; k <= p.size(); ++k) {
    Pos q(p.begin(), p.begin() + k);
    Term v = subtree_at(u, q);
    if (v == u) continue;
    if (v == x1) break;  // only trivial divisor left: u is irreducible
    Term w = replace_occurrences(u, v);
    if (compose(w, v) == u) {
      std::vector<Term> rest = factorize(v);
      std::vector<Term> out{w};
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
  }
  return {u};  // irreducible
}

std::vector<Term> suffixes(Term u) {
  std::vector<Term> fs = factorize(u);
  std::vector<Term> out{Term::var(1)};
  Term acc = Term::var(1);
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
    acc = compose(*it, acc);
    out.push_back(acc);
  }
  return out;
}

namespace {

bool all_same(const std::vector<Term>& ts) {
  for (Term t : ts)
    if (t != ts[0]) return false;
  return true;
}

bool same_sym_heads(const std::vector<Term>& ts) {
  Term t0 = ts[0];
  if (t0.kind() != Kind::Sym) return false;
  for (Term t : ts)
    if (t.kind() != Kind::Sym || t.sym_id() != t0.sym_id() || t.arity() != t0.arity())
      return false;
  return true;
}

std::vector<Term> child_tuple(const std::vector<Term>& ts, int i) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (Term t : ts) out.push_back(t.child(i));
  return out;
}

// path to one minimal position where the family disagrees at the node head
Pos some_diff(std::vector<Term> ts) {
  Pos p;
  while (same_sym_heads(ts)) {
    int pick = -1;
    for (int i = 0; i < ts[0].arity() && pick < 0; ++i)
      if (!all_same(child_tuple(ts, i))) pick = i;
    if (pick < 0) break;  // unreachable for a family of distinct elements
    p.push_back(pick + 1);
    ts = child_tuple(ts, pick);
  }
  return p;
}

// greatest common factor with residual tuple r: x1 at exactly the minimal
// positions whose residuals equal r. Fails when a disagreement or an existing
// hole escapes the cuts: every element must factor through the result with a
// single residual, and a stray hole would carry a different one. Memoized on
// the id tuple so shared structure costs one visit.
using FactorMemo = std::map<std::vector<uint32_t>, std::optional<Term>>;

std::optional<Term> factor_out(const std::vector<Term>& ts, const std::vector<Term>& r,
                               FactorMemo& memo) {
  if (ts == r) return Term::var(1);
  std::vector<uint32_t> key;
  key.reserve(ts.size());
  for (Term t : ts) key.push_back(t.id());
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::optional<Term> res;
  if (all_same(ts)) {
    // shared subtree: keep it verbatim unless it still contains holes
    if (hole_count(ts[0]) == 0) res = ts[0];
  } else if (same_sym_heads(ts)) {
    std::vector<Term> kids;
    bool ok = true;
    for (int i = 0; i < ts[0].arity() && ok; ++i) {
      auto sub = factor_out(child_tuple(ts, i), r, memo);
      if (sub) kids.push_back(*sub);
      else ok = false;
    }
    if (ok) res = Term::sym(ts[0].sym_id(), kids);
  }
  memo.emplace(std::move(key), res);
  return res;
}

}  // namespace

Pat lub(const std::vector<Pat>& elems) {
  std::vector<Term> ts;
  for (const Pat& p : elems)
    if (!is_bottom(p)) ts.push_back(*p);
  if (ts.empty()) return std::nullopt;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() == 1) return ts[0];

  // candidate residual tuples, read off the ancestors of one minimal
  // disagreement: deepest first, so the first factorization is the least
  Pos d0 = some_diff(ts);
  for (int k = (int)d0.size(); k >= 0; --k) {
    Pos q(d0.begin(), d0.begin() + k);
    std::vector<Term> r;
    r.reserve(ts.size());
    for (Term t : ts) r.push_back(subtree_at(t, q));
    FactorMemo memo;
    if (auto v = factor_out(ts, r, memo)) return *v;
  }
  return Term::var(1);  // unreachable: the root candidate always factors
}

Pat lub1(const std::vector<Pat>& elems) {
  std::vector<Term> ts;
  for (const Pat& p : elems) {
    if (is_bottom(p)) continue;
    if (hole_count(*p) > 1)
      throw std::invalid_argument("lub1: element with more than one x1 occurrence");
    ts.push_back(*p);
  }
  if (ts.empty()) return std::nullopt;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() == 1) return ts[0];

  // single hole at the shallowest position dominating every disagreement and
  // every existing hole: descend while exactly one child subtree is relevant
  Pos lca;
  std::vector<Term> cur = ts;
  while (same_sym_heads(cur)) {
    int pick = -1;
    for (int i = 0; i < cur[0].arity(); ++i) {
      std::vector<Term> kids = child_tuple(cur, i);
      if (all_same(kids) && hole_count(kids[0]) == 0) continue;
      if (pick >= 0) { pick = -1; break; }
      pick = i;
    }
    if (pick < 0) break;
    lca.push_back(pick + 1);
    cur = child_tuple(cur, pick);
  }
  return replace_at(ts[0], lca, Term::var(1));
}

std::vector<Term> max_ground_subtrees(Term t) {
  std::vector<Term> out;
  std::function<void(Term)> go = [&](Term u) {
    if (is_ground(u)) {
      out.push_back(u);
      return;
    }
    if (u.kind() == Kind::Sym)
      for (int i = 0; i < u.arity(); ++i) go(u.child(i));
  };
  go(t);
  return out;
}

// ---------------- printing ----------------

std::string to_string(Term t) {
  std::ostringstream os;
  std::function<void(Term)> go = [&](Term u) {
    switch (u.kind()) {
      case Kind::Var: os << 'x' << u.var_index(); break;
      case Kind::Call:
        os << u.call_state_name() << "(x" << u.call_var() << ")";
        break;
      case Kind::Sym:
        os << u.sym_name();
        if (u.arity() > 0) {
          os << '(';
          for (int i = 0; i < u.arity(); ++i) {
            if (i) os << ',';
            go(u.child(i));
          }
          os << ')';
        }
        break;
    }
  };
  go(t);
  return os.str();
}

std::string to_string(const Pat& p) { return is_bottom(p) ? "_|_" : to_string(*p); }

}  // namespace tdtt
