#include "deduce/expr.hpp"

#include <algorithm>
#include <utility>

#include "deduce/error.hpp"

namespace deduce {

std::string_view sort_name(Sort s) {
  return s == Sort::Individual ? "individual" : "proposition";
}

// --- signature -------------------------------------------------------------

namespace {

SymbolInfo make_symbol(std::string_view name, std::size_t arity, Sort sort,
                       std::vector<Sort> args, Fixity fixity, int prec,
                       Assoc assoc, std::string_view shorthand) {
  SymbolInfo s;
  s.name = std::string(name);
  s.arity = arity;
  s.sort = sort;
  s.arg_sorts = std::move(args);
  s.fixity = fixity;
  s.precedence = prec;
  s.assoc = assoc;
  s.shorthand = std::string(shorthand);
  s.builtin = true;
  return s;
}

Signature make_builtin() {
  constexpr Sort P = Sort::Proposition;
  constexpr Sort I = Sort::Individual;
  Signature sig;
  sig.add(make_symbol(sym::Iff, 2, P, {P, P}, Fixity::Infix, 1, Assoc::None, "\\Leftrightarrow"));
  sig.add(make_symbol(sym::Implies, 2, P, {P, P}, Fixity::Infix, 2, Assoc::Right, "\\Rightarrow"));
  sig.add(make_symbol(sym::Or, 2, P, {P, P}, Fixity::Infix, 3, Assoc::Left, "\\vee"));
  sig.add(make_symbol(sym::And, 2, P, {P, P}, Fixity::Infix, 4, Assoc::Left, "\\wedge"));
  sig.add(make_symbol(sym::Not, 1, P, {P}, Fixity::Prefix, 5, Assoc::None, "\\neg"));
  sig.add(make_symbol(sym::Eq, 2, P, {I, I}, Fixity::Infix, 6, Assoc::None, ""));
  sig.add(make_symbol(sym::In, 2, P, {I, I}, Fixity::Infix, 6, Assoc::None, "\\in"));
  sig.add(make_symbol(sym::Subseteq, 2, P, {I, I}, Fixity::Infix, 6, Assoc::None, "\\subseteq"));
  sig.add(make_symbol(sym::Cup, 2, I, {I, I}, Fixity::Infix, 7, Assoc::Left, "\\cup"));
  sig.add(make_symbol(sym::Cap, 2, I, {I, I}, Fixity::Infix, 8, Assoc::Left, "\\cap"));
  sig.add(make_symbol(sym::BigCup, 1, I, {I}, Fixity::BigOp, 9, Assoc::None, "\\bigcup"));
  sig.add(make_symbol(sym::Powerset, 1, I, {I}, Fixity::BigOp, 9, Assoc::None, "\\powerset"));
  sig.add(make_symbol(sym::Top, 0, P, {}, Fixity::Constant, 10, Assoc::None, "\\top"));
  sig.add(make_symbol(sym::Bot, 0, P, {}, Fixity::Constant, 10, Assoc::None, "\\bot"));
  sig.add(make_symbol(sym::Empty, 0, I, {}, Fixity::Constant, 10, Assoc::None, "\\emptyset"));
  sig.add(make_symbol(sym::Forall, 1, P, {P}, Fixity::Quantifier, 0, Assoc::None, "\\forall"));
  sig.add(make_symbol(sym::Exists, 1, P, {P}, Fixity::Quantifier, 0, Assoc::None, "\\exists"));
  SymbolInfo en = make_symbol(sym::Enum, 1, I, {I}, Fixity::Enumeration, 10, Assoc::None, "");
  en.variadic = true;
  sig.add(std::move(en));
  return sig;
}

}  // namespace

const Signature& Signature::builtin() {
  static const Signature sig = make_builtin();
  return sig;
}

void Signature::add(SymbolInfo info) {
  if (info.arg_sorts.size() != info.arity && !info.variadic) {
    info.arg_sorts.assign(info.arity, Sort::Individual);
  }
  auto it = symbols_.find(info.name);
  if (it != symbols_.end()) {
    const SymbolInfo& old = it->second;
    if (old.arity == info.arity && old.sort == info.sort &&
        old.arg_sorts == info.arg_sorts && old.fixity == info.fixity) {
      return;
    }
    throw Error(ErrorCode::SortMismatch, "error.symbolRedeclared", {info.name},
                "conflicting declaration of symbol " + info.name);
  }
  symbols_.emplace(info.name, std::move(info));
}

void Signature::add_function(std::string name, std::size_t arity, Sort result) {
  SymbolInfo s;
  s.name = std::move(name);
  s.arity = arity;
  s.sort = result;
  s.arg_sorts.assign(arity, Sort::Individual);
  s.fixity = arity == 0 ? Fixity::Constant : Fixity::Function;
  add(std::move(s));
}

const SymbolInfo* Signature::find(std::string_view name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : &it->second;
}

std::vector<SymbolInfo> Signature::user_symbols() const {
  std::vector<SymbolInfo> out;
  for (const auto& [name, info] : symbols_) {
    if (!info.builtin) out.push_back(info);
  }
  return out;
}

// --- Expr ------------------------------------------------------------------

namespace {

std::shared_ptr<ExprNode> new_node(ExprKind kind, Sort sort, std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->sort = sort;
  n->name = std::move(name);
  return n;
}

void finish(ExprNode& n) {
  n.size = 1;
  n.has_hole = n.kind == ExprKind::Hole;
  for (const Expr& c : n.children) {
    n.size += c.size();
    n.has_hole = n.has_hole || c.has_hole();
  }
}

}  // namespace

Expr Expr::var(std::string name, Sort sort) {
  return Expr(new_node(ExprKind::Var, sort, std::move(name)));
}

Expr::Expr() {
  static const Expr top = Expr::constant(std::string(sym::Top), Sort::Proposition);
  node_ = top.node_;
}

Expr Expr::constant(std::string symbol, Sort sort) {
  return Expr(new_node(ExprKind::Const, sort, std::move(symbol)));
}

Expr Expr::app(std::string symbol, Sort sort, std::vector<Expr> children) {
  auto n = new_node(ExprKind::App, sort, std::move(symbol));
  n->children = std::move(children);
  finish(*n);
  return Expr(std::move(n));
}

Expr Expr::quant(std::string symbol, std::string bound, Sort bound_sort, Expr body) {
  auto n = new_node(ExprKind::Quant, Sort::Proposition, std::move(symbol));
  n->bound = std::move(bound);
  n->bound_sort = bound_sort;
  n->children.push_back(std::move(body));
  finish(*n);
  return Expr(std::move(n));
}

Expr Expr::hole(std::size_t id, Sort sort) {
  auto n = new_node(ExprKind::Hole, sort, std::to_string(id));
  n->has_hole = true;
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
Sort Expr::sort() const { return node_->sort; }
const std::string& Expr::name() const { return node_->name; }
const std::string& Expr::bound() const { return node_->bound; }
Sort Expr::bound_sort() const { return node_->bound_sort; }
std::size_t Expr::hole_id() const { return std::stoul(node_->name); }
const std::vector<Expr>& Expr::children() const { return node_->children; }
std::size_t Expr::size() const { return node_->size; }
bool Expr::has_hole() const { return node_->has_hole; }

bool Expr::is(std::string_view symbol) const {
  return (node_->kind == ExprKind::App || node_->kind == ExprKind::Const) &&
         node_->name == symbol;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind || x.sort != y.sort || x.name != y.name ||
      x.size != y.size || x.children.size() != y.children.size()) {
    return false;
  }
  if (x.kind == ExprKind::Quant &&
      (x.bound != y.bound || x.bound_sort != y.bound_sort)) {
    return false;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (x.children[i] != y.children[i]) return false;
  }
  return true;
}

Expr mk_top() { return Expr::constant(std::string(sym::Top), Sort::Proposition); }
Expr mk_bot() { return Expr::constant(std::string(sym::Bot), Sort::Proposition); }
Expr mk_not(Expr e) {
  return Expr::app(std::string(sym::Not), Sort::Proposition, {std::move(e)});
}
Expr mk_binary(std::string_view symbol, Expr a, Expr b) {
  const SymbolInfo* info = Signature::builtin().find(symbol);
  Sort s = info ? info->sort : Sort::Proposition;
  return Expr::app(std::string(symbol), s, {std::move(a), std::move(b)});
}
Expr mk_and(Expr a, Expr b) { return mk_binary(sym::And, std::move(a), std::move(b)); }
Expr mk_or(Expr a, Expr b) { return mk_binary(sym::Or, std::move(a), std::move(b)); }
Expr mk_implies(Expr a, Expr b) { return mk_binary(sym::Implies, std::move(a), std::move(b)); }
Expr mk_iff(Expr a, Expr b) { return mk_binary(sym::Iff, std::move(a), std::move(b)); }
Expr mk_eq(Expr a, Expr b) { return mk_binary(sym::Eq, std::move(a), std::move(b)); }
Expr mk_in(Expr a, Expr b) { return mk_binary(sym::In, std::move(a), std::move(b)); }
Expr mk_subseteq(Expr a, Expr b) { return mk_binary(sym::Subseteq, std::move(a), std::move(b)); }
Expr mk_forall(std::string var, Expr body, Sort var_sort) {
  return Expr::quant(std::string(sym::Forall), std::move(var), var_sort, std::move(body));
}
Expr mk_exists(std::string var, Expr body, Sort var_sort) {
  return Expr::quant(std::string(sym::Exists), std::move(var), var_sort, std::move(body));
}

// --- positions -------------------------------------------------------------

namespace {

Error invalid_path(const Path& p) {
  return Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(p)},
               "invalid path [" + path_to_string(p) + "]");
}

Expr with_child(const Expr& e, std::size_t i, Expr c) {
  if (e.child(i).same_node(c)) return e;
  std::vector<Expr> kids = e.children();
  kids[i] = std::move(c);
  if (e.kind() == ExprKind::Quant) {
    return Expr::quant(e.name(), e.bound(), e.bound_sort(), std::move(kids[0]));
  }
  return Expr::app(e.name(), e.sort(), std::move(kids));
}

Expr replace_rec(const Expr& e, const Path& p, std::size_t depth, const Expr& r) {
  if (depth == p.size()) return r;
  return with_child(e, p[depth], replace_rec(e.child(p[depth]), p, depth + 1, r));
}

}  // namespace

const Expr& subterm_at(const Expr& e, const Path& p) {
  const Expr* cur = &e;
  for (std::size_t i : p) {
    if (i >= cur->child_count()) throw invalid_path(p);
    cur = &cur->child(i);
  }
  return *cur;
}

bool valid_path(const Expr& e, const Path& p) {
  const Expr* cur = &e;
  for (std::size_t i : p) {
    if (i >= cur->child_count()) return false;
    cur = &cur->child(i);
  }
  return true;
}

Expr replace_at(const Expr& e, const Path& p, const Expr& r) {
  const Expr& old = subterm_at(e, p);
  if (old.sort() != r.sort()) {
    throw Error(ErrorCode::SortMismatch, "error.sortMismatch",
                {"@sort." + std::string(sort_name(old.sort())), "@sort." + std::string(sort_name(r.sort()))},
                "replacement has the wrong sort");
  }
  return replace_rec(e, p, 0, r);
}

std::vector<std::string> binders_along(const Expr& e, const Path& p) {
  std::vector<std::string> out;
  const Expr* cur = &e;
  for (std::size_t i : p) {
    if (i >= cur->child_count()) throw invalid_path(p);
    if (cur->is_quant()) out.push_back(cur->bound());
    cur = &cur->child(i);
  }
  return out;
}

namespace {

void collect_paths(const Expr& e, Path& cur, std::vector<Path>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < e.child_count(); ++i) {
    cur.push_back(i);
    collect_paths(e.child(i), cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Path> all_paths(const Expr& e) {
  std::vector<Path> out;
  Path cur;
  collect_paths(e, cur, out);
  return out;
}

std::string path_to_string(const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

Path path_from_string(std::string_view s) {
  Path p;
  if (s.empty()) return p;
  auto fail = [&] {
    return Error(ErrorCode::InvalidPath, "error.invalidPath", {std::string(s)},
                 "malformed path '" + std::string(s) + "'");
  };
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t dot = s.find('.', start);
    std::string_view part = s.substr(start, dot == std::string_view::npos ? s.npos : dot - start);
    if (part.empty() || part.size() > 6) throw fail();
    std::size_t value = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw fail();
      value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    p.push_back(value);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return p;
}

// --- variables ---------------------------------------------------------------

namespace {

void free_rec(const Expr& e, std::vector<std::string>& bound,
              std::map<std::string, Sort>& out) {
  switch (e.kind()) {
    case ExprKind::Var:
      if (std::find(bound.begin(), bound.end(), e.name()) == bound.end()) {
        out.emplace(e.name(), e.sort());
      }
      return;
    case ExprKind::Quant:
      bound.push_back(e.bound());
      free_rec(e.body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const Expr& c : e.children()) free_rec(c, bound, out);
  }
}

void names_rec(const Expr& e, std::set<std::string>& out) {
  if (e.is_var()) out.insert(e.name());
  if (e.is_quant()) out.insert(e.bound());
  for (const Expr& c : e.children()) names_rec(c, out);
}

}  // namespace

std::map<std::string, Sort> free_var_sorts(const Expr& e) {
  std::map<std::string, Sort> out;
  std::vector<std::string> bound;
  free_rec(e, bound, out);
  return out;
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  for (const auto& [name, sort] : free_var_sorts(e)) out.insert(name);
  return out;
}

std::set<std::string> all_names(const Expr& e) {
  std::set<std::string> out;
  names_rec(e, out);
  return out;
}

namespace {

Expr subst_rec(const Expr& e, const Substitution& s) {
  switch (e.kind()) {
    case ExprKind::Var: {
      auto it = s.find(e.name());
      if (it == s.end()) return e;
      if (it->second.sort() != e.sort()) {
        throw Error(ErrorCode::SortMismatch, "error.sortMismatch",
                    {std::string(sort_name(e.sort())),
                     std::string(sort_name(it->second.sort()))},
                    "cannot substitute for " + e.name() + ": wrong sort");
      }
      return it->second;
    }
    case ExprKind::Const:
    case ExprKind::Hole:
      return e;
    case ExprKind::App: {
      std::vector<Expr> kids;
      kids.reserve(e.child_count());
      bool changed = false;
      for (const Expr& c : e.children()) {
        kids.push_back(subst_rec(c, s));
        changed = changed || !kids.back().same_node(c);
      }
      return changed ? Expr::app(e.name(), e.sort(), std::move(kids)) : e;
    }
    case ExprKind::Quant: {
      const std::set<std::string> body_free = free_vars(e.body());
      Substitution inner;
      std::set<std::string> incoming;
      for (const auto& [name, value] : s) {
        if (name == e.bound() || !body_free.count(name)) continue;
        inner.emplace(name, value);
        for (const std::string& v : free_vars(value)) incoming.insert(v);
      }
      if (inner.empty()) return e;
      std::string bound = e.bound();
      if (incoming.count(bound)) {
        std::set<std::string> taken = incoming;
        taken.insert(body_free.begin(), body_free.end());
        for (const auto& [name, value] : inner) taken.insert(name);
        bound = fresh_name(e.bound(), taken);
        inner.insert_or_assign(e.bound(), Expr::var(bound, e.bound_sort()));
      }
      return Expr::quant(e.name(), bound, e.bound_sort(), subst_rec(e.body(), inner));
    }
  }
  return e;
}

bool alpha_rec(const Expr& a, const Expr& b, std::vector<std::string>& env_a,
               std::vector<std::string>& env_b) {
  if (a.kind() != b.kind() || a.sort() != b.sort()) return false;
  switch (a.kind()) {
    case ExprKind::Var: {
      // Innermost binder wins; compare de Bruijn positions.
      auto ia = std::find(env_a.rbegin(), env_a.rend(), a.name());
      auto ib = std::find(env_b.rbegin(), env_b.rend(), b.name());
      bool bound_a = ia != env_a.rend();
      bool bound_b = ib != env_b.rend();
      if (bound_a != bound_b) return false;
      if (bound_a) return (ia - env_a.rbegin()) == (ib - env_b.rbegin());
      return a.name() == b.name();
    }
    case ExprKind::Const:
    case ExprKind::Hole:
      return a.name() == b.name();
    case ExprKind::App:
      if (a.name() != b.name() || a.child_count() != b.child_count()) return false;
      for (std::size_t i = 0; i < a.child_count(); ++i) {
        if (!alpha_rec(a.child(i), b.child(i), env_a, env_b)) return false;
      }
      return true;
    case ExprKind::Quant: {
      if (a.name() != b.name() || a.bound_sort() != b.bound_sort()) return false;
      env_a.push_back(a.bound());
      env_b.push_back(b.bound());
      bool ok = alpha_rec(a.body(), b.body(), env_a, env_b);
      env_a.pop_back();
      env_b.pop_back();
      return ok;
    }
  }
  return false;
}

const char* const kPrimes[] = {"′", "″", "‴"};
const char* const kSubscripts[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};

std::string subscript(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (char d : digits) out += kSubscripts[d - '0'];
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
  if (s.empty()) return e;
  return subst_rec(e, s);
}

bool alpha_eq(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  std::vector<std::string> env_a, env_b;
  return alpha_rec(a, b, env_a, env_b);
}

std::string fresh_name(std::string_view base, const std::set<std::string>& taken) {
  std::string candidate(base);
  if (!taken.count(candidate)) return candidate;
  for (const char* prime : kPrimes) {
    candidate = std::string(base) + prime;
    if (!taken.count(candidate)) return candidate;
  }
  for (std::size_t n = 1;; ++n) {
    candidate = std::string(base) + subscript(n);
    if (!taken.count(candidate)) return candidate;
  }
}

// --- pre-order -----------------------------------------------------------------

namespace {

void preorder_rec(const Expr& e, std::vector<PreorderToken>& out) {
  switch (e.kind()) {
    case ExprKind::Hole:
      throw Error(ErrorCode::HolePresent, "error.holePresent", {},
                  "expression contains a hole");
    case ExprKind::Var:
    case ExprKind::Const:
      out.push_back({e.name(), 0});
      return;
    case ExprKind::App:
      out.push_back({e.name(), e.child_count()});
      for (const Expr& c : e.children()) preorder_rec(c, out);
      return;
    case ExprKind::Quant:
      out.push_back({e.name(), 2});
      out.push_back({e.bound(), 0});
      preorder_rec(e.body(), out);
      return;
  }
}

}  // namespace

std::vector<PreorderToken> preorder_tokens(const Expr& e) {
  std::vector<PreorderToken> out;
  out.reserve(e.size() + 4);
  preorder_rec(e, out);
  return out;
}

std::string join_tokens(const std::vector<PreorderToken>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ',';
    out += tokens[i].text;
  }
  return out;
}

}  // namespace deduce
