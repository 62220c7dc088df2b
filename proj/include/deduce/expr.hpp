#pragma once

// Expression trees shared by terms and formulas.
//
// An Expr is an immutable, reference-counted tree. Terms (sort Individual)
// and formulas (sort Proposition) use the same node type, so one traversal,
// substitution and matching engine serves both.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace deduce {

enum class Sort : std::uint8_t { Individual, Proposition };

std::string_view sort_name(Sort s);

enum class Fixity : std::uint8_t {
  Constant,     // ⊤ ⊥ ∅ and 0-ary user symbols
  Prefix,       // ¬
  Infix,        // ∧ ∨ ⇒ ⇔ = ∈ ⊆ ∪ ∩
  BigOp,        // ⋃ 𝒫, printed as op(arg)
  Function,     // user symbols, printed as name(args)
  Quantifier,   // ∀ ∃
  Enumeration,  // {t₁,…,tₙ}
};

enum class Assoc : std::uint8_t { Left, Right, None };

struct SymbolInfo {
  std::string name;
  std::size_t arity = 0;
  bool variadic = false;  // enumeration only; arity is then the minimum
  Sort sort = Sort::Proposition;
  std::vector<Sort> arg_sorts;
  Fixity fixity = Fixity::Function;
  int precedence = 10;
  Assoc assoc = Assoc::None;
  std::string shorthand;  // e.g. "\\forall", may be empty
  bool builtin = false;
};

// Names of the built-in symbols.
namespace sym {
inline constexpr std::string_view Not = "¬";
inline constexpr std::string_view And = "∧";
inline constexpr std::string_view Or = "∨";
inline constexpr std::string_view Implies = "⇒";
inline constexpr std::string_view Iff = "⇔";
inline constexpr std::string_view Top = "⊤";
inline constexpr std::string_view Bot = "⊥";
inline constexpr std::string_view Forall = "∀";
inline constexpr std::string_view Exists = "∃";
inline constexpr std::string_view Eq = "=";
inline constexpr std::string_view In = "∈";
inline constexpr std::string_view Subseteq = "⊆";
inline constexpr std::string_view Cup = "∪";
inline constexpr std::string_view Cap = "∩";
inline constexpr std::string_view BigCup = "⋃";
inline constexpr std::string_view Powerset = "𝒫";
inline constexpr std::string_view Empty = "∅";
inline constexpr std::string_view Enum = "{}";
}  // namespace sym

// A set of symbols, unique by name. Signatures are scoped per task: the
// built-in logical and set-theoretic symbols plus task-declared ones.
class Signature {
 public:
  static const Signature& builtin();

  // Adds a user symbol. Re-adding an identical declaration is a no-op;
  // a conflicting redeclaration throws Error(SortMismatch).
  void add(SymbolInfo info);
  void add_function(std::string name, std::size_t arity, Sort result);

  const SymbolInfo* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::map<std::string, SymbolInfo, std::less<>>& symbols() const {
    return symbols_;
  }
  std::vector<SymbolInfo> user_symbols() const;

 private:
  std::map<std::string, SymbolInfo, std::less<>> symbols_;
};

enum class ExprKind : std::uint8_t { Var, Const, App, Quant, Hole };

class Expr;
using Path = std::vector<std::size_t>;
using Substitution = std::map<std::string, Expr, std::less<>>;

struct ExprNode;

class Expr {
 public:
  // The constant ⊤; lets Expr live in aggregates.
  Expr();

  static Expr var(std::string name, Sort sort);
  static Expr constant(std::string symbol, Sort sort);
  // No arity checking here; see Signature-aware construction in the parser.
  static Expr app(std::string symbol, Sort sort, std::vector<Expr> children);
  static Expr quant(std::string symbol, std::string bound, Sort bound_sort,
                    Expr body);
  static Expr hole(std::size_t id, Sort sort);

  ExprKind kind() const;
  Sort sort() const;
  // Variable name, symbol name, quantifier symbol, or hole id as text.
  const std::string& name() const;
  const std::string& bound() const;  // Quant only
  Sort bound_sort() const;           // Quant only
  std::size_t hole_id() const;       // Hole only
  const std::vector<Expr>& children() const;
  std::size_t child_count() const { return children().size(); }
  const Expr& child(std::size_t i) const { return children()[i]; }
  const Expr& body() const { return children()[0]; }  // Quant only
  std::size_t size() const;  // node count
  bool has_hole() const;

  bool is_var() const { return kind() == ExprKind::Var; }
  bool is_quant() const { return kind() == ExprKind::Quant; }
  bool is_hole() const { return kind() == ExprKind::Hole; }
  // True for App/Const nodes whose symbol is `symbol`.
  bool is(std::string_view symbol) const;

  bool same_node(const Expr& other) const { return node_ == other.node_; }

  // Structural identity, including bound-variable names.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind;
  Sort sort;
  std::string name;
  std::string bound;
  Sort bound_sort = Sort::Individual;
  std::vector<Expr> children;
  std::size_t size = 1;
  bool has_hole = false;
};

// Convenience constructors for built-in symbols.
Expr mk_top();
Expr mk_bot();
Expr mk_not(Expr e);
Expr mk_and(Expr a, Expr b);
Expr mk_or(Expr a, Expr b);
Expr mk_implies(Expr a, Expr b);
Expr mk_iff(Expr a, Expr b);
Expr mk_forall(std::string var, Expr body, Sort var_sort = Sort::Individual);
Expr mk_exists(std::string var, Expr body, Sort var_sort = Sort::Individual);
Expr mk_eq(Expr a, Expr b);
Expr mk_in(Expr a, Expr b);
Expr mk_subseteq(Expr a, Expr b);
Expr mk_binary(std::string_view symbol, Expr a, Expr b);

// --- positions -------------------------------------------------------------

const Expr& subterm_at(const Expr& e, const Path& p);
bool valid_path(const Expr& e, const Path& p);
Expr replace_at(const Expr& e, const Path& p, const Expr& r);
// Names bound by the quantifiers strictly above position p.
std::vector<std::string> binders_along(const Expr& e, const Path& p);
// Every valid path of e, in pre-order.
std::vector<Path> all_paths(const Expr& e);
std::string path_to_string(const Path& p);   // "0.1.0", "" for root
Path path_from_string(std::string_view s);   // throws Error(InvalidPath)

// --- variables and substitution -------------------------------------------

std::set<std::string> free_vars(const Expr& e);
std::map<std::string, Sort> free_var_sorts(const Expr& e);
// Every variable name occurring in e, free or bound.
std::set<std::string> all_names(const Expr& e);

// Capture-avoiding simultaneous substitution.
Expr substitute(const Expr& e, const Substitution& s);

bool alpha_eq(const Expr& a, const Expr& b);

// base, base′, base″, base‴, base₁, base₂, … — the first one not in taken.
std::string fresh_name(std::string_view base, const std::set<std::string>& taken);

// --- pre-order serialization ----------------------------------------------

struct PreorderToken {
  std::string text;
  std::size_t arity = 0;
  friend bool operator==(const PreorderToken&, const PreorderToken&) = default;
};

// Root-first walk: symbol for App/Const, name for Var, quantifier symbol then
// bound name for Quant. Throws Error(HolePresent).
std::vector<PreorderToken> preorder_tokens(const Expr& e);
std::string join_tokens(const std::vector<PreorderToken>& tokens);

}  // namespace deduce
