#include "deduce/syntax.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <utility>

#include "deduce/error.hpp"

namespace deduce {

// --- shorthands ----------------------------------------------------------------

const ShorthandTable& ShorthandTable::standard() {
  static const ShorthandTable table = [] {
    ShorthandTable t;
    t.add("\\forall", "∀");
    t.add("\\exists", "∃");
    t.add("\\neg", "¬");
    t.add("\\wedge", "∧");
    t.add("\\and", "∧");
    t.add("\\vee", "∨");
    t.add("\\or", "∨");
    t.add("\\Rightarrow", "⇒");
    t.add("\\implies", "⇒");
    t.add("\\Leftrightarrow", "⇔");
    t.add("\\iff", "⇔");
    t.add("\\in", "∈");
    t.add("\\subseteq", "⊆");
    t.add("\\cup", "∪");
    t.add("\\cap", "∩");
    t.add("\\bigcup", "⋃");
    t.add("\\powerset", "𝒫");
    t.add("\\mathcal{P}", "𝒫");
    t.add("\\emptyset", "∅");
    t.add("\\top", "⊤");
    t.add("\\bot", "⊥");
    return t;
  }();
  return table;
}

void ShorthandTable::add(std::string escape, std::string symbol) {
  if (escape.size() < 2 || escape[0] != '\\') {
    throw std::invalid_argument("shorthand must start with a backslash: " + escape);
  }
  if (entries_.count(escape)) {
    throw std::invalid_argument("duplicate shorthand " + escape);
  }
  order_.emplace_back(escape, symbol);
  entries_.emplace(std::move(escape), std::move(symbol));
}

std::optional<std::string> ShorthandTable::escape_for(std::string_view symbol) const {
  for (const auto& [escape, sym] : order_) {
    if (sym == symbol) return escape;
  }
  return std::nullopt;
}

namespace {

bool ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

std::string expand_shorthands(std::string_view input, const ShorthandTable& table) {
  std::string out;
  out.reserve(input.size());
  std::size_t i = 0;
  while (i < input.size()) {
    if (input[i] != '\\') {
      out += input[i++];
      continue;
    }
    // Keys with non-letter characters (\mathcal{P}) match literally, longest first.
    std::size_t best = 0;
    const std::string* replacement = nullptr;
    for (const auto& [escape, symbol] : table.entries()) {
      bool plain = std::all_of(escape.begin() + 1, escape.end(), ascii_letter);
      if (plain || escape.size() <= best) continue;
      if (input.substr(i, escape.size()) == escape) {
        best = escape.size();
        replacement = &symbol;
      }
    }
    if (!replacement) {
      std::size_t j = i + 1;
      while (j < input.size() && ascii_letter(input[j])) ++j;
      auto it = table.entries().find(input.substr(i, j - i));
      if (j > i + 1 && it != table.entries().end()) {
        best = j - i;
        replacement = &it->second;
      } else {
        out.append(input.substr(i, j - i));
        i = j;
        continue;
      }
    }
    out += *replacement;
    i += best;
  }
  return out;
}

std::string nfc_normalize(std::string_view input) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(input);
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(input.data(), static_cast<int32_t>(input.size())));
  if (nfc->isNormalized(text, status) && U_SUCCESS(status)) return std::string(input);
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) return std::string(input);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

// --- tokenizer -------------------------------------------------------------------

namespace {

struct Decoded {
  UChar32 cp;
  std::size_t next;
};

Decoded decode_at(std::string_view s, std::size_t i) {
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos,
          static_cast<int32_t>(s.size()), c);
  return {c, static_cast<std::size_t>(pos)};
}

bool is_prime_or_subscript(UChar32 c) {
  return c == 0x2032 || c == 0x2033 || c == 0x2034 || (c >= 0x2080 && c <= 0x2089);
}

bool is_ident_char(UChar32 c) {
  return c == '_' || c == '\'' || u_isalnum(c) || is_prime_or_subscript(c);
}

bool is_ident_start(UChar32 c) { return c == '_' || u_isalpha(c); }

bool identifier_like(std::string_view name) {
  if (name.empty()) return false;
  Decoded d = decode_at(name, 0);
  return d.cp >= 0 && is_ident_start(d.cp);
}

// Operator symbols matched by longest prefix rather than as identifiers.
std::vector<std::string> operator_symbols(const Signature& sig) {
  std::vector<std::string> ops;
  for (const auto& [name, info] : sig.symbols()) {
    if (info.fixity == Fixity::Enumeration) continue;
    if (info.builtin || !identifier_like(name)) ops.push_back(name);
  }
  std::sort(ops.begin(), ops.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  return ops;
}

[[noreturn]] void fail(std::size_t offset, std::string key,
                       std::vector<std::string> args, std::string detail,
                       ErrorCode code = ErrorCode::ParseError) {
  throw ParseError(code, offset, std::move(key), std::move(args), std::move(detail));
}

}  // namespace

std::vector<Token> tokenize(std::string_view s, const Signature& sig) {
  const std::vector<std::string> ops = operator_symbols(sig);
  auto match_op = [&](std::size_t i) -> const std::string* {
    for (const std::string& op : ops) {
      if (s.substr(i, op.size()) == op) return &op;
    }
    return nullptr;
  };

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    Decoded d = decode_at(s, i);
    if (d.cp < 0) fail(i, "parse.badEncoding", {}, "invalid UTF-8");
    if (u_isUWhiteSpace(d.cp)) {
      i = d.next;
      continue;
    }
    if (const std::string* op = match_op(i)) {
      out.push_back({TokenKind::Symbol, *op, i, i + op->size()});
      i += op->size();
      continue;
    }
    if (d.cp == '(' || d.cp == ')' || d.cp == '{' || d.cp == '}' || d.cp == ',') {
      out.push_back({TokenKind::Punct, std::string(1, static_cast<char>(d.cp)), i, d.next});
      i = d.next;
      continue;
    }
    if (s.substr(i, kHoleGlyph.size()) == kHoleGlyph) {
      out.push_back({TokenKind::HoleMark, std::string(kHoleGlyph), i, i + kHoleGlyph.size()});
      i += kHoleGlyph.size();
      continue;
    }
    if (d.cp == '\\') {
      std::size_t j = i + 1;
      while (j < s.size() && ascii_letter(s[j])) ++j;
      std::string esc(s.substr(i, j - i));
      fail(i, "parse.unknownShorthand", {esc}, "unknown shorthand " + esc);
    }
    if (is_ident_start(d.cp)) {
      std::size_t j = d.next;
      while (j < s.size()) {
        if (match_op(j)) break;
        Decoded e = decode_at(s, j);
        if (e.cp < 0 || !is_ident_char(e.cp)) break;
        j = e.next;
      }
      out.push_back({TokenKind::Identifier, std::string(s.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    std::string ch(s.substr(i, d.next - i));
    fail(i, "parse.unexpectedChar", {ch}, "unexpected character '" + ch + "'");
  }
  return out;
}

// --- parser --------------------------------------------------------------------

namespace {

enum class RawKind { Ident, Apply, Op, Quant, Enum, Hole };

struct Raw {
  RawKind kind;
  std::string text;  // identifier, symbol or quantifier
  std::string bound;
  std::size_t offset = 0;
  std::vector<std::unique_ptr<Raw>> kids;
};

using RawPtr = std::unique_ptr<Raw>;

class RawParser {
 public:
  RawParser(const std::vector<Token>& tokens, std::size_t input_size, const Signature& sig)
      : toks_(tokens), end_(input_size), sig_(sig) {}

  RawPtr parse_all() {
    if (toks_.empty()) fail(0, "parse.empty", {}, "empty input");
    RawPtr e = expr(1);
    if (pos_ < toks_.size()) {
      const Token& t = toks_[pos_];
      fail(t.begin, "parse.unexpectedToken", {t.text}, "unexpected '" + t.text + "'");
    }
    return e;
  }

 private:
  const Token* peek() const { return pos_ < toks_.size() ? &toks_[pos_] : nullptr; }
  std::size_t here() const { return pos_ < toks_.size() ? toks_[pos_].begin : end_; }

  bool at_punct(char c) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::Punct && t->text[0] == c;
  }

  void expect_punct(char c) {
    if (!at_punct(c)) {
      std::string want(1, c);
      fail(here(), "parse.expected", {want}, "expected '" + want + "'");
    }
    ++pos_;
  }

  const SymbolInfo* infix_at() const {
    const Token* t = peek();
    if (!t || t->kind != TokenKind::Symbol) return nullptr;
    const SymbolInfo* info = sig_.find(t->text);
    return info && info->fixity == Fixity::Infix ? info : nullptr;
  }

  RawPtr expr(int min_prec) {
    RawPtr lhs = unary();
    int last_nonassoc = -1;
    while (const SymbolInfo* op = infix_at()) {
      if (op->precedence < min_prec) break;
      if (op->precedence == last_nonassoc) {
        fail(here(), "parse.nonAssociative", {op->name},
             "operator " + op->name + " needs parentheses here");
      }
      std::size_t at = toks_[pos_].begin;
      ++pos_;
      int next = op->assoc == Assoc::Right ? op->precedence : op->precedence + 1;
      RawPtr rhs = expr(next);
      auto node = std::make_unique<Raw>();
      node->kind = RawKind::Op;
      node->text = op->name;
      node->offset = at;
      node->kids.push_back(std::move(lhs));
      node->kids.push_back(std::move(rhs));
      lhs = std::move(node);
      last_nonassoc = op->assoc == Assoc::None ? op->precedence : -1;
    }
    return lhs;
  }

  RawPtr unary() {
    const Token* t = peek();
    if (t && t->kind == TokenKind::Symbol) {
      const SymbolInfo* info = sig_.find(t->text);
      if (info && info->fixity == Fixity::Prefix) {
        auto node = std::make_unique<Raw>();
        node->kind = RawKind::Op;
        node->text = info->name;
        node->offset = t->begin;
        ++pos_;
        node->kids.push_back(expr(info->precedence + 1));
        return node;
      }
      if (info && info->fixity == Fixity::Quantifier) {
        auto node = std::make_unique<Raw>();
        node->kind = RawKind::Quant;
        node->text = info->name;
        node->offset = t->begin;
        ++pos_;
        const Token* v = peek();
        if (!v || v->kind != TokenKind::Identifier) {
          fail(here(), "parse.expectedVariable", {info->name},
               "expected a variable after " + info->name);
        }
        if (sig_.contains(v->text)) {
          fail(v->begin, "parse.symbolAsVariable", {v->text},
               "'" + v->text + "' is a declared symbol and cannot be bound");
        }
        node->bound = v->text;
        ++pos_;
        if (!peek()) fail(here(), "parse.expectedBody", {}, "quantifier has no body");
        node->kids.push_back(expr(1));
        return node;
      }
      if (info && info->fixity == Fixity::BigOp) {
        auto node = std::make_unique<Raw>();
        node->kind = RawKind::Op;
        node->text = info->name;
        node->offset = t->begin;
        ++pos_;
        node->kids.push_back(unary_operand());
        return node;
      }
    }
    return primary();
  }

  // Operand of ⋃ / 𝒫: another big operator or an atom.
  RawPtr unary_operand() {
    const Token* t = peek();
    if (t && t->kind == TokenKind::Symbol) {
      const SymbolInfo* info = sig_.find(t->text);
      if (info && info->fixity == Fixity::BigOp) return unary();
    }
    return primary();
  }

  RawPtr primary() {
    const Token* t = peek();
    if (!t) fail(end_, "parse.unexpectedEnd", {}, "unexpected end of input");
    if (t->kind == TokenKind::Punct && t->text == "(") {
      ++pos_;
      RawPtr inner = expr(1);
      expect_punct(')');
      return inner;
    }
    if (t->kind == TokenKind::Punct && t->text == "{") {
      auto node = std::make_unique<Raw>();
      node->kind = RawKind::Enum;
      node->text = std::string(sym::Enum);
      node->offset = t->begin;
      ++pos_;
      if (at_punct('}')) {
        fail(here(), "parse.emptyEnumeration", {}, "write ∅ for the empty set");
      }
      node->kids.push_back(expr(1));
      while (at_punct(',')) {
        ++pos_;
        node->kids.push_back(expr(1));
      }
      expect_punct('}');
      return node;
    }
    if (t->kind == TokenKind::HoleMark) {
      auto node = std::make_unique<Raw>();
      node->kind = RawKind::Hole;
      node->offset = t->begin;
      ++pos_;
      return node;
    }
    if (t->kind == TokenKind::Symbol) {
      const SymbolInfo* info = sig_.find(t->text);
      if (info && info->fixity == Fixity::Constant) {
        auto node = std::make_unique<Raw>();
        node->kind = RawKind::Ident;
        node->text = info->name;
        node->offset = t->begin;
        ++pos_;
        return node;
      }
      fail(t->begin, "parse.unexpectedToken", {t->text}, "unexpected '" + t->text + "'");
    }
    if (t->kind == TokenKind::Identifier) {
      auto node = std::make_unique<Raw>();
      node->text = t->text;
      node->offset = t->begin;
      ++pos_;
      if (at_punct('(')) {
        node->kind = RawKind::Apply;
        ++pos_;
        node->kids.push_back(expr(1));
        while (at_punct(',')) {
          ++pos_;
          node->kids.push_back(expr(1));
        }
        expect_punct(')');
      } else {
        node->kind = RawKind::Ident;
      }
      return node;
    }
    fail(t->begin, "parse.unexpectedToken", {t->text}, "unexpected '" + t->text + "'");
  }

  const std::vector<Token>& toks_;
  std::size_t end_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

// Assigns sorts top-down. Every operator fixes the sorts of its operands, so
// a variable's sort is the sort expected at its occurrence.
class Elaborator {
 public:
  Elaborator(const Signature& sig, const ParseOptions& opts)
      : sig_(sig), free_(opts.context) {}

  Expr run(const Raw& root, std::optional<Sort> expected) {
    Sort want = expected ? *expected : natural_sort(root);
    return elab(root, want);
  }

 private:
  struct Binder {
    std::string name;
    std::optional<Sort> sort;
  };

  Sort natural_sort(const Raw& r) const {
    switch (r.kind) {
      case RawKind::Quant:
        return Sort::Proposition;
      case RawKind::Enum:
        return Sort::Individual;
      case RawKind::Hole:
        return Sort::Proposition;
      case RawKind::Op:
      case RawKind::Apply:
        if (const SymbolInfo* info = sig_.find(r.text)) return info->sort;
        return Sort::Individual;
      case RawKind::Ident: {
        if (const SymbolInfo* info = sig_.find(r.text)) return info->sort;
        auto it = free_.find(r.text);
        return it == free_.end() ? Sort::Individual : it->second;
      }
    }
    return Sort::Proposition;
  }

  [[noreturn]] void sort_error(const Raw& r, Sort want, Sort got) const {
    std::string w = "@sort." + std::string(sort_name(want)), g = "@sort." + std::string(sort_name(got));
    fail(r.offset, "parse.sortError", {w, g},
         "expected " + std::string(want == Sort::Proposition ? "a formula" : "a term") +
             " but found " + (got == Sort::Proposition ? "a formula" : "a term"),
         ErrorCode::SortError);
  }

  Expr elab(const Raw& r, Sort want) {
    switch (r.kind) {
      case RawKind::Hole:
        fail(r.offset, "parse.holePresent", {}, "the expression is incomplete");
      case RawKind::Ident:
        return ident(r, want);
      case RawKind::Quant: {
        if (want != Sort::Proposition) sort_error(r, want, Sort::Proposition);
        scope_.push_back({r.bound, std::nullopt});
        Expr body = elab(*r.kids[0], Sort::Proposition);
        Sort bound_sort = scope_.back().sort.value_or(Sort::Individual);
        scope_.pop_back();
        return Expr::quant(r.text, r.bound, bound_sort, std::move(body));
      }
      case RawKind::Enum: {
        if (want != Sort::Individual) sort_error(r, want, Sort::Individual);
        std::vector<Expr> kids;
        for (const auto& k : r.kids) kids.push_back(elab(*k, Sort::Individual));
        return Expr::app(std::string(sym::Enum), Sort::Individual, std::move(kids));
      }
      case RawKind::Op:
      case RawKind::Apply: {
        const SymbolInfo* info = sig_.find(r.text);
        if (!info || (r.kind == RawKind::Apply &&
                      (info->fixity == Fixity::Constant || info->builtin))) {
          fail(r.offset, "parse.unknownFunction", {r.text},
               "unknown function or predicate '" + r.text + "'");
        }
        if (r.kids.size() != info->arity) {
          fail(r.offset, "parse.arity",
               {info->name, std::to_string(info->arity), std::to_string(r.kids.size())},
               info->name + " expects " + std::to_string(info->arity) + " arguments");
        }
        if (info->sort != want) sort_error(r, want, info->sort);
        std::vector<Expr> kids;
        for (std::size_t i = 0; i < r.kids.size(); ++i) {
          kids.push_back(elab(*r.kids[i], info->arg_sorts[i]));
        }
        return Expr::app(info->name, info->sort, std::move(kids));
      }
    }
    fail(r.offset, "parse.internal", {}, "unhandled node");
  }

  Expr ident(const Raw& r, Sort want) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name != r.text) continue;
      if (!it->sort) it->sort = want;
      if (*it->sort != want) sort_error(r, want, *it->sort);
      return Expr::var(r.text, want);
    }
    if (const SymbolInfo* info = sig_.find(r.text)) {
      if (info->fixity != Fixity::Constant) {
        fail(r.offset, "parse.missingArguments", {r.text},
             "'" + r.text + "' needs arguments");
      }
      if (info->sort != want) sort_error(r, want, info->sort);
      return Expr::constant(info->name, info->sort);
    }
    auto [it, inserted] = free_.emplace(r.text, want);
    if (!inserted && it->second != want) sort_error(r, want, it->second);
    return Expr::var(r.text, want);
  }

  const Signature& sig_;
  std::map<std::string, Sort> free_;
  std::vector<Binder> scope_;
};

}  // namespace

Expr parse(std::string_view input, const Signature& sig, const ParseOptions& options) {
  std::string text = nfc_normalize(input);
  std::vector<Token> tokens = tokenize(text, sig);
  RawParser parser(tokens, text.size(), sig);
  RawPtr raw = parser.parse_all();
  Elaborator elab(sig, options);
  return elab.run(*raw, options.expected);
}

// --- printer ---------------------------------------------------------------------

namespace {

int node_precedence(const Expr& e, const Signature& sig) {
  if (e.kind() != ExprKind::App) return 10;
  const SymbolInfo* info = sig.find(e.name());
  if (!info) return 10;
  switch (info->fixity) {
    case Fixity::Infix:
    case Fixity::Prefix:
      return info->precedence;
    default:
      return 10;
  }
}

bool is_relation(const Expr& e, const Signature& sig) {
  return e.kind() == ExprKind::App && node_precedence(e, sig) == 6;
}

// `trailing` is true when more text follows at the same nesting level, in
// which case a quantifier must be wrapped so its body does not swallow it.
void print_rec(const Expr& e, int min_prec, bool trailing, std::string& out) {
  const Signature& sig = Signature::builtin();
  switch (e.kind()) {
    case ExprKind::Var:
    case ExprKind::Const:
      out += e.name();
      return;
    case ExprKind::Hole:
      out += kHoleGlyph;
      return;
    case ExprKind::Quant: {
      if (trailing) out += '(';
      out += e.name();
      out += e.bound();
      if (e.body().is_quant()) {
        print_rec(e.body(), 0, false, out);
      } else {
        out += '(';
        print_rec(e.body(), 0, false, out);
        out += ')';
      }
      if (trailing) out += ')';
      return;
    }
    case ExprKind::App:
      break;
  }
  const SymbolInfo* info = sig.find(e.name());
  Fixity fixity = info ? info->fixity : Fixity::Function;
  if (fixity == Fixity::Enumeration) {
    out += '{';
    for (std::size_t i = 0; i < e.child_count(); ++i) {
      if (i) out += ',';
      print_rec(e.child(i), 0, false, out);
    }
    out += '}';
    return;
  }
  if (fixity == Fixity::BigOp) {
    out += e.name();
    out += '(';
    print_rec(e.child(0), 0, false, out);
    out += ')';
    return;
  }
  if (fixity == Fixity::Prefix) {
    int prec = info->precedence;
    bool wrap = prec < min_prec;
    if (wrap) out += '(';
    out += e.name();
    const Expr& operand = e.child(0);
    bool binary = operand.kind() == ExprKind::App && operand.child_count() == 2 &&
                  node_precedence(operand, sig) < prec;
    if (binary || is_relation(operand, sig)) {
      out += '(';
      print_rec(operand, 0, false, out);
      out += ')';
    } else {
      print_rec(operand, prec, trailing && !wrap, out);
    }
    if (wrap) out += ')';
    return;
  }
  if (fixity == Fixity::Infix) {
    int prec = info->precedence;
    bool wrap = prec < min_prec;
    if (wrap) out += '(';
    int left_min = info->assoc == Assoc::Left ? prec : prec + 1;
    int right_min = info->assoc == Assoc::Right ? prec : prec + 1;
    print_rec(e.child(0), left_min, true, out);
    out += ' ';
    out += e.name();
    out += ' ';
    print_rec(e.child(1), right_min, trailing && !wrap, out);
    if (wrap) out += ')';
    return;
  }
  // User function or predicate.
  out += e.name();
  out += '(';
  for (std::size_t i = 0; i < e.child_count(); ++i) {
    if (i) out += ',';
    print_rec(e.child(i), 0, false, out);
  }
  out += ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_rec(e, 0, false, out);
  return out;
}

}  // namespace deduce
