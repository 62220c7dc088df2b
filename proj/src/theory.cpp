#include "deduce/theory.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "deduce/error.hpp"
#include "deduce/syntax.hpp"

namespace deduce {

std::string_view lemma_kind_name(LemmaKind k) {
  switch (k) {
    case LemmaKind::Schema: return "schema";
    case LemmaKind::Axiom: return "axiom";
    case LemmaKind::Definition: return "definition";
    case LemmaKind::Lemma: return "lemma";
  }
  return "lemma";
}

namespace {

LemmaKind kind_from_name(std::string_view s, std::size_t line) {
  if (s == "schema") return LemmaKind::Schema;
  if (s == "axiom") return LemmaKind::Axiom;
  if (s == "definition") return LemmaKind::Definition;
  if (s == "lemma") return LemmaKind::Lemma;
  throw Error(ErrorCode::ParseError, "error.theoryKind", {std::string(s)},
              "line " + std::to_string(line) + ": unknown lemma kind '" + std::string(s) + "'");
}

constexpr std::string_view kLogic =
    "equiv-contradiction\tschema\t∀p(¬(p ⇔ ¬p))\n"
    "excluded-middle\tschema\t∀p(p ∨ ¬p)\n"
    "equiv-elim-left\tschema\t∀p∀q((p ⇔ q) ⇒ (p ⇒ q))\n"
    "equiv-elim-right\tschema\t∀p∀q((p ⇔ q) ⇒ (q ⇒ p))\n";

constexpr std::string_view kZf =
    "subseteq-def\tdefinition\t∀A∀B(A ⊆ B ⇔ ∀x(x ∈ A ⇒ x ∈ B))\n"
    "extensionality\taxiom\t∀A∀B((∀x(x ∈ A ⇔ x ∈ B)) ⇒ A = B)\n"
    "eq-two-inclusions\tlemma\t∀A∀B(A = B ⇔ A ⊆ B ∧ B ⊆ A)\n"
    "bigcup-member\tdefinition\t∀A∀x(x ∈ ⋃(A) ⇔ ∃y(y ∈ A ∧ x ∈ y))\n"
    "powerset-member\tdefinition\t∀A∀x(x ∈ 𝒫(A) ⇔ x ⊆ A)\n"
    "cup-member\tdefinition\t∀A∀B∀x(x ∈ A ∪ B ⇔ x ∈ A ∨ x ∈ B)\n"
    "cap-member\tdefinition\t∀A∀B∀x(x ∈ A ∩ B ⇔ x ∈ A ∧ x ∈ B)\n"
    "empty-set\taxiom\t∀x(¬(x ∈ ∅))\n"
    "enum-member-1\tdefinition\t∀x∀a(x ∈ {a} ⇔ x = a)\n"
    "enum-member-2\tdefinition\t∀x∀a∀b(x ∈ {a,b} ⇔ x = a ∨ x = b)\n"
    "enum-member-3\tdefinition\t∀x∀a∀b∀c(x ∈ {a,b,c} ⇔ x = a ∨ x = b ∨ x = c)\n"
    "enum-member-4\tdefinition\t∀x∀a∀b∀c∀d(x ∈ {a,b,c,d} ⇔ x = a ∨ x = b ∨ x = c ∨ x = d)\n"
    "reflexivity\taxiom\t∀x(x = x)\n";

std::vector<Theory> make_builtin() {
  std::vector<Theory> out;
  out.push_back(load_theory("logic", kLogic));
  out.push_back(load_theory("zf", kZf));
  return out;
}

}  // namespace

Theory load_theory(std::string_view theory_id, std::string_view text, const Signature& sig) {
  Theory th;
  th.id = std::string(theory_id);
  th.signature = sig;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw Error(ErrorCode::ParseError, "error.theoryLine", {std::to_string(lineno)},
                  "line " + std::to_string(lineno) + ": expected <id>\\t<kind>\\t<formula>");
    }
    Lemma lemma;
    lemma.id = line.substr(0, t1);
    lemma.theory = th.id;
    lemma.kind = kind_from_name(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), lineno);
    ParseOptions opts;
    opts.expected = Sort::Proposition;
    lemma.statement = parse(expand_shorthands(line.substr(t2 + 1)), sig, opts);
    lemma.display_key = "lemma." + th.id + "." + lemma.id;
    if (!free_vars(lemma.statement).empty()) {
      throw Error(ErrorCode::NotClosed, "error.notClosed", {lemma.id},
                  "line " + std::to_string(lineno) + ": lemma " + lemma.id + " is not closed");
    }
    if (!seen.insert(lemma.id).second) {
      throw Error(ErrorCode::Conflict, "error.duplicateLemma", {lemma.id},
                  "duplicate lemma id " + lemma.id);
    }
    th.lemmas.push_back(std::move(lemma));
  }
  return th;
}

const std::vector<Theory>& builtin_theories() {
  static const std::vector<Theory> theories = make_builtin();
  return theories;
}

const Theory& get_theory(std::string_view id) {
  for (const Theory& t : builtin_theories()) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::NotFound, "error.theoryNotFound", {std::string(id)},
              "no theory " + std::string(id));
}

const Lemma& get_lemma(const Theory& theory, std::string_view id) {
  for (const Lemma& l : theory.lemmas) {
    if (l.id == id) return l;
  }
  std::string q = theory.id + "/" + std::string(id);
  throw Error(ErrorCode::NotFound, "error.lemmaNotFound", {q}, "no lemma " + q);
}

const Lemma& get_lemma(std::string_view qualified_id) {
  auto slash = qualified_id.find('/');
  if (slash == std::string_view::npos) {
    throw Error(ErrorCode::NotFound, "error.lemmaNotFound", {std::string(qualified_id)},
                "no lemma " + std::string(qualified_id));
  }
  return get_lemma(get_theory(qualified_id.substr(0, slash)), qualified_id.substr(slash + 1));
}

std::vector<Lemma> resolve_lemmas(const std::vector<std::string>& selectors) {
  std::vector<Lemma> out;
  std::set<std::string> seen;
  auto add = [&](const Lemma& l) {
    if (seen.insert(l.qualified_id()).second) out.push_back(l);
  };
  for (const std::string& sel : selectors) {
    try {
      if (sel.size() > 2 && sel.ends_with("/*")) {
        for (const Lemma& l : get_theory(sel.substr(0, sel.size() - 2)).lemmas) add(l);
      } else {
        add(get_lemma(sel));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotFound) throw;
      throw Error(ErrorCode::UnknownLemma, "error.unknownLemma", {sel}, "unknown lemma " + sel);
    }
  }
  return out;
}

}  // namespace deduce
