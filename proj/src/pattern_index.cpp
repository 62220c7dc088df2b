#include "deduce/pattern_index.hpp"

#include <algorithm>
#include <climits>
#include <utility>

#include "deduce/error.hpp"

namespace deduce {

std::string_view orientation_name(Orientation o) {
  switch (o) {
    case Orientation::Left: return "left";
    case Orientation::Right: return "right";
    case Orientation::Whole: return "whole";
  }
  return "whole";
}

std::optional<Orientation> orientation_from_name(std::string_view s) {
  if (s == "left") return Orientation::Left;
  if (s == "right") return Orientation::Right;
  if (s == "whole") return Orientation::Whole;
  return std::nullopt;
}

// --- compilation -----------------------------------------------------------------

namespace {

Pattern make_pattern(const Expr& side, const std::vector<PatternVar>& block,
                     const std::string& id, Orientation o, const Expr& matrix) {
  Pattern p{side, {}, id, o, matrix};
  const auto fv = free_vars(side);
  for (const PatternVar& v : block) {
    if (fv.count(v.name)) p.vars.push_back(v);
  }
  return p;
}

}  // namespace

std::vector<Pattern> compile_lemma(const Expr& lemma, const std::string& id) {
  if (lemma.has_hole()) {
    throw Error(ErrorCode::HolePresent, "error.holePresent", {}, "lemma contains a hole");
  }
  const auto fv = free_vars(lemma);
  if (!fv.empty()) {
    throw Error(ErrorCode::NotClosed, "error.notClosed", {*fv.begin()},
                "lemma " + id + " has free variable " + *fv.begin());
  }
  std::vector<PatternVar> block;
  Expr matrix = lemma;
  while (matrix.is_quant() && matrix.name() == sym::Forall) {
    std::erase_if(block, [&](const PatternVar& v) { return v.name == matrix.bound(); });
    block.push_back({matrix.bound(), matrix.bound_sort()});
    matrix = matrix.body();
  }
  std::vector<Pattern> out;
  if (matrix.kind() == ExprKind::App && (matrix.is(sym::Iff) || matrix.is(sym::Eq))) {
    out.push_back(make_pattern(matrix.child(0), block, id, Orientation::Left, matrix));
    out.push_back(make_pattern(matrix.child(1), block, id, Orientation::Right, matrix));
  } else {
    out.push_back(make_pattern(matrix, block, id, Orientation::Whole, matrix));
  }
  return out;
}

// --- direct matcher ----------------------------------------------------------------

namespace {

struct DirectMatcher {
  const std::vector<PatternVar>& vars;
  Substitution bindings;
  std::vector<std::string> pat_env;
  std::vector<std::string> query_env;

  static std::optional<std::size_t> depth_of(const std::vector<std::string>& env,
                                             const std::string& name) {
    for (std::size_t k = 0; k < env.size(); ++k) {
      if (env[env.size() - 1 - k] == name) return k;
    }
    return std::nullopt;
  }

  const PatternVar* pattern_var(const std::string& name) const {
    for (const PatternVar& v : vars) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  bool captured(const Expr& q) const {
    if (query_env.empty()) return false;
    for (const std::string& v : free_vars(q)) {
      if (std::find(query_env.begin(), query_env.end(), v) != query_env.end()) return true;
    }
    return false;
  }

  bool run(const Expr& p, const Expr& q) {
    if (p.is_hole() || q.is_hole()) return false;
    if (p.is_var()) {
      if (auto k = depth_of(pat_env, p.name())) {
        if (!q.is_var() || q.sort() != p.sort()) return false;
        auto kq = depth_of(query_env, q.name());
        return kq && *kq == *k;
      }
      if (const PatternVar* v = pattern_var(p.name())) {
        if (q.sort() != v->sort || captured(q)) return false;
        auto it = bindings.find(v->name);
        if (it != bindings.end()) return alpha_eq(it->second, q);
        bindings.emplace(v->name, q);
        return true;
      }
      return q.is_var() && q.name() == p.name() && q.sort() == p.sort() &&
             !depth_of(query_env, q.name());
    }
    if (p.kind() != q.kind() || p.sort() != q.sort() || p.name() != q.name()) return false;
    switch (p.kind()) {
      case ExprKind::Const:
        return true;
      case ExprKind::App:
        if (p.child_count() != q.child_count()) return false;
        for (std::size_t i = 0; i < p.child_count(); ++i) {
          if (!run(p.child(i), q.child(i))) return false;
        }
        return true;
      case ExprKind::Quant: {
        if (p.bound_sort() != q.bound_sort()) return false;
        pat_env.push_back(p.bound());
        query_env.push_back(q.bound());
        bool ok = run(p.body(), q.body());
        pat_env.pop_back();
        query_env.pop_back();
        return ok;
      }
      default:
        return false;
    }
  }
};

}  // namespace

std::optional<Substitution> match_pattern(const Expr& skeleton,
                                          const std::vector<PatternVar>& vars,
                                          const Expr& query) {
  DirectMatcher m{vars, {}, {}, {}};
  if (!m.run(skeleton, query)) return std::nullopt;
  return std::move(m.bindings);
}

// --- keys ----------------------------------------------------------------------------

namespace {

std::string bound_ref(std::size_t k, Sort s) {
  return "#" + std::to_string(k) + (s == Sort::Proposition ? "p" : "");
}

std::string quant_token(const Expr& e) {
  return e.name() + (e.bound_sort() == Sort::Proposition ? ":p" : "");
}

struct KeyBuilder {
  const std::vector<PatternVar>* vars = nullptr;  // null for queries
  std::vector<KeyToken> tokens;
  std::vector<std::string> slots;
  std::vector<std::string> env;
  // Query-only bookkeeping, one entry per token.
  std::vector<const Expr*> nodes;
  std::vector<std::size_t> ends;
  std::vector<bool> escapes;

  bool is_pattern_var(const std::string& name, Sort s) const {
    if (!vars) return false;
    return std::any_of(vars->begin(), vars->end(), [&](const PatternVar& v) {
      return v.name == name && v.sort == s;
    });
  }

  // Returns the outermost binder depth referenced from inside e (INT_MAX if none).
  int walk(const Expr& e) {
    const std::size_t pos = tokens.size();
    const int depth = static_cast<int>(env.size());
    int reach = INT_MAX;
    nodes.push_back(&e);
    ends.push_back(0);
    escapes.push_back(false);
    switch (e.kind()) {
      case ExprKind::Var: {
        auto it = std::find(env.rbegin(), env.rend(), e.name());
        if (it != env.rend()) {
          std::size_t k = static_cast<std::size_t>(it - env.rbegin());
          tokens.push_back({bound_ref(k, e.sort()), 0});
          reach = depth - 1 - static_cast<int>(k);
        } else if (is_pattern_var(e.name(), e.sort())) {
          tokens.push_back({std::string(e.sort() == Sort::Individual ? kWildcardIndividual
                                                                     : kWildcardProposition),
                            0});
          slots.push_back(e.name());
        } else {
          tokens.push_back({"$" + e.name(), 0});
        }
        break;
      }
      case ExprKind::Const:
        tokens.push_back({e.name(), 0});
        break;
      case ExprKind::Hole:
        tokens.push_back({std::string("▢"), 0});
        break;
      case ExprKind::App:
        tokens.push_back({e.name(), e.child_count()});
        for (const Expr& c : e.children()) reach = std::min(reach, walk(c));
        break;
      case ExprKind::Quant:
        tokens.push_back({quant_token(e), 1});
        env.push_back(e.bound());
        reach = std::min(reach, walk(e.body()));
        env.pop_back();
        break;
    }
    ends[pos] = tokens.size();
    escapes[pos] = reach < depth;
    return reach;
  }
};

}  // namespace

std::vector<KeyToken> pattern_key(const Pattern& p) {
  KeyBuilder b;
  b.vars = &p.vars;
  b.walk(p.skeleton);
  return std::move(b.tokens);
}

// --- trie ------------------------------------------------------------------------------

void LemmaIndex::insert(Pattern pat) {
  auto id = std::make_pair(pat.lemma_id, pat.orientation);
  if (ids_.count(id)) return;
  KeyBuilder b;
  b.vars = &pat.vars;
  b.walk(pat.skeleton);
  Node* node = &root_;
  for (const KeyToken& tok : b.tokens) {
    auto it = std::lower_bound(node->edges.begin(), node->edges.end(), tok,
                               [](const Edge& e, const KeyToken& k) { return e.key < k; });
    if (it == node->edges.end() || it->key != tok) {
      it = node->edges.insert(it, Edge{tok, Node{}});
    }
    node = &it->child;
  }
  node->entries.push_back(Entry{std::move(pat), std::move(b.slots)});
  ids_.insert(std::move(id));
  ++count_;
}

namespace {

struct TrieWalk {
  const KeyBuilder& q;
  std::vector<std::size_t> wild_positions;
  std::vector<MatchResult> out;

  void bind_entries(const LemmaIndex::Node& node) {
    for (const LemmaIndex::Entry& entry : node.entries) {
      Substitution bindings;
      bool ok = entry.slots.size() == wild_positions.size();
      for (std::size_t i = 0; ok && i < entry.slots.size(); ++i) {
        const Expr& sub = *q.nodes[wild_positions[i]];
        auto [it, inserted] = bindings.emplace(entry.slots[i], sub);
        if (!inserted && !alpha_eq(it->second, sub)) ok = false;
      }
      if (ok) out.push_back({entry.pattern, std::move(bindings)});
    }
  }

  void visit(const LemmaIndex::Node& node, std::size_t i) {
    if (i == q.tokens.size()) {
      bind_entries(node);
      return;
    }
    const Sort sort = q.nodes[i]->sort();
    const KeyToken wildcard{std::string(sort == Sort::Individual ? kWildcardIndividual
                                                                 : kWildcardProposition),
                            0};
    for (const KeyToken* key : {&q.tokens[i], &wildcard}) {
      auto it = std::lower_bound(node.edges.begin(), node.edges.end(), *key,
                                 [](const LemmaIndex::Edge& e, const KeyToken& k) {
                                   return e.key < k;
                                 });
      if (it == node.edges.end() || it->key != *key) continue;
      if (key == &wildcard) {
        if (q.escapes[i]) continue;
        wild_positions.push_back(i);
        visit(it->child, q.ends[i]);
        wild_positions.pop_back();
      } else {
        visit(it->child, i + 1);
      }
    }
  }
};

}  // namespace

std::vector<MatchResult> LemmaIndex::lookup(const Expr& query) const {
  if (query.has_hole()) return {};
  KeyBuilder q;
  q.walk(query);
  TrieWalk walk{q, {}, {}};
  walk.visit(root_, 0);
  std::sort(walk.out.begin(), walk.out.end(), [](const MatchResult& a, const MatchResult& b) {
    if (a.pattern.lemma_id != b.pattern.lemma_id) return a.pattern.lemma_id < b.pattern.lemma_id;
    return a.pattern.orientation < b.pattern.orientation;
  });
  return std::move(walk.out);
}

namespace {

void collect(const LemmaIndex::Node& n, std::vector<Pattern>& out) {
  for (const auto& e : n.entries) out.push_back(e.pattern);
  for (const auto& e : n.edges) collect(e.child, out);
}

}  // namespace

std::vector<Pattern> LemmaIndex::patterns() const {
  std::vector<Pattern> out;
  collect(root_, out);
  return out;
}

std::vector<KeyToken> LemmaIndex::root_edges() const {
  std::vector<KeyToken> out;
  for (const Edge& e : root_.edges) out.push_back(e.key);
  return out;
}

LemmaIndex insert(LemmaIndex index, Pattern pat) {
  index.insert(std::move(pat));
  return index;
}

std::vector<MatchResult> lookup(const LemmaIndex& index, const Expr& query) {
  return index.lookup(query);
}

}  // namespace deduce
