#include "deduce/views.hpp"

#include "deduce/script.hpp"
#include "deduce/syntax.hpp"

namespace deduce {

using nlohmann::json;

json message_json(const Catalog& cat, const std::string& key,
                  const std::vector<std::string>& args) {
  return {{"key", key}, {"args", args}, {"text", cat.render(key, args)}};
}

namespace {

json status_message(const ProofState& s, const Catalog& cat) {
  if (is_complete(s)) return message_json(cat, "view.complete");
  if (s.active_goal() == 0) return message_json(cat, "view.noActiveGoal");
  return message_json(cat, "view.inProgress", {std::to_string(s.active_goal())});
}

}  // namespace

json render_view(const ProofState& s, const Catalog& cat) {
  json formulas = json::array();
  for (const auto& [n, e] : s.formulas()) {
    const std::string mark(marker(s, n));
    json f = {{"number", n},
              {"role", role_name(e.role)},
              {"text", print(e.formula)},
              {"branch", e.owner},
              {"marker", mark},
              {"markerLabel", message_json(cat, "marker." + mark)},
              {"roleLabel", message_json(cat, "role." + std::string(role_name(e.role)))}};
    if (e.role == Role::Goal) {
      f["status"] = goal_status_name(e.status);
      f["subgoals"] = e.subgoals;
    } else {
      f["inScope"] = s.in_scope(n);
    }
    formulas.push_back(std::move(f));
  }
  return {{"complete", is_complete(s)},
          {"activeGoal", s.active_goal() ? json(s.active_goal()) : json(nullptr)},
          {"canUndo", s.can_undo()},
          {"canRedo", s.can_redo()},
          {"steps", s.history().size()},
          {"status", status_message(s, cat)},
          {"formulas", std::move(formulas)}};
}

json render_descriptor(const StepDescriptor& d, const ProofState& s, const Catalog& cat) {
  json adds = json::array();
  for (const FormulaPreview& p : d.adds) {
    adds.push_back({{"number", p.number}, {"role", role_name(p.role)}, {"text", p.text}});
  }
  json bindings = json::object();
  for (const auto& [k, v] : d.bindings) bindings[k] = v;
  json out = {{"record", to_json(d.record)},
              {"complete", d.complete()},
              {"needsTerm", d.needs_term ? json(sort_name(*d.needs_term)) : json(nullptr)},
              {"label", message_json(cat, d.label_key)},
              {"effect", message_json(cat, d.effect_key, d.effect_args)},
              {"adds", std::move(adds)},
              {"closes", d.closes},
              {"bindings", std::move(bindings)}};
  if (d.record.lemma) {
    if (const Lemma* l = s.context().find_lemma(*d.record.lemma)) {
      out["lemmaName"] = message_json(cat, l->display_key);
    }
  }
  return out;
}

json render_error(const Error& e, const Catalog& cat) {
  json err = {{"code", error_code_name(e.code())},
              {"key", e.key()},
              {"args", e.args()},
              {"message", cat.render(e.key(), e.args())}};
  if (auto* r = dynamic_cast<const ReplayError*>(&e)) {
    err["step"] = r->index() + 1;
    err["cause"] = error_code_name(r->cause_code());
  }
  if (auto* p = dynamic_cast<const ParseError*>(&e)) err["offset"] = p->offset();
  return {{"error", std::move(err)}};
}

std::string view_text(const ProofState& s, const Catalog& cat) {
  std::string out;
  for (const auto& [n, e] : s.formulas()) {
    const std::string mark(marker(s, n));
    out += "  " + std::to_string(n) + ". [" + cat.render("role." + std::string(role_name(e.role))) +
           ", " + cat.render("marker." + mark) + "] " + print(e.formula) + "\n";
  }
  out += "  " + status_message(s, cat)["text"].get<std::string>() + "\n";
  return out;
}

}  // namespace deduce
