#pragma once

// Rendered proof views. Every user-visible string appears as
// {"key", "args", "text"}: the catalog key and arguments plus the text
// rendered for the requested locale.

#include <string>
#include <vector>

#include "deduce/error.hpp"
#include "deduce/i18n.hpp"
#include "deduce/kernel.hpp"
#include "json.hpp"

namespace deduce {

nlohmann::json message_json(const Catalog& cat, const std::string& key,
                            const std::vector<std::string>& args = {});

// Formulas with numbers, roles, statuses and scope markers, plus proof status.
nlohmann::json render_view(const ProofState& s, const Catalog& cat);
nlohmann::json render_descriptor(const StepDescriptor& d, const ProofState& s,
                                 const Catalog& cat);
// {"error": {"code", "key", "args", "message", "step"?, "offset"?}}
nlohmann::json render_error(const Error& e, const Catalog& cat);

// Plain-text listing used by the command line.
std::string view_text(const ProofState& s, const Catalog& cat);

}  // namespace deduce
