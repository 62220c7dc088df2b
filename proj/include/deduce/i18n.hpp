#pragma once

// Message catalogs: flat "key=template" files, one per locale. Templates use
// positional placeholders {0}, {1}, ...; an argument of the form "@key" is
// itself looked up in the catalog before substitution.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace deduce {

class Catalog {
 public:
  // Blank lines and lines starting with '#' are ignored. Throws
  // std::invalid_argument on a line without '='.
  static Catalog parse(std::string_view text);

  bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }
  // Unknown keys render as the key itself so that nothing is silently lost.
  std::string render(std::string_view key, const std::vector<std::string>& args = {}) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

inline constexpr std::string_view kDefaultLocale = "en";

std::vector<std::string> available_locales();
// Built-in catalog for a locale; unknown locales fall back to English.
const Catalog& catalog(std::string_view locale);

// Picks "en" or "pl": an explicit ?lang= wins, then the first supported
// Accept-Language tag, then the fallback.
std::string negotiate_locale(std::string_view accept_language, std::string_view query_lang,
                             std::string_view fallback = kDefaultLocale);

}  // namespace deduce
