#include "deduce/i18n.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace deduce {

// Generated at configure time from share/messages/*.txt.
extern const char* const kCatalogEn;
extern const char* const kCatalogPl;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Catalog Catalog::parse(std::string_view text) {
  Catalog c;
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("catalog line " + std::to_string(lineno) + " has no '='");
    }
    c.entries_[std::string(trim(line.substr(0, eq)))] = std::string(line.substr(eq + 1));
  }
  return c;
}

std::string Catalog::render(std::string_view key, const std::vector<std::string>& args) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::string(key);
  const std::string& t = it->second;
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '{') {
      auto close = t.find('}', i);
      if (close != std::string::npos && close > i + 1 &&
          std::all_of(t.begin() + i + 1, t.begin() + close,
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        std::size_t k = std::stoul(t.substr(i + 1, close - i - 1));
        if (k < args.size()) {
          const std::string& a = args[k];
          out += (a.size() > 1 && a[0] == '@') ? render(std::string_view(a).substr(1)) : a;
        }
        i = close;
        continue;
      }
    }
    out += t[i];
  }
  return out;
}

std::vector<std::string> available_locales() { return {"en", "pl"}; }

const Catalog& catalog(std::string_view locale) {
  static const Catalog en = Catalog::parse(kCatalogEn);
  static const Catalog pl = Catalog::parse(kCatalogPl);
  return locale == "pl" ? pl : en;
}

std::string negotiate_locale(std::string_view accept_language, std::string_view query_lang,
                             std::string_view fallback) {
  auto supported = [](std::string_view tag) -> std::string {
    std::string t;
    for (char c : tag.substr(0, 2)) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return (t == "en" || t == "pl") && (tag.size() == 2 || tag[2] == '-' || tag[2] == '_')
               ? t
               : std::string();
  };
  if (auto q = supported(trim(query_lang)); !q.empty()) return q;
  // Highest q wins; ties go to the earlier tag.
  std::string best;
  double best_q = -1;
  while (!accept_language.empty()) {
    auto comma = accept_language.find(',');
    std::string_view item = trim(accept_language.substr(0, comma));
    accept_language = comma == std::string_view::npos ? std::string_view{}
                                                       : accept_language.substr(comma + 1);
    double q = 1.0;
    auto semi = item.find(';');
    if (semi != std::string_view::npos) {
      std::string_view param = trim(item.substr(semi + 1));
      if (param.starts_with("q=")) {
        try {
          q = std::stod(std::string(param.substr(2)));
        } catch (const std::exception&) {
          q = 0;
        }
      }
      item = trim(item.substr(0, semi));
    }
    if (auto t = supported(item); !t.empty() && q > best_q) {
      best = t;
      best_q = q;
    }
  }
  return best.empty() ? std::string(fallback) : best;
}

}  // namespace deduce
