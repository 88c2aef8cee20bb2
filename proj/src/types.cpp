#include <concentric/types.hpp>

#include <concentric/errors.hpp>

#include <algorithm>
#include <cctype>
#include <string>

namespace concentric {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::LS: return "LS";
    case Method::OLeary: return "OLeary";
    case Method::Taubin: return "Taubin";
    case Method::SemiHyper: return "SemiHyper";
    case Method::Hyper: return "Hyper";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ls") return Method::LS;
  if (lower == "oleary" || lower == "ol" || lower == "ole") return Method::OLeary;
  if (lower == "taubin" || lower == "tau") return Method::Taubin;
  if (lower == "semi" || lower == "semihyper" || lower == "semi-hyper") return Method::SemiHyper;
  if (lower == "hyper") return Method::Hyper;
  throw InputError("unknown method '" + std::string(name) + "'");
}

}  // namespace concentric
