#include "hessflow/catalog.hpp"

#include <cctype>
#include <cstdlib>

#include "hessflow/errors.hpp"

namespace hessflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

CatalogRef parse_catalog_ref(const std::string& text) {
  const std::string s = trim(text);
  CatalogRef ref;
  const auto open = s.find('(');
  if (open == std::string::npos) {
    if (s.find(')') != std::string::npos) throw InvalidArgument("unbalanced ')' in '" + text + "'");
    ref.name = s;
  } else {
    if (s.back() != ')') throw InvalidArgument("expected ')' at end of '" + text + "'");
    ref.name = trim(s.substr(0, open));
    ref.has_parens = true;
    std::string body = s.substr(open + 1, s.size() - open - 2);
    for (char& c : body)
      if (c == ',' || c == ';') c = ' ';
    const char* p = body.c_str();
    while (true) {
      while (*p && std::isspace(static_cast<unsigned char>(*p))) ++p;
      if (!*p) break;
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw InvalidArgument("non-numeric argument in '" + text + "'");
      ref.args.push_back(v);
      p = end;
    }
  }
  if (ref.name.empty()) throw InvalidArgument("empty catalog name in '" + text + "'");
  for (char c : ref.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      throw InvalidArgument("invalid character in catalog name '" + ref.name + "'");
  return ref;
}

}  // namespace hessflow
