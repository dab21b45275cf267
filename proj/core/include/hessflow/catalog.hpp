#pragma once

#include <string>
#include <vector>

namespace hessflow {

/// A parsed catalog reference such as "flat_torus(1, 2)" -> {"flat_torus", {1, 2}}.
/// Arguments may be separated by commas, semicolons or whitespace.
struct CatalogRef {
  std::string name;
  std::vector<double> args;
  bool has_parens = false;
};

/// Throws InvalidArgument on malformed input.
CatalogRef parse_catalog_ref(const std::string& text);

}  // namespace hessflow
