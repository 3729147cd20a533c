#pragma once

#include <string>

#include "tropa/wta.hpp"

namespace tropa::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(TROPA_FIXTURE_DIR) + "/" + name;
}

inline Wta load_fixture(const std::string& name) { return Wta::load(fixture_path(name)); }

inline Term unary_tower(const std::string& letter, const std::string& leaf, int n) {
  Term t{leaf};
  for (int i = 0; i < n; ++i) t = Term(letter, {std::move(t)});
  return t;
}

}  // namespace tropa::test
