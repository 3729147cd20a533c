#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropa/separator.hpp"

namespace tropa {

/// Outcome of one exhaustive check. A Fail always carries a witness that can
/// be replayed through the CLI in the text formats of this library.
struct Report {
  enum class Verdict { Pass, Fail, Violation };

  std::string name;
  Verdict verdict = Verdict::Pass;
  long long checked = 0;
  std::string witness;  // empty when passing
  std::string detail;
  std::chrono::milliseconds duration{0};
  std::vector<Report> children;

  Verdict overall() const;
  bool passed() const { return overall() == Verdict::Pass; }
  nlohmann::json to_json() const;
  void print(std::ostream& out, int indent = 0) const;
};

struct OracleOptions {
  int workers = 1;
  // Deliberately re-checks the min side of shift-refine-improves with an
  // inflated shift; the suite must then fail. Keeps the checker honest.
  bool corrupt_min_shift = false;
};

// Bounded evidence for max <= min with equal support, over every term of
// height <= height_bound. Never a proof: the unbounded question is undecidable.
Report check_hypothesis(const Wta& max_half, const Wta& min_half, int height_bound,
                        const OracleOptions& options = {});

// max <= separator <= min with equal support, exhaustively.
Report verify_separation(const Wta& max_half, const Wta& min_half, int height_bound,
                         const OracleOptions& options = {});

// One sub-report per lemma-level property, over terms of height <=
// height_bound and contexts of height <= height_bound - 1.
Report verify_lemma_suite(const BiAutomaton& bi, int height_bound,
                          const OracleOptions& options = {});

// For pairs computing the same function: separator == max == min everywhere.
Report check_lm_corollary(const Wta& max_half, const Wta& min_half, int height_bound,
                          const OracleOptions& options = {});

// 10 for word-shaped alphabets, 4 otherwise; keeps exhaustive enumeration
// around 1e5 terms.
int default_height_bound(const RankedAlphabet& alphabet);

// The per-run quantified refinement definition, decided by full run
// enumeration; the independent cross-check for check_refinement.
bool check_refinement_by_enumeration(const BiAutomaton& bi, const Term& source, const Term& target,
                                     const StateSet& prod_set, const Weight& shift);

}  // namespace tropa
