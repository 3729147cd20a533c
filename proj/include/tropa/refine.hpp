#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tropa/reachprod.hpp"
#include "tropa/term.hpp"
#include "tropa/wta.hpp"

namespace tropa {

/// Witness pair of a refinement-with-shift claim: `target` refines `source`
/// for `prod_set` with shift `shift`. check_refinement re-validates it.
struct ShiftCertificate {
  Term source;
  Term target;
  StateSet prod_set;
  Weight shift;
  friend bool operator==(const ShiftCertificate&, const ShiftCertificate&) = default;
  friend bool operator<(const ShiftCertificate& a, const ShiftCertificate& b) {
    if (a.source != b.source) return a.source < b.source;
    if (a.target != b.target) return a.target < b.target;
    if (a.prod_set != b.prod_set) return a.prod_set < b.prod_set;
    return a.shift < b.shift;
  }
};

nlohmann::json certificate_to_json(const BiAutomaton& bi, const ShiftCertificate& cert);
ShiftCertificate certificate_from_json(const BiAutomaton& bi, const nlohmann::json& j);

/// Structured evidence that the max semantics exceeds the min semantics
/// somewhere. A cycle gap pumps into an unbounded counterexample family
/// c∘loopⁿ∘t; a support breach is a term accepted by one half only.
struct HypothesisViolation {
  struct CycleGap {
    Context loop;
    StateId max_state;
    StateId min_state;
    Weight max_cycle_weight;
    Weight min_cycle_weight;
  };
  struct SupportBreach {
    Term witness;
  };
  std::variant<CycleGap, SupportBreach> detail;

  std::string describe(const BiAutomaton& bi) const;
};

class HypothesisViolationError : public std::runtime_error {
 public:
  HypothesisViolationError(HypothesisViolation violation, const BiAutomaton& bi)
      : std::runtime_error(violation.describe(bi)), violation_(std::move(violation)) {}
  const HypothesisViolation& violation() const { return violation_; }

 private:
  HypothesisViolation violation_;
};

// True iff target refines source for prod_set with the given shift:
// equal reach sets, and for every state of prod_set reachable in source,
// best(source) <= best(target) + shift on the max side and
// best(target) + shift <= best(source) on the min side. A single optimal
// run answers every challenge of the per-run definition, which is what makes
// this a constant number of table lookups instead of an enumeration.
bool check_refinement(const BiAutomaton& bi, const Term& source, const Term& target,
                      const StateSet& prod_set, const Weight& shift);

// Chains s -> t -> u into s -> u with the summed shift.
ShiftCertificate compose_transitive(const ShiftCertificate& first, const ShiftCertificate& second);

// Lifts child certificates through a letter along a valid annotation
// transition; the resulting shift is the sum of the child shifts.
ShiftCertificate compose_congruence(const BiAutomaton& bi, const std::string& letter,
                                    const std::vector<ShiftCertificate>& child_certs,
                                    const ProTransition& pro_transition);

// A shift separating all max cycle weights from all min cycle weights of the
// loop context, over states of prod_set ∩ reach_set. When the two sides
// overlap the hypothesis is refuted and the gap is returned instead.
using PumpingResult = std::variant<Weight, HypothesisViolation>;
PumpingResult pumping_shift(const BiAutomaton& bi, const Context& loop, const StateSet& prod_set,
                            const StateSet& reach_set);

// (4·|states|)^|states|: above this height a size reduction always exists.
BigInt k_bound(const BiAutomaton& bi);

// Deterministic optimal run into `target`: optimal per the state's origin,
// ties broken by the lexicographically least child-state tuple at each node
// in root-down order. nullopt when the state is unreachable.
std::optional<Run> canonical_optimal_run(const BiAutomaton& bi, const Term& t, StateId target);

struct Reduction {
  Term term;
  Weight shift;
};

// One size-reducing refinement step for prod_root, or nullopt when no redex
// exists. Deterministic: the cut pair is the deepest (then shortest) pair of
// equal-signature nodes along the leftmost longest branch, the leaf excluded.
// Throws HypothesisViolationError when the pumping shift does not exist.
std::optional<Reduction> reduce_once(const BiAutomaton& bi, const Term& t,
                                     const StateSet& prod_root, const Families& fam);
std::optional<Reduction> reduce_once(const BiAutomaton& bi, const Term& t,
                                     const StateSet& prod_root);

// Iterates reduce_once to a normal form, summing shifts. Appends the
// per-step certificates to *steps when given.
Reduction shift_reduce(const BiAutomaton& bi, const Term& t, const StateSet& prod_root,
                       const Families& fam, std::vector<ShiftCertificate>* steps = nullptr);
Reduction shift_reduce(const BiAutomaton& bi, const Term& t, const StateSet& prod_root,
                       std::vector<ShiftCertificate>* steps = nullptr);

/// Memoizing front end for shift_reduce, shared across an evaluation or
/// materialization; safe to call from multiple threads.
class ShiftReducer {
 public:
  explicit ShiftReducer(const BiAutomaton& bi);

  Reduction reduce(const Term& t, const StateSet& prod_root);
  const Families& families() const { return fam_; }
  const BiAutomaton& bi() const { return bi_; }

  // Receives every certificate emitted by fresh reductions (memo hits do not
  // re-emit). Used by the oracle suites to audit the construction.
  void set_certificate_sink(std::function<void(const ShiftCertificate&)> sink);

 private:
  const BiAutomaton& bi_;
  Families fam_;
  std::map<std::pair<Term, StateSet>, Reduction> memo_;
  std::function<void(const ShiftCertificate&)> sink_;
  std::mutex mu_;
};

}  // namespace tropa
