#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tropa/refine.hpp"

namespace tropa {

/// State of the separating automaton: reach set, productive set, and a
/// reduced representative term with the same reach set.
struct SepState {
  StateSet reach_set;
  StateSet prod_set;
  Term representative;
  friend bool operator==(const SepState&, const SepState&) = default;
  friend auto operator<=>(const SepState&, const SepState&) = default;
};

struct SepRunNode {
  SepState state;
  Weight shift;  // weight of the transition taken at this node
};

/// The unique run of the separating automaton over a term, with per-node
/// shifts; the value of the automaton is max-semantics(root representative)
/// plus the total shift.
struct SepRun {
  std::map<NodePath, SepRunNode> nodes;
  Weight total_shift;
  const SepRunNode& root() const { return nodes.at(NodePath{}); }
};

struct MaterializedSep {
  Wta automaton;
  std::vector<std::pair<std::string, SepState>> state_table;  // name -> components
  std::string sidecar_json(const BiAutomaton& bi) const;
};

struct BudgetExceeded {
  std::size_t frontier_size;
};

/// On-the-fly interface to the separating automaton for one bi-automaton;
/// holds the families and the shift-reduction cache. Distinct terms may be
/// evaluated from different threads.
class Separator {
 public:
  explicit Separator(const BiAutomaton& bi) : bi_(bi), reducer_(bi) {}

  SemValue evaluate(const Term& t);
  SepRun run(const Term& t);
  // Best-effort fixpoint materialization; gives up once more than
  // state_budget states have been discovered.
  std::variant<MaterializedSep, BudgetExceeded> materialize(std::size_t state_budget);

  const BiAutomaton& bi() const { return bi_; }
  const Families& families() const { return reducer_.families(); }
  ShiftReducer& reducer() { return reducer_; }

 private:
  const BiAutomaton& bi_;
  ShiftReducer reducer_;
};

SemValue evaluate_sep(const BiAutomaton& bi, const Term& t);
SepRun run_sep(const BiAutomaton& bi, const Term& t);
std::variant<MaterializedSep, BudgetExceeded> materialize_sep(const BiAutomaton& bi,
                                                              std::size_t state_budget);

}  // namespace tropa
