#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tropa/term.hpp"
#include "tropa/weight.hpp"

namespace tropa {

using StateId = int;
using StateSet = std::set<StateId>;

enum class Mode { Max, Min };

struct Transition {
  std::vector<StateId> children;
  std::string letter;
  StateId target = 0;
  Weight weight;
};

/// Weighted transition structure shared by tropical automata and the
/// bi-automaton: states, final weights, and transitions, with no commitment
/// to a min or max reading.
class Automaton {
 public:
  Automaton(RankedAlphabet alphabet, std::vector<std::string> state_names,
            std::map<StateId, Weight> final_weights, std::vector<Transition> transitions);

  const RankedAlphabet& alphabet() const { return alphabet_; }
  int state_count() const { return static_cast<int>(state_names_.size()); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::string& state_name(StateId q) const { return state_names_.at(q); }
  std::optional<StateId> state_id(std::string_view name) const;
  const std::map<StateId, Weight>& final_weights() const { return final_weights_; }
  bool is_final(StateId q) const { return final_weights_.count(q) != 0; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  // Indices into transitions() for a letter; empty for letters with no rules.
  const std::vector<int>& transitions_for(const std::string& letter) const;

 private:
  RankedAlphabet alphabet_;
  std::vector<std::string> state_names_;
  std::map<StateId, Weight> final_weights_;
  std::vector<Transition> transitions_;
  std::map<std::string, std::vector<int>> by_letter_;
};

/// A max-plus or min-plus tree automaton.
class Wta {
 public:
  Wta(Automaton core, Mode mode) : core_(std::move(core)), mode_(mode) {}

  const Automaton& core() const { return core_; }
  Mode mode() const { return mode_; }

  static Wta parse(std::string_view text);
  static Wta load(const std::string& path);
  std::string str() const;

 private:
  Automaton core_;
  Mode mode_;
};

/// Disjoint union of a max-plus and a min-plus automaton. States
/// 0..max_state_count()-1 come from the max half; transitions never mix halves.
class BiAutomaton {
 public:
  BiAutomaton(Automaton core, int max_state_count);

  const Automaton& core() const { return core_; }
  int max_state_count() const { return max_count_; }
  Mode origin(StateId q) const { return q < max_count_ ? Mode::Max : Mode::Min; }
  const std::vector<Mode>& origins() const { return origins_; }
  StateSet final_state_set() const;

 private:
  Automaton core_;
  int max_count_;
  std::vector<Mode> origins_;
};

// Renames colliding state names (trailing apostrophes on the min half).
BiAutomaton disjoint_union(const Wta& max_half, const Wta& min_half);

// ---- semantics ----------------------------------------------------------

SemValue evaluate(const Wta& a, const Term& t);
// Semantics of one half of the bi-automaton, restricted to its own states.
SemValue evaluate_half(const BiAutomaton& bi, Mode half, const Term& t);

// Optimal run weight (no final weight) into each state; bot when unreachable.
// The optimum is max or min per state as dictated by `dirs`.
std::vector<SemValue> best_to_state(const Wta& a, const Term& t);
std::vector<SemValue> best_to_state(const BiAutomaton& bi, const Term& t);

// Per-node tables for every subterm, keyed by node path. The root entry is
// best_to_state. Used by the refinement machinery to reconstruct optimal runs.
std::map<NodePath, std::vector<SemValue>> best_tables(const Automaton& a,
                                                      const std::vector<Mode>& dirs,
                                                      const Term& t);

/// Optimal run weights across a context, indexed by (state at hole, state at root).
class PairTable {
 public:
  explicit PairTable(int n) : n_(n), cells_(static_cast<std::size_t>(n) * n) {}
  SemValue& at(StateId from, StateId to) { return cells_[static_cast<std::size_t>(from) * n_ + to]; }
  const SemValue& at(StateId from, StateId to) const {
    return cells_[static_cast<std::size_t>(from) * n_ + to];
  }
  int states() const { return n_; }

 private:
  int n_;
  std::vector<SemValue> cells_;
};

PairTable best_context(const Wta& a, const Context& c);
PairTable best_context(const BiAutomaton& bi, const Context& c);

// ---- exhaustive run enumeration (oracle support) -------------------------

inline constexpr std::size_t kDefaultRunLimit = 2'000'000;

struct Run {
  std::map<NodePath, StateId> states;
  Weight weight;  // sum of transition weights, final weight not included
  StateId root_state() const { return states.at({}); }
};

std::vector<Run> enumerate_runs(const Automaton& a, const Term& t,
                                std::size_t limit = kDefaultRunLimit);
std::vector<Run> accepting_runs(const Automaton& a, const std::vector<Run>& runs);

struct ContextRun {
  std::map<NodePath, StateId> states;  // includes the hole node
  StateId hole_state = 0;
  Weight weight;
  StateId root_state() const { return states.at({}); }
};

std::vector<ContextRun> enumerate_context_runs(const Automaton& a, const Context& c,
                                               std::size_t limit = kDefaultRunLimit);
// Streaming variant carrying only (hole state, root state, weight); used by
// the pumping oracle where materializing every run would be wasteful.
void for_each_context_run_weight(const Automaton& a, const Context& c,
                                 const std::function<void(StateId, StateId, const Weight&)>& fn);

// Unambiguity of the underlying NFA, weights ignored. Returns a witness term
// of minimal height admitting two distinct accepting runs, or nullopt.
std::optional<Term> decide_ambiguity(const Automaton& a);

}  // namespace tropa
