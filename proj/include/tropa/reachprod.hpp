#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tropa/term.hpp"
#include "tropa/wta.hpp"

namespace tropa {

/// State of the annotation automaton: a reachable set paired with a
/// productive set.
struct ProState {
  StateSet reach_set;
  StateSet prod_set;
  friend bool operator==(const ProState&, const ProState&) = default;
  friend auto operator<=>(const ProState&, const ProState&) = default;
};

/// The finite families {Reach(t) | t term} and {Prod(c) | c context},
/// computed by least fixpoint over the (finite) powerset.
struct Families {
  std::set<StateSet> reachable;
  std::set<StateSet> productive;
};

struct ProTransition {
  std::vector<ProState> children;
  std::string letter;
  ProState target;
};

// States reachable at the root by some run over t.
StateSet reach(const BiAutomaton& bi, const Term& t);
// States from which some accepting run over c exists.
StateSet prod(const BiAutomaton& bi, const Context& c);

// One step of each analysis, exactly the transition constraints of the
// annotation automaton. `child_index` of `child_reach` is ignored by
// top_down_prod, matching the defining comprehension.
StateSet bottom_up_reach(const BiAutomaton& bi, const std::string& letter,
                         const std::vector<StateSet>& child_reach);
StateSet top_down_prod(const BiAutomaton& bi, const std::string& letter,
                       const std::vector<StateSet>& child_reach, const StateSet& parent_prod,
                       int child_index);

Families families(const BiAutomaton& bi);

// The unique annotation run over t ending with productive component
// prod_at_root: reach sets bottom-up, productive sets top-down. Requires
// prod_at_root to be a member of the productive family; any internal
// inconsistency aborts with std::logic_error.
std::map<NodePath, ProState> annotate(const BiAutomaton& bi, const Term& t,
                                      const StateSet& prod_at_root, const Families& fam);
std::map<NodePath, ProState> annotate(const BiAutomaton& bi, const Term& t,
                                      const StateSet& prod_at_root);

/// Explicit annotation automaton, materialized for the oracle suites only;
/// ordinary use realizes its unique run via annotate().
struct ProAutomaton {
  Automaton nfa;                  // zero weights, finals (R, biF)
  std::vector<ProState> states;   // aligned with nfa state ids
};
ProAutomaton materialize_pro(const BiAutomaton& bi);

std::string state_set_str(const BiAutomaton& bi, const StateSet& s);

inline bool intersects(const StateSet& a, const StateSet& b) {
  for (StateId q : a)
    if (b.count(q)) return true;
  return false;
}

inline StateSet intersect(const StateSet& a, const StateSet& b) {
  StateSet out;
  for (StateId q : a)
    if (b.count(q)) out.insert(q);
  return out;
}

}  // namespace tropa
