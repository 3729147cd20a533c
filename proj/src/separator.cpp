#include "tropa/separator.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tropa {

SepRun Separator::run(const Term& t) {
  auto annotation = annotate(bi_, t, bi_.final_state_set(), families());

  SepRun out;
  out.total_shift = Weight(0);
  std::function<Term(const Term&, NodePath&)> build = [&](const Term& node, NodePath& path) {
    std::vector<Term> reps;
    reps.reserve(node.children().size());
    for (std::size_t i = 0; i < node.children().size(); ++i) {
      path.push_back(static_cast<int>(i));
      reps.push_back(build(node.children()[i], path));
      path.pop_back();
    }
    const ProState& ann = annotation.at(path);
    Reduction red = reducer_.reduce(Term(node.letter(), std::move(reps)), ann.prod_set);
    out.total_shift += red.shift;
    out.nodes.emplace(path,
                      SepRunNode{SepState{ann.reach_set, ann.prod_set, red.term}, red.shift});
    return red.term;
  };
  NodePath path;
  build(t, path);
  return out;
}

SemValue Separator::evaluate(const Term& t) {
  SepRun r = run(t);
  const SepState& root = r.root().state;
  StateSet finals = bi_.final_state_set();
  if (!intersects(root.reach_set, finals)) return SemValue::bot();

  SemValue max_value = evaluate_half(bi_, Mode::Max, root.representative);
  if (max_value.is_bot()) {
    // Final weight would be the max semantics of the representative; reaching
    // a min-final state without any max-final one breaks equal support.
    throw HypothesisViolationError(
        HypothesisViolation{HypothesisViolation::SupportBreach{t}}, bi_);
  }
  return SemValue(max_value.value() + r.total_shift);
}

namespace {

std::string escape_term(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '(': out += '<'; break;
      case ')': out += '>'; break;
      case ',': out += '.'; break;
      default: out += c;
    }
  }
  return out;
}

std::string compact_set(const BiAutomaton& bi, const StateSet& s) {
  if (s.empty()) return "-";
  std::string out;
  for (StateId q : s) {
    if (!out.empty()) out += "+";
    out += bi.core().state_name(q);
  }
  return out;
}

std::string sep_state_name(const BiAutomaton& bi, const SepState& s) {
  return compact_set(bi, s.reach_set) + "|" + compact_set(bi, s.prod_set) + "|" +
         escape_term(s.representative.str());
}

}  // namespace

std::variant<MaterializedSep, BudgetExceeded> Separator::materialize(std::size_t state_budget) {
  const Families& fam = families();
  const RankedAlphabet& alphabet = bi_.core().alphabet();

  std::vector<SepState> states;
  std::map<SepState, StateId> ids;
  std::vector<Transition> transitions;
  std::set<std::tuple<std::string, std::vector<StateId>, StateId>> trans_seen;

  auto intern = [&](SepState s) -> std::optional<StateId> {
    if (auto it = ids.find(s); it != ids.end()) return it->second;
    if (states.size() + 1 > state_budget) return std::nullopt;
    StateId id = static_cast<StateId>(states.size());
    ids.emplace(s, id);
    states.push_back(std::move(s));
    return id;
  };
  auto add_transition = [&](Transition tr) {
    if (trans_seen.insert({tr.letter, tr.children, tr.target}).second)
      transitions.push_back(std::move(tr));
  };

  // Seed: rank-0 letters under every productive set.
  for (const auto& [letter, rank] : alphabet.letters()) {
    if (rank != 0) continue;
    StateSet r = bottom_up_reach(bi_, letter, {});
    for (const StateSet& p : fam.productive) {
      Reduction red = reducer_.reduce(Term(letter), p);
      auto id = intern(SepState{r, p, red.term});
      if (!id) return BudgetExceeded{states.size() + 1};
      add_transition(Transition{{}, letter, *id, red.shift});
    }
  }

  // Close under the remaining letters. Each round combines only tuples that
  // involve at least one state discovered since the previous round, so every
  // tuple is visited once and hitting the budget stays cheap.
  std::optional<BudgetExceeded> exceeded;
  auto combine = [&](const std::string& letter, const std::vector<std::size_t>& idx) {
    int rank = static_cast<int>(idx.size());
    std::vector<StateSet> child_reach;
    std::vector<StateId> child_ids;
    for (int i = 0; i < rank; ++i) {
      child_reach.push_back(states[idx[i]].reach_set);
      child_ids.push_back(static_cast<StateId>(idx[i]));
    }
    StateSet r = bottom_up_reach(bi_, letter, child_reach);
    for (const StateSet& p : fam.productive) {
      bool valid = true;
      for (int i = 0; i < rank && valid; ++i)
        valid = top_down_prod(bi_, letter, child_reach, p, i) == states[idx[i]].prod_set;
      if (!valid) continue;
      std::vector<Term> reps;
      reps.reserve(rank);
      for (int i = 0; i < rank; ++i) reps.push_back(states[idx[i]].representative);
      Reduction red = reducer_.reduce(Term(letter, std::move(reps)), p);
      auto id = intern(SepState{r, p, red.term});
      if (!id) {
        exceeded = BudgetExceeded{states.size() + 1};
        return false;
      }
      add_transition(Transition{child_ids, letter, *id, red.shift});
    }
    return true;
  };

  std::size_t processed = 0;  // states all of whose tuples have been combined
  bool changed = true;
  while (changed && !exceeded) {
    changed = false;
    std::size_t known = states.size();
    std::size_t trans_known = transitions.size();
    for (const auto& [letter, rank] : alphabet.letters()) {
      if (rank == 0 || known == 0) continue;
      // Tuples with the first new state at position fresh: earlier positions
      // range over the processed states, later ones over everything known.
      for (int fresh = 0; fresh < rank && !exceeded; ++fresh) {
        std::vector<std::size_t> lo(rank, 0), hi(rank, known);
        lo[fresh] = processed;
        for (int i = 0; i < fresh; ++i) hi[i] = processed;
        bool empty = false;
        for (int i = 0; i < rank; ++i) empty = empty || lo[i] >= hi[i];
        if (empty) continue;
        std::vector<std::size_t> idx(lo);
        while (true) {
          if (!combine(letter, idx)) break;
          int j = rank - 1;
          while (j >= 0 && ++idx[j] == hi[j]) idx[j] = lo[j], --j;
          if (j < 0) break;
        }
      }
    }
    processed = known;
    changed = states.size() != known || transitions.size() != trans_known;
  }
  if (exceeded) return *exceeded;

  StateSet finals_bi = bi_.final_state_set();
  std::map<StateId, Weight> finals;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const SepState& s = states[i];
    if (s.prod_set != finals_bi || !intersects(s.reach_set, finals_bi)) continue;
    SemValue v = evaluate_half(bi_, Mode::Max, s.representative);
    if (v.is_bot())
      throw HypothesisViolationError(
          HypothesisViolation{HypothesisViolation::SupportBreach{s.representative}}, bi_);
    finals.emplace(static_cast<StateId>(i), v.value());
  }

  std::vector<std::string> names;
  std::vector<std::pair<std::string, SepState>> table;
  names.reserve(states.size());
  for (const SepState& s : states) {
    names.push_back(sep_state_name(bi_, s));
    table.emplace_back(names.back(), s);
  }
  Wta wta(Automaton(alphabet, std::move(names), std::move(finals), std::move(transitions)),
          Mode::Max);
  return MaterializedSep{std::move(wta), std::move(table)};
}

std::string MaterializedSep::sidecar_json(const BiAutomaton& bi) const {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& [name, s] : state_table) {
    nlohmann::json reach_names = nlohmann::json::array(), prod_names = nlohmann::json::array();
    for (StateId q : s.reach_set) reach_names.push_back(bi.core().state_name(q));
    for (StateId q : s.prod_set) prod_names.push_back(bi.core().state_name(q));
    states.push_back(nlohmann::json{{"name", name},
                                    {"reach", std::move(reach_names)},
                                    {"prod", std::move(prod_names)},
                                    {"term", s.representative.str()}});
  }
  return nlohmann::json{{"states", std::move(states)}}.dump(2);
}

SemValue evaluate_sep(const BiAutomaton& bi, const Term& t) { return Separator(bi).evaluate(t); }

SepRun run_sep(const BiAutomaton& bi, const Term& t) { return Separator(bi).run(t); }

std::variant<MaterializedSep, BudgetExceeded> materialize_sep(const BiAutomaton& bi,
                                                              std::size_t state_budget) {
  return Separator(bi).materialize(state_budget);
}

}  // namespace tropa
