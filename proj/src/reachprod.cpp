#include "tropa/reachprod.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tropa {

namespace {

void check_letter(const BiAutomaton& bi, const std::string& letter, std::size_t child_count) {
  if (!bi.core().alphabet().contains(letter))
    throw std::invalid_argument("alphabet mismatch: unknown letter '" + letter + "'");
  if (bi.core().alphabet().rank(letter) != static_cast<int>(child_count))
    throw std::invalid_argument("alphabet mismatch: arity of '" + letter + "'");
}

}  // namespace

StateSet bottom_up_reach(const BiAutomaton& bi, const std::string& letter,
                         const std::vector<StateSet>& child_reach) {
  check_letter(bi, letter, child_reach.size());
  StateSet out;
  for (int i : bi.core().transitions_for(letter)) {
    const Transition& tr = bi.core().transitions()[i];
    bool ok = true;
    for (std::size_t j = 0; j < tr.children.size(); ++j)
      if (!child_reach[j].count(tr.children[j])) {
        ok = false;
        break;
      }
    if (ok) out.insert(tr.target);
  }
  return out;
}

StateSet top_down_prod(const BiAutomaton& bi, const std::string& letter,
                       const std::vector<StateSet>& child_reach, const StateSet& parent_prod,
                       int child_index) {
  check_letter(bi, letter, child_reach.size());
  if (child_index < 0 || static_cast<std::size_t>(child_index) >= child_reach.size())
    throw std::invalid_argument("top_down_prod: child index out of range");
  StateSet out;
  for (int i : bi.core().transitions_for(letter)) {
    const Transition& tr = bi.core().transitions()[i];
    if (!parent_prod.count(tr.target)) continue;
    bool ok = true;
    for (std::size_t j = 0; j < tr.children.size(); ++j) {
      if (static_cast<int>(j) == child_index) continue;
      if (!child_reach[j].count(tr.children[j])) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(tr.children[child_index]);
  }
  return out;
}

namespace {

StateSet reach_of(const BiAutomaton& bi, const Term& t) {
  std::vector<StateSet> child;
  child.reserve(t.children().size());
  for (const Term& c : t.children()) child.push_back(reach_of(bi, c));
  return bottom_up_reach(bi, t.letter(), child);
}

}  // namespace

StateSet reach(const BiAutomaton& bi, const Term& t) { return reach_of(bi, t); }

StateSet prod(const BiAutomaton& bi, const Context& c) {
  // Walk the hole path top-down; siblings contribute through their reach sets.
  StateSet p = bi.final_state_set();
  const Term* node = &c.skeleton();
  for (int step : c.hole_path()) {
    std::vector<StateSet> child_reach(node->children().size());
    for (std::size_t i = 0; i < node->children().size(); ++i)
      if (static_cast<int>(i) != step) child_reach[i] = reach_of(bi, node->children()[i]);
    p = top_down_prod(bi, node->letter(), child_reach, p, step);
    node = &node->children()[step];
  }
  return p;
}

Families families(const BiAutomaton& bi) {
  Families fam;
  const RankedAlphabet& alphabet = bi.core().alphabet();

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [letter, rank] : alphabet.letters()) {
      std::vector<StateSet> members(fam.reachable.begin(), fam.reachable.end());
      if (rank > 0 && members.empty()) continue;
      std::vector<std::size_t> idx(rank, 0);
      while (true) {
        std::vector<StateSet> tuple;
        tuple.reserve(rank);
        for (int i = 0; i < rank; ++i) tuple.push_back(members[idx[i]]);
        if (fam.reachable.insert(bottom_up_reach(bi, letter, tuple)).second) changed = true;
        int j = rank - 1;
        while (j >= 0 && ++idx[j] == members.size()) idx[j--] = 0;
        if (j < 0) break;
      }
    }
  }

  fam.productive.insert(bi.final_state_set());
  changed = true;
  while (changed) {
    changed = false;
    std::vector<StateSet> prods(fam.productive.begin(), fam.productive.end());
    std::vector<StateSet> reaches(fam.reachable.begin(), fam.reachable.end());
    for (const StateSet& p : prods) {
      for (const auto& [letter, rank] : alphabet.letters()) {
        if (rank == 0) continue;
        if (rank > 1 && reaches.empty()) continue;
        for (int hole = 0; hole < rank; ++hole) {
          // Sibling positions range over the reachable family; the hole
          // position is ignored by the comprehension.
          std::vector<std::size_t> idx(rank, 0);
          while (true) {
            std::vector<StateSet> tuple(rank);
            bool usable = true;
            for (int i = 0; i < rank; ++i) {
              if (i == hole) continue;
              if (reaches.empty()) {
                usable = false;
                break;
              }
              tuple[i] = reaches[idx[i]];
            }
            if (usable &&
                fam.productive.insert(top_down_prod(bi, letter, tuple, p, hole)).second)
              changed = true;
            int j = rank - 1;
            while (j >= 0) {
              if (j == hole) {
                --j;
                continue;
              }
              if (++idx[j] == std::max<std::size_t>(reaches.size(), 1)) {
                idx[j--] = 0;
              } else {
                break;
              }
            }
            if (j < 0) break;
          }
        }
      }
    }
  }
  return fam;
}

std::map<NodePath, ProState> annotate(const BiAutomaton& bi, const Term& t,
                                      const StateSet& prod_at_root, const Families& fam) {
  if (!fam.productive.count(prod_at_root))
    throw std::logic_error("annotate: root set is not in the productive family");

  std::map<NodePath, ProState> out;
  std::function<StateSet(const Term&, NodePath&)> up = [&](const Term& node, NodePath& path) {
    std::vector<StateSet> child;
    child.reserve(node.children().size());
    for (std::size_t i = 0; i < node.children().size(); ++i) {
      path.push_back(static_cast<int>(i));
      child.push_back(up(node.children()[i], path));
      path.pop_back();
    }
    StateSet r = bottom_up_reach(bi, node.letter(), child);
    out[path].reach_set = r;
    return r;
  };
  NodePath path;
  up(t, path);

  std::function<void(const Term&, NodePath&, const StateSet&)> down =
      [&](const Term& node, NodePath& p, const StateSet& pset) {
        out[p].prod_set = pset;
        if (!fam.productive.count(pset) || !fam.reachable.count(out[p].reach_set))
          throw std::logic_error("annotate: node annotation left the families");
        std::vector<StateSet> child_reach;
        child_reach.reserve(node.children().size());
        for (std::size_t i = 0; i < node.children().size(); ++i) {
          p.push_back(static_cast<int>(i));
          child_reach.push_back(out.at(p).reach_set);
          p.pop_back();
        }
        for (std::size_t i = 0; i < node.children().size(); ++i) {
          StateSet ps = top_down_prod(bi, node.letter(), child_reach, pset, static_cast<int>(i));
          p.push_back(static_cast<int>(i));
          down(node.children()[i], p, ps);
          p.pop_back();
        }
      };
  down(t, path, prod_at_root);
  return out;
}

std::map<NodePath, ProState> annotate(const BiAutomaton& bi, const Term& t,
                                      const StateSet& prod_at_root) {
  return annotate(bi, t, prod_at_root, families(bi));
}

std::string state_set_str(const BiAutomaton& bi, const StateSet& s) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (StateId q : s) {
    if (!first) out << ", ";
    out << bi.core().state_name(q);
    first = false;
  }
  out << "}";
  return out.str();
}

namespace {

std::string compact_set(const BiAutomaton& bi, const StateSet& s) {
  if (s.empty()) return "-";
  std::string out;
  for (StateId q : s) {
    if (!out.empty()) out += "+";
    out += bi.core().state_name(q);
  }
  return out;
}

}  // namespace

ProAutomaton materialize_pro(const BiAutomaton& bi) {
  Families fam = families(bi);
  std::vector<ProState> states;
  std::map<ProState, StateId> ids;
  std::vector<std::string> names;
  for (const StateSet& r : fam.reachable)
    for (const StateSet& p : fam.productive) {
      ProState s{r, p};
      ids[s] = static_cast<StateId>(states.size());
      names.push_back(compact_set(bi, r) + "|" + compact_set(bi, p));
      states.push_back(std::move(s));
    }

  std::vector<Transition> transitions;
  std::vector<StateSet> reaches(fam.reachable.begin(), fam.reachable.end());
  for (const auto& [letter, rank] : bi.core().alphabet().letters()) {
    if (rank > 0 && reaches.empty()) continue;
    std::vector<std::size_t> idx(rank, 0);
    while (true) {
      std::vector<StateSet> rs;
      rs.reserve(rank);
      for (int i = 0; i < rank; ++i) rs.push_back(reaches[idx[i]]);
      StateSet r = bottom_up_reach(bi, letter, rs);
      if (fam.reachable.count(r)) {
        for (const StateSet& p : fam.productive) {
          Transition tr;
          tr.letter = letter;
          tr.target = ids.at(ProState{r, p});
          bool ok = true;
          for (int i = 0; i < rank && ok; ++i) {
            StateSet pi = top_down_prod(bi, letter, rs, p, i);
            auto it = ids.find(ProState{rs[i], pi});
            if (it == ids.end())
              ok = false;
            else
              tr.children.push_back(it->second);
          }
          if (ok) transitions.push_back(std::move(tr));
        }
      }
      int j = rank - 1;
      while (j >= 0 && ++idx[j] == reaches.size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }

  std::map<StateId, Weight> finals;
  StateSet bif = bi.final_state_set();
  for (const StateSet& r : fam.reachable) finals.emplace(ids.at(ProState{r, bif}), Weight(0));

  return ProAutomaton{
      Automaton(bi.core().alphabet(), std::move(names), std::move(finals), std::move(transitions)),
      std::move(states)};
}

}  // namespace tropa
