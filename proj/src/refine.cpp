#include "tropa/refine.hpp"

#include <algorithm>
#include <sstream>

namespace tropa {

nlohmann::json certificate_to_json(const BiAutomaton& bi, const ShiftCertificate& cert) {
  nlohmann::json p = nlohmann::json::array();
  for (StateId q : cert.prod_set) p.push_back(bi.core().state_name(q));
  return nlohmann::json{{"s", cert.source.str()},
                        {"t", cert.target.str()},
                        {"P", std::move(p)},
                        {"x", weight_str(cert.shift)}};
}

ShiftCertificate certificate_from_json(const BiAutomaton& bi, const nlohmann::json& j) {
  const RankedAlphabet& alphabet = bi.core().alphabet();
  StateSet p;
  for (const auto& name : j.at("P")) {
    auto id = bi.core().state_id(name.get<std::string>());
    if (!id) throw std::invalid_argument("certificate names unknown state '" +
                                         name.get<std::string>() + "'");
    p.insert(*id);
  }
  return ShiftCertificate{parse_term(alphabet, j.at("s").get<std::string>()),
                          parse_term(alphabet, j.at("t").get<std::string>()), std::move(p),
                          parse_weight(j.at("x").get<std::string>())};
}

std::string HypothesisViolation::describe(const BiAutomaton& bi) const {
  std::ostringstream out;
  if (const auto* gap = std::get_if<CycleGap>(&detail)) {
    out << "hypothesis violated: over the loop context " << gap->loop.str()
        << " the max half cycles through " << bi.core().state_name(gap->max_state)
        << " with weight " << weight_str(gap->max_cycle_weight)
        << " while the min half cycles through " << bi.core().state_name(gap->min_state)
        << " with weight " << weight_str(gap->min_cycle_weight)
        << "; pumping the loop separates the two semantics unboundedly";
  } else {
    const auto& breach = std::get<SupportBreach>(detail);
    out << "hypothesis violated: the two halves have different support; witness "
        << breach.witness.str();
  }
  return out.str();
}

bool check_refinement(const BiAutomaton& bi, const Term& source, const Term& target,
                      const StateSet& prod_set, const Weight& shift) {
  if (reach(bi, source) != reach(bi, target)) return false;
  std::vector<SemValue> bs = best_to_state(bi, source);
  std::vector<SemValue> bt = best_to_state(bi, target);
  for (StateId p : prod_set) {
    if (bs[p].is_bot()) continue;  // equal reach sets: bt[p] is bot too
    if (bi.origin(p) == Mode::Max) {
      if (!(bs[p].value() <= bt[p].value() + shift)) return false;
    } else {
      if (!(bt[p].value() + shift <= bs[p].value())) return false;
    }
  }
  return true;
}

ShiftCertificate compose_transitive(const ShiftCertificate& first,
                                    const ShiftCertificate& second) {
  if (first.target != second.source)
    throw std::invalid_argument("compose_transitive: middle terms differ");
  if (first.prod_set != second.prod_set)
    throw std::invalid_argument("compose_transitive: productive sets differ");
  return ShiftCertificate{first.source, second.target, first.prod_set,
                          first.shift + second.shift};
}

ShiftCertificate compose_congruence(const BiAutomaton& bi, const std::string& letter,
                                    const std::vector<ShiftCertificate>& child_certs,
                                    const ProTransition& pro_transition) {
  if (pro_transition.letter != letter ||
      pro_transition.children.size() != child_certs.size() ||
      bi.core().alphabet().rank(letter) != static_cast<int>(child_certs.size()))
    throw std::invalid_argument("compose_congruence: malformed annotation transition");

  std::vector<StateSet> child_reach;
  child_reach.reserve(child_certs.size());
  for (std::size_t i = 0; i < child_certs.size(); ++i) {
    StateSet r = reach(bi, child_certs[i].target);
    if (r != pro_transition.children[i].reach_set)
      throw std::invalid_argument("compose_congruence: child reach set mismatch");
    child_reach.push_back(std::move(r));
  }
  if (bottom_up_reach(bi, letter, child_reach) != pro_transition.target.reach_set)
    throw std::invalid_argument("compose_congruence: annotation transition not valid (reach)");
  for (std::size_t i = 0; i < child_certs.size(); ++i) {
    if (top_down_prod(bi, letter, child_reach, pro_transition.target.prod_set,
                      static_cast<int>(i)) != pro_transition.children[i].prod_set)
      throw std::invalid_argument("compose_congruence: annotation transition not valid (prod)");
    if (child_certs[i].prod_set != pro_transition.children[i].prod_set)
      throw std::invalid_argument("compose_congruence: child certificate has the wrong set");
  }

  std::vector<Term> sources, targets;
  Weight total(0);
  for (const ShiftCertificate& c : child_certs) {
    sources.push_back(c.source);
    targets.push_back(c.target);
    total += c.shift;
  }
  return ShiftCertificate{Term(letter, std::move(sources)), Term(letter, std::move(targets)),
                          pro_transition.target.prod_set, std::move(total)};
}

PumpingResult pumping_shift(const BiAutomaton& bi, const Context& loop, const StateSet& prod_set,
                            const StateSet& reach_set) {
  if (loop.empty()) throw std::invalid_argument("pumping_shift: loop context must be non-empty");
  PairTable table = best_context(bi, loop);

  std::optional<Weight> max_side;  // largest max-origin cycle weight
  std::optional<Weight> min_side;  // smallest min-origin cycle weight
  StateId max_state = -1, min_state = -1;
  for (StateId p : intersect(prod_set, reach_set)) {
    const SemValue& v = table.at(p, p);
    if (v.is_bot()) continue;
    if (bi.origin(p) == Mode::Max) {
      if (!max_side || v.value() > *max_side) {
        max_side = v.value();
        max_state = p;
      }
    } else {
      if (!min_side || v.value() < *min_side) {
        min_side = v.value();
        min_state = p;
      }
    }
  }
  if (max_side && min_side && *max_side > *min_side)
    return HypothesisViolation{
        HypothesisViolation::CycleGap{loop, max_state, min_state, *max_side, *min_side}};
  if (max_side) return *max_side;
  if (min_side) return *min_side;
  return Weight(0);
}

BigInt k_bound(const BiAutomaton& bi) {
  BigInt n = bi.core().state_count();
  BigInt base = 4 * n;
  BigInt out = 1;
  for (int i = 0; i < bi.core().state_count(); ++i) out *= base;
  return out;
}

std::optional<Run> canonical_optimal_run(const BiAutomaton& bi, const Term& t, StateId target) {
  auto tables = best_tables(bi.core(), bi.origins(), t);
  if (tables.at(NodePath{})[target].is_bot()) return std::nullopt;

  Run run;
  run.weight = Weight(0);
  std::function<void(const Term&, NodePath&, StateId)> assign = [&](const Term& node, NodePath& path,
                                                                    StateId q) {
    run.states[path] = q;
    const Weight& goal = tables.at(path)[q].value();
    std::optional<std::vector<StateId>> best_tuple;
    const Transition* chosen = nullptr;
    for (int i : bi.core().transitions_for(node.letter())) {
      const Transition& tr = bi.core().transitions()[i];
      if (tr.target != q) continue;
      Weight acc = tr.weight;
      bool ok = true;
      for (std::size_t j = 0; j < tr.children.size(); ++j) {
        path.push_back(static_cast<int>(j));
        const SemValue& v = tables.at(path)[tr.children[j]];
        path.pop_back();
        if (v.is_bot()) {
          ok = false;
          break;
        }
        acc += v.value();
      }
      if (!ok || acc != goal) continue;
      if (!best_tuple || tr.children < *best_tuple) {
        best_tuple = tr.children;
        chosen = &tr;
      }
    }
    if (!chosen) throw std::logic_error("canonical_optimal_run: table entry without a transition");
    run.weight += chosen->weight;
    for (std::size_t j = 0; j < chosen->children.size(); ++j) {
      path.push_back(static_cast<int>(j));
      assign(node.children()[j], path, chosen->children[j]);
      path.pop_back();
    }
  };
  NodePath path;
  assign(t, path, target);
  return run;
}

namespace {

// Leftmost branch of maximal length, as node paths from the root to a leaf.
std::vector<NodePath> longest_branch(const Term& t) {
  std::vector<NodePath> nodes;
  NodePath path;
  const Term* cur = &t;
  while (true) {
    nodes.push_back(path);
    if (cur->children().empty()) break;
    int best = 0, best_height = cur->children()[0].height();
    for (std::size_t i = 1; i < cur->children().size(); ++i) {
      int h = cur->children()[i].height();
      if (h > best_height) {
        best = static_cast<int>(i);
        best_height = h;
      }
    }
    path.push_back(best);
    cur = &cur->children()[best];
  }
  return nodes;
}

struct Signature {
  StateSet reach_set;
  StateSet prod_set;
  std::vector<std::optional<StateId>> run_states;  // aligned with sorted prod_root
  friend bool operator==(const Signature&, const Signature&) = default;
};

}  // namespace

std::optional<Reduction> reduce_once(const BiAutomaton& bi, const Term& t,
                                     const StateSet& prod_root, const Families& fam) {
  if (!fam.productive.count(prod_root))
    throw std::invalid_argument("reduce_once: root set is not in the productive family");
  if (t.height() == 0) return std::nullopt;

  std::vector<NodePath> branch = longest_branch(t);
  auto annotation = annotate(bi, t, prod_root, fam);

  std::vector<std::optional<Run>> runs;
  for (StateId p : prod_root) runs.push_back(canonical_optimal_run(bi, t, p));

  // Cut positions: branch nodes that still have a successor on the branch.
  std::size_t cuts = branch.size() - 1;
  std::vector<Signature> sig(cuts);
  for (std::size_t i = 0; i < cuts; ++i) {
    const ProState& ann = annotation.at(branch[i]);
    sig[i].reach_set = ann.reach_set;
    sig[i].prod_set = ann.prod_set;
    for (const auto& run : runs)
      sig[i].run_states.push_back(run ? std::optional<StateId>(run->states.at(branch[i]))
                                      : std::nullopt);
  }

  // Deepest upper node first, then the shortest slice.
  for (std::size_t i = cuts; i-- > 0;) {
    for (std::size_t j = i + 1; j < cuts; ++j) {
      if (!(sig[i] == sig[j])) continue;
      Context loop = slice_context(t, branch[i], branch[j]);
      PumpingResult x =
          pumping_shift(bi, loop, sig[i].prod_set, sig[i].reach_set);
      if (auto* violation = std::get_if<HypothesisViolation>(&x))
        throw HypothesisViolationError(std::move(*violation), bi);
      Term reduced = replace_at(t, branch[i], subterm_at(t, branch[j]));
      return Reduction{std::move(reduced), std::get<Weight>(std::move(x))};
    }
  }
  return std::nullopt;
}

std::optional<Reduction> reduce_once(const BiAutomaton& bi, const Term& t,
                                     const StateSet& prod_root) {
  return reduce_once(bi, t, prod_root, families(bi));
}

Reduction shift_reduce(const BiAutomaton& bi, const Term& t, const StateSet& prod_root,
                       const Families& fam, std::vector<ShiftCertificate>* steps) {
  Term current = t;
  Weight total(0);
  while (auto step = reduce_once(bi, current, prod_root, fam)) {
    if (steps)
      steps->push_back(ShiftCertificate{current, step->term, prod_root, step->shift});
    total += step->shift;
    current = std::move(step->term);
  }
  return Reduction{std::move(current), std::move(total)};
}

Reduction shift_reduce(const BiAutomaton& bi, const Term& t, const StateSet& prod_root,
                       std::vector<ShiftCertificate>* steps) {
  return shift_reduce(bi, t, prod_root, families(bi), steps);
}

ShiftReducer::ShiftReducer(const BiAutomaton& bi) : bi_(bi), fam_(tropa::families(bi)) {}

void ShiftReducer::set_certificate_sink(std::function<void(const ShiftCertificate&)> sink) {
  std::lock_guard<std::mutex> lock(mu_);
  sink_ = std::move(sink);
}

Reduction ShiftReducer::reduce(const Term& t, const StateSet& prod_root) {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(t, prod_root);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<ShiftCertificate> steps;
  Reduction out = shift_reduce(bi_, t, prod_root, fam_, sink_ ? &steps : nullptr);
  if (sink_)
    for (const ShiftCertificate& c : steps) sink_(c);
  memo_.emplace(std::move(key), out);
  return out;
}

}  // namespace tropa
