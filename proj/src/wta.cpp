#include "tropa/wta.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

namespace tropa {

namespace {

void check_state_name(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("state name must be non-empty");
  for (char c : name)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
        c == ':' || c == '#')
      throw std::invalid_argument("illegal character in state name '" + name + "'");
}

bool better(const Weight& candidate, const SemValue& incumbent, Mode dir) {
  if (incumbent.is_bot()) return true;
  return dir == Mode::Max ? candidate > incumbent.value() : candidate < incumbent.value();
}

}  // namespace

Automaton::Automaton(RankedAlphabet alphabet, std::vector<std::string> state_names,
                     std::map<StateId, Weight> final_weights, std::vector<Transition> transitions)
    : alphabet_(std::move(alphabet)),
      state_names_(std::move(state_names)),
      final_weights_(std::move(final_weights)) {
  if (!alphabet_.has_nullary_letter())
    throw std::invalid_argument("alphabet has no rank-0 letter, so no terms exist");
  std::set<std::string> seen;
  for (const auto& name : state_names_) {
    check_state_name(name);
    if (!seen.insert(name).second) throw std::invalid_argument("duplicate state '" + name + "'");
  }
  int n = state_count();
  for (const auto& [q, w] : final_weights_)
    if (q < 0 || q >= n) throw std::invalid_argument("final state out of range");

  std::map<std::tuple<std::string, std::vector<StateId>, StateId>, Weight> structural;
  for (Transition& tr : transitions) {
    int rank = alphabet_.rank(tr.letter);  // throws on unknown letter
    if (static_cast<int>(tr.children.size()) != rank)
      throw std::invalid_argument("transition arity mismatch for letter '" + tr.letter + "'");
    if (tr.target < 0 || tr.target >= n)
      throw std::invalid_argument("transition target out of range");
    for (StateId q : tr.children)
      if (q < 0 || q >= n) throw std::invalid_argument("transition child state out of range");
    auto key = std::make_tuple(tr.letter, tr.children, tr.target);
    auto [it, inserted] = structural.emplace(key, tr.weight);
    if (!inserted) {
      if (it->second != tr.weight)
        throw std::invalid_argument("duplicate transition for " + tr.letter +
                                    " with conflicting weights");
      continue;  // identical duplicate, drop silently
    }
    by_letter_[tr.letter].push_back(static_cast<int>(transitions_.size()));
    transitions_.push_back(std::move(tr));
  }
}

std::optional<StateId> Automaton::state_id(std::string_view name) const {
  for (std::size_t i = 0; i < state_names_.size(); ++i)
    if (state_names_[i] == name) return static_cast<StateId>(i);
  return std::nullopt;
}

const std::vector<int>& Automaton::transitions_for(const std::string& letter) const {
  static const std::vector<int> kEmpty;
  auto it = by_letter_.find(letter);
  return it == by_letter_.end() ? kEmpty : it->second;
}

// ---- text format ----------------------------------------------------------

namespace {

std::string strip(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::size_t b = 0, e = line.size();
  while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
  return std::string(line.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(strip(std::string_view(s).substr(start, p - start)));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

Wta Wta::parse(std::string_view text) {
  std::optional<RankedAlphabet> alphabet;
  std::optional<Mode> mode;
  std::vector<std::string> state_names;
  struct PendingFinal {
    std::string state;
    Weight weight;
    int line;
  };
  struct PendingTrans {
    std::string letter;
    std::vector<std::string> children;
    std::string target;
    Weight weight;
    int line;
  };
  std::vector<PendingFinal> finals;
  std::vector<PendingTrans> trans;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line = strip(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    auto fail = [&](const std::string& msg) {
      throw ParseError("line " + std::to_string(line_no) + ": " + msg, 0);
    };

    std::istringstream in(line);
    std::string keyword;
    in >> keyword;
    std::string rest = strip(line.substr(keyword.size()));

    if (keyword == "alphabet") {
      auto open = rest.find('{'), close = rest.rfind('}');
      if (open == std::string::npos || close == std::string::npos || close < open)
        fail("expected alphabet { name/rank, ... }");
      RankedAlphabet a;
      for (const std::string& entry : split_on(rest.substr(open + 1, close - open - 1), ',')) {
        if (entry.empty()) continue;
        auto slash = entry.rfind('/');
        if (slash == std::string::npos) fail("expected name/rank in alphabet, got '" + entry + "'");
        std::string rank_text = strip(std::string_view(entry).substr(slash + 1));
        if (rank_text.empty() ||
            !std::all_of(rank_text.begin(), rank_text.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
          fail("malformed rank in '" + entry + "'");
        a.add_letter(strip(std::string_view(entry).substr(0, slash)), std::stoi(rank_text));
      }
      if (alphabet) fail("duplicate alphabet declaration");
      alphabet = std::move(a);
    } else if (keyword == "mode") {
      if (mode) fail("duplicate mode declaration");
      if (rest == "max")
        mode = Mode::Max;
      else if (rest == "min")
        mode = Mode::Min;
      else
        fail("mode must be 'max' or 'min'");
    } else if (keyword == "states") {
      for (const std::string& name : split_ws(rest)) state_names.push_back(name);
    } else if (keyword == "final") {
      auto colon = rest.rfind(':');
      if (colon == std::string::npos) fail("expected 'final STATE : WEIGHT'");
      std::string state = strip(std::string_view(rest).substr(0, colon));
      if (state.empty()) fail("missing state in final declaration");
      finals.push_back({state, parse_weight(rest.substr(colon + 1)), line_no});
    } else if (keyword == "trans") {
      auto arrow = rest.find("->");
      auto colon = rest.rfind(':');
      if (arrow == std::string::npos || colon == std::string::npos || colon < arrow)
        fail("expected 'trans LETTER(...) -> STATE : WEIGHT'");
      std::string lhs = strip(std::string_view(rest).substr(0, arrow));
      std::string target = strip(std::string_view(rest).substr(arrow + 2, colon - arrow - 2));
      Weight w = parse_weight(rest.substr(colon + 1));
      auto open = lhs.find('('), close = lhs.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        fail("expected LETTER(STATE,...) on the left of ->");
      std::string letter = strip(std::string_view(lhs).substr(0, open));
      std::vector<std::string> children;
      std::string inner = strip(std::string_view(lhs).substr(open + 1, close - open - 1));
      if (!inner.empty())
        for (const std::string& c : split_on(inner, ',')) children.push_back(c);
      trans.push_back({letter, std::move(children), target, std::move(w), line_no});
    } else {
      fail("unknown keyword '" + keyword + "'");
    }
    if (eol == text.size()) break;
  }

  if (!alphabet) throw ParseError("missing alphabet declaration", 0);
  if (!mode) throw ParseError("missing mode declaration", 0);

  std::map<std::string, StateId> ids;
  for (std::size_t i = 0; i < state_names.size(); ++i) {
    if (!ids.emplace(state_names[i], static_cast<StateId>(i)).second)
      throw ParseError("duplicate state '" + state_names[i] + "'", 0);
  }
  auto lookup = [&](const std::string& name, int line) {
    auto it = ids.find(name);
    if (it == ids.end())
      throw ParseError("line " + std::to_string(line) + ": unknown state '" + name + "'", 0);
    return it->second;
  };

  std::map<StateId, Weight> final_weights;
  for (const auto& f : finals) {
    StateId q = lookup(f.state, f.line);
    auto [it, inserted] = final_weights.emplace(q, f.weight);
    if (!inserted && it->second != f.weight)
      throw ParseError("line " + std::to_string(f.line) + ": conflicting final weight for '" +
                           f.state + "'",
                       0);
  }
  std::vector<Transition> transitions;
  for (const auto& t : trans) {
    Transition tr;
    tr.letter = t.letter;
    tr.target = lookup(t.target, t.line);
    tr.weight = t.weight;
    for (const auto& c : t.children) tr.children.push_back(lookup(c, t.line));
    transitions.push_back(std::move(tr));
  }
  try {
    return Wta(Automaton(*alphabet, std::move(state_names), std::move(final_weights),
                         std::move(transitions)),
               *mode);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

Wta Wta::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open automaton file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Wta::str() const {
  std::ostringstream out;
  out << "alphabet { ";
  bool first = true;
  for (const auto& [name, rank] : core_.alphabet().letters()) {
    if (!first) out << ", ";
    out << name << "/" << rank;
    first = false;
  }
  out << " }\n";
  out << "mode " << (mode_ == Mode::Max ? "max" : "min") << "\n";
  out << "states";
  for (const auto& name : core_.state_names()) out << " " << name;
  out << "\n";
  for (const auto& [q, w] : core_.final_weights())
    out << "final " << core_.state_name(q) << " : " << weight_str(w) << "\n";

  std::vector<int> order(core_.transitions().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const Transition &a = core_.transitions()[x], &b = core_.transitions()[y];
    return std::tie(a.letter, a.children, a.target) < std::tie(b.letter, b.children, b.target);
  });
  for (int i : order) {
    const Transition& tr = core_.transitions()[i];
    out << "trans " << tr.letter << "(";
    for (std::size_t j = 0; j < tr.children.size(); ++j) {
      if (j) out << ",";
      out << core_.state_name(tr.children[j]);
    }
    out << ") -> " << core_.state_name(tr.target) << " : " << weight_str(tr.weight) << "\n";
  }
  return out.str();
}

BiAutomaton::BiAutomaton(Automaton core, int max_state_count)
    : core_(std::move(core)), max_count_(max_state_count) {
  if (max_count_ < 0 || max_count_ > core_.state_count())
    throw std::invalid_argument("bad max-half state count");
  origins_.resize(core_.state_count());
  for (int q = 0; q < core_.state_count(); ++q)
    origins_[q] = q < max_count_ ? Mode::Max : Mode::Min;
  for (const Transition& tr : core_.transitions()) {
    Mode m = origins_[tr.target];
    for (StateId q : tr.children)
      if (origins_[q] != m) throw std::invalid_argument("bi-automaton transition mixes origins");
  }
}

StateSet BiAutomaton::final_state_set() const {
  StateSet out;
  for (const auto& [q, w] : core_.final_weights()) out.insert(q);
  return out;
}

BiAutomaton disjoint_union(const Wta& max_half, const Wta& min_half) {
  if (max_half.mode() != Mode::Max)
    throw std::invalid_argument("disjoint_union: left operand must be a max-plus automaton");
  if (min_half.mode() != Mode::Min)
    throw std::invalid_argument("disjoint_union: right operand must be a min-plus automaton");
  if (!(max_half.core().alphabet() == min_half.core().alphabet()))
    throw std::invalid_argument("disjoint_union: alphabet mismatch");

  const Automaton& ma = max_half.core();
  const Automaton& na = min_half.core();
  std::vector<std::string> names = ma.state_names();
  std::set<std::string> used(names.begin(), names.end());
  for (std::string name : na.state_names()) {
    while (used.count(name)) name += "'";
    used.insert(name);
    names.push_back(std::move(name));
  }
  int offset = ma.state_count();

  std::map<StateId, Weight> finals = ma.final_weights();
  for (const auto& [q, w] : na.final_weights()) finals.emplace(q + offset, w);

  std::vector<Transition> transitions = ma.transitions();
  for (Transition tr : na.transitions()) {
    tr.target += offset;
    for (StateId& q : tr.children) q += offset;
    transitions.push_back(std::move(tr));
  }
  return BiAutomaton(
      Automaton(ma.alphabet(), std::move(names), std::move(finals), std::move(transitions)),
      offset);
}

// ---- semantics ------------------------------------------------------------

namespace {

const std::vector<int>& transitions_checked(const Automaton& a, const Term& node) {
  if (!a.alphabet().contains(node.letter()))
    throw std::invalid_argument("alphabet mismatch: unknown letter '" + node.letter() + "'");
  if (a.alphabet().rank(node.letter()) != static_cast<int>(node.children().size()))
    throw std::invalid_argument("alphabet mismatch: arity of '" + node.letter() + "'");
  return a.transitions_for(node.letter());
}

void fill_tables(const Automaton& a, const std::vector<Mode>& dirs, const Term& node,
                 NodePath& path, std::map<NodePath, std::vector<SemValue>>& out) {
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    path.push_back(static_cast<int>(i));
    fill_tables(a, dirs, node.children()[i], path, out);
    path.pop_back();
  }
  std::vector<SemValue> table(a.state_count());
  const std::vector<int>& idx = transitions_checked(a, node);
  for (int i : idx) {
    const Transition& tr = a.transitions()[i];
    Weight acc = tr.weight;
    bool ok = true;
    for (std::size_t j = 0; j < tr.children.size(); ++j) {
      path.push_back(static_cast<int>(j));
      const SemValue& v = out.at(path)[tr.children[j]];
      path.pop_back();
      if (v.is_bot()) {
        ok = false;
        break;
      }
      acc += v.value();
    }
    if (ok && better(acc, table[tr.target], dirs[tr.target])) table[tr.target] = SemValue(acc);
  }
  out[path] = std::move(table);
}

std::vector<SemValue> best_to_state_impl(const Automaton& a, const std::vector<Mode>& dirs,
                                         const Term& t) {
  std::map<NodePath, std::vector<SemValue>> tables;
  NodePath path;
  fill_tables(a, dirs, t, path, tables);
  return tables.at(NodePath{});
}

SemValue fold_finals(const Automaton& a, const std::vector<SemValue>& table, Mode dir,
                     const std::function<bool(StateId)>& admit) {
  SemValue out;
  for (const auto& [q, w] : a.final_weights()) {
    if (!admit(q) || table[q].is_bot()) continue;
    Weight v = table[q].value() + w;
    if (better(v, out, dir)) out = SemValue(v);
  }
  return out;
}

PairTable best_context_impl(const Automaton& a, const std::vector<Mode>& dirs, const Context& c) {
  int n = a.state_count();

  std::function<std::vector<SemValue>(const Term&)> table_of = [&](const Term& node) {
    std::map<NodePath, std::vector<SemValue>> tables;
    NodePath path;
    fill_tables(a, dirs, node, path, tables);
    return tables.at(NodePath{});
  };

  std::function<PairTable(const Term&, std::size_t)> pair_of = [&](const Term& node,
                                                                   std::size_t depth) {
    PairTable out(n);
    if (depth == c.hole_path().size()) {
      for (StateId p = 0; p < n; ++p) out.at(p, p) = SemValue(Weight(0));
      return out;
    }
    int hole_child = c.hole_path()[depth];
    PairTable below = pair_of(node.children()[hole_child], depth + 1);
    std::vector<std::vector<SemValue>> side(node.children().size());
    for (std::size_t i = 0; i < node.children().size(); ++i)
      if (static_cast<int>(i) != hole_child) side[i] = table_of(node.children()[i]);

    for (int i : transitions_checked(a, node)) {
      const Transition& tr = a.transitions()[i];
      Weight base = tr.weight;
      bool ok = true;
      for (std::size_t j = 0; j < tr.children.size(); ++j) {
        if (static_cast<int>(j) == hole_child) continue;
        const SemValue& v = side[j][tr.children[j]];
        if (v.is_bot()) {
          ok = false;
          break;
        }
        base += v.value();
      }
      if (!ok) continue;
      for (StateId p = 0; p < n; ++p) {
        const SemValue& through = below.at(p, tr.children[hole_child]);
        if (through.is_bot()) continue;
        Weight cand = base + through.value();
        if (better(cand, out.at(p, tr.target), dirs[tr.target])) out.at(p, tr.target) = SemValue(cand);
      }
    }
    return out;
  };

  return pair_of(c.skeleton(), 0);
}

std::vector<Mode> uniform_dirs(const Wta& a) {
  return std::vector<Mode>(a.core().state_count(), a.mode());
}

}  // namespace

SemValue evaluate(const Wta& a, const Term& t) {
  std::vector<SemValue> table = best_to_state(a, t);
  return fold_finals(a.core(), table, a.mode(), [](StateId) { return true; });
}

SemValue evaluate_half(const BiAutomaton& bi, Mode half, const Term& t) {
  std::vector<SemValue> table = best_to_state(bi, t);
  return fold_finals(bi.core(), table, half, [&](StateId q) { return bi.origin(q) == half; });
}

std::vector<SemValue> best_to_state(const Wta& a, const Term& t) {
  return best_to_state_impl(a.core(), uniform_dirs(a), t);
}

std::vector<SemValue> best_to_state(const BiAutomaton& bi, const Term& t) {
  return best_to_state_impl(bi.core(), bi.origins(), t);
}

std::map<NodePath, std::vector<SemValue>> best_tables(const Automaton& a,
                                                      const std::vector<Mode>& dirs,
                                                      const Term& t) {
  std::map<NodePath, std::vector<SemValue>> tables;
  NodePath path;
  fill_tables(a, dirs, t, path, tables);
  return tables;
}

PairTable best_context(const Wta& a, const Context& c) {
  return best_context_impl(a.core(), uniform_dirs(a), c);
}

PairTable best_context(const BiAutomaton& bi, const Context& c) {
  return best_context_impl(bi.core(), bi.origins(), c);
}

// ---- run enumeration ------------------------------------------------------

namespace {

struct Partial {
  StateId root;
  std::map<NodePath, StateId> states;
  std::optional<StateId> hole_state;
  Weight weight;
};

// All runs over `node` (which may contain the hole), absolute paths.
std::vector<Partial> enumerate_partials(const Automaton& a, const Term& node, NodePath& path,
                                        std::size_t limit, std::size_t& produced) {
  std::vector<Partial> out;
  auto bump = [&] {
    if (++produced > limit) throw std::runtime_error("run enumeration exceeds budget");
  };

  if (node.is_hole()) {
    for (StateId p = 0; p < a.state_count(); ++p) {
      bump();
      out.push_back(Partial{p, {{path, p}}, p, Weight(0)});
    }
    return out;
  }

  std::vector<std::vector<Partial>> child_runs;
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    path.push_back(static_cast<int>(i));
    child_runs.push_back(enumerate_partials(a, node.children()[i], path, limit, produced));
    path.pop_back();
  }
  // Group child runs by their root state.
  std::vector<std::map<StateId, std::vector<const Partial*>>> grouped(child_runs.size());
  for (std::size_t i = 0; i < child_runs.size(); ++i)
    for (const Partial& p : child_runs[i]) grouped[i][p.root].push_back(&p);

  for (int ti : transitions_checked(a, node)) {
    const Transition& tr = a.transitions()[ti];
    std::vector<const std::vector<const Partial*>*> lists;
    bool ok = true;
    for (std::size_t i = 0; i < tr.children.size(); ++i) {
      auto it = grouped[i].find(tr.children[i]);
      if (it == grouped[i].end()) {
        ok = false;
        break;
      }
      lists.push_back(&it->second);
    }
    if (!ok) continue;
    std::vector<std::size_t> pick(lists.size(), 0);
    while (true) {
      bump();
      Partial merged;
      merged.root = tr.target;
      merged.weight = tr.weight;
      merged.states[path] = tr.target;
      for (std::size_t i = 0; i < lists.size(); ++i) {
        const Partial& c = *(*lists[i])[pick[i]];
        merged.weight += c.weight;
        merged.states.insert(c.states.begin(), c.states.end());
        if (c.hole_state) merged.hole_state = c.hole_state;
      }
      out.push_back(std::move(merged));
      int j = static_cast<int>(lists.size()) - 1;
      while (j >= 0 && ++pick[j] == lists[j]->size()) pick[j--] = 0;
      if (j < 0) break;
    }
  }
  return out;
}

}  // namespace

std::vector<Run> enumerate_runs(const Automaton& a, const Term& t, std::size_t limit) {
  if (t.hole_count() != 0) throw std::invalid_argument("enumerate_runs expects a hole-free term");
  NodePath path;
  std::size_t produced = 0;
  std::vector<Run> out;
  for (Partial& p : enumerate_partials(a, t, path, limit, produced))
    out.push_back(Run{std::move(p.states), std::move(p.weight)});
  return out;
}

std::vector<Run> accepting_runs(const Automaton& a, const std::vector<Run>& runs) {
  std::vector<Run> out;
  for (const Run& r : runs)
    if (a.is_final(r.root_state())) out.push_back(r);
  return out;
}

std::vector<ContextRun> enumerate_context_runs(const Automaton& a, const Context& c,
                                               std::size_t limit) {
  NodePath path;
  std::size_t produced = 0;
  std::vector<ContextRun> out;
  for (Partial& p : enumerate_partials(a, c.skeleton(), path, limit, produced))
    out.push_back(ContextRun{std::move(p.states), *p.hole_state, std::move(p.weight)});
  return out;
}

namespace {

// Lean enumeration keeping only (root, hole state, weight); shares the
// recursion shape of enumerate_partials without building node maps.
struct LightRun {
  StateId root;
  StateId hole;
  bool has_hole;
  Weight weight;
};

std::vector<LightRun> light_runs(const Automaton& a, const Term& node) {
  std::vector<LightRun> out;
  if (node.is_hole()) {
    for (StateId p = 0; p < a.state_count(); ++p) out.push_back({p, p, true, Weight(0)});
    return out;
  }
  std::vector<std::vector<LightRun>> child_runs;
  for (const Term& c : node.children()) child_runs.push_back(light_runs(a, c));
  std::vector<std::map<StateId, std::vector<const LightRun*>>> grouped(child_runs.size());
  for (std::size_t i = 0; i < child_runs.size(); ++i)
    for (const LightRun& r : child_runs[i]) grouped[i][r.root].push_back(&r);

  for (int ti : transitions_checked(a, node)) {
    const Transition& tr = a.transitions()[ti];
    std::vector<const std::vector<const LightRun*>*> lists;
    bool ok = true;
    for (std::size_t i = 0; i < tr.children.size(); ++i) {
      auto it = grouped[i].find(tr.children[i]);
      if (it == grouped[i].end()) {
        ok = false;
        break;
      }
      lists.push_back(&it->second);
    }
    if (!ok) continue;
    std::vector<std::size_t> pick(lists.size(), 0);
    while (true) {
      LightRun merged{tr.target, 0, false, tr.weight};
      for (std::size_t i = 0; i < lists.size(); ++i) {
        const LightRun& c = *(*lists[i])[pick[i]];
        merged.weight += c.weight;
        if (c.has_hole) {
          merged.hole = c.hole;
          merged.has_hole = true;
        }
      }
      out.push_back(std::move(merged));
      int j = static_cast<int>(lists.size()) - 1;
      while (j >= 0 && ++pick[j] == lists[j]->size()) pick[j--] = 0;
      if (j < 0) break;
    }
  }
  return out;
}

}  // namespace

void for_each_context_run_weight(const Automaton& a, const Context& c,
                                 const std::function<void(StateId, StateId, const Weight&)>& fn) {
  for (const LightRun& r : light_runs(a, c.skeleton()))
    if (r.has_hole) fn(r.hole, r.root, r.weight);
}

// ---- ambiguity ------------------------------------------------------------

std::optional<Term> decide_ambiguity(const Automaton& a) {
  // Self-product with a divergence flag: key (p, q, diverged) is discovered
  // once some term carries runs to p and to q that differ iff `diverged`.
  using Key = std::tuple<StateId, StateId, bool>;
  std::map<Key, Term> witness;

  auto is_bad = [&](const Key& k) {
    auto [p, q, diverged] = k;
    return diverged && a.is_final(p) && a.is_final(q);
  };

  while (true) {
    std::vector<std::pair<Key, Term>> fresh;
    for (const auto& [letter, rank] : a.alphabet().letters()) {
      const std::vector<int>& idx = a.transitions_for(letter);
      for (int i1 : idx) {
        const Transition& t1 = a.transitions()[i1];
        for (int i2 : idx) {
          const Transition& t2 = a.transitions()[i2];
          // Child slots: pick any discovered key (t1.children[k], t2.children[k], f).
          std::vector<std::vector<std::pair<bool, const Term*>>> options(rank);
          bool feasible = true;
          for (int k = 0; k < rank && feasible; ++k) {
            for (bool f : {false, true}) {
              auto it = witness.find({t1.children[k], t2.children[k], f});
              if (it != witness.end()) options[k].push_back({f, &it->second});
            }
            if (options[k].empty()) feasible = false;
          }
          if (!feasible) continue;
          std::vector<std::size_t> pick(rank, 0);
          while (true) {
            bool diverged = t1.target != t2.target;
            std::vector<Term> children;
            children.reserve(rank);
            for (int k = 0; k < rank; ++k) {
              diverged = diverged || options[k][pick[k]].first;
              children.push_back(*options[k][pick[k]].second);
            }
            Key key{t1.target, t2.target, diverged};
            if (!witness.count(key) &&
                std::none_of(fresh.begin(), fresh.end(),
                             [&](const auto& e) { return e.first == key; }))
              fresh.push_back({key, Term(letter, std::move(children))});
            int j = rank - 1;
            while (j >= 0 && ++pick[j] == options[j].size()) pick[j--] = 0;
            if (j < 0) break;
          }
        }
      }
    }
    if (fresh.empty()) return std::nullopt;
    for (auto& [key, term] : fresh) {
      if (is_bad(key)) return term;
      witness.emplace(std::move(key), std::move(term));
    }
  }
}

}  // namespace tropa
