#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "tropa/separator.hpp"

using namespace tropa;
using tropa::test::load_fixture;
using tropa::test::unary_tower;

namespace {

BiAutomaton e1_bi() {
  return disjoint_union(load_fixture("e1max.wta"), load_fixture("e1min.wta"));
}

BiAutomaton e3_bi() {
  return disjoint_union(load_fixture("e3max.wta"), load_fixture("e3min.wta"));
}

// Sum of the shifts inside the subrun rooted at `at`.
Weight subtree_shift(const SepRun& run, const NodePath& at) {
  Weight total(0);
  for (const auto& [path, node] : run.nodes) {
    if (path.size() < at.size() || !std::equal(at.begin(), at.end(), path.begin())) continue;
    total += node.shift;
  }
  return total;
}

}  // namespace

TEST_CASE("evaluate_sep stays in the separation interval on the unary pair") {
  BiAutomaton bi = e1_bi();
  Separator separator(bi);
  for (int n = 0; n <= 8; ++n) {
    SemValue v = separator.evaluate(unary_tower("a", "e", n));
    REQUIRE(!v.is_bot());
    CHECK(Weight(n) <= v.value());
    CHECK(v.value() <= Weight(2 * n));
  }
}

TEST_CASE("evaluate_sep is exact on a pair computing the same function") {
  BiAutomaton bi = disjoint_union(load_fixture("e1max.wta"), load_fixture("e2min.wta"));
  Separator separator(bi);
  for (int n = 0; n <= 8; ++n)
    CHECK(separator.evaluate(unary_tower("a", "e", n)) == SemValue(Weight(n)));
}

TEST_CASE("evaluate_sep is bot exactly outside the common support") {
  Wta max_half = Wta::parse(
      "alphabet { e/0, g/0, a/1 }\nmode max\nstates q\nfinal q : 0\n"
      "trans e() -> q : 0\ntrans a(q) -> q : 1\n");
  Wta min_half = Wta::parse(
      "alphabet { e/0, g/0, a/1 }\nmode min\nstates r\nfinal r : 0\n"
      "trans e() -> r : 0\ntrans a(r) -> r : 2\n");
  BiAutomaton bi = disjoint_union(max_half, min_half);
  Separator separator(bi);
  CHECK(separator.evaluate(Term("g")).is_bot());
  CHECK(separator.evaluate(unary_tower("a", "g", 2)).is_bot());
  CHECK(!separator.evaluate(Term("e")).is_bot());
}

TEST_CASE("a support breach surfaces as a hypothesis violation") {
  Wta max_half = Wta::parse(
      "alphabet { e/0, g/0 }\nmode max\nstates q\nfinal q : 0\ntrans e() -> q : 0\n");
  Wta min_half = Wta::parse(
      "alphabet { e/0, g/0 }\nmode min\nstates r\nfinal r : 0\n"
      "trans e() -> r : 0\ntrans g() -> r : 0\n");
  BiAutomaton bi = disjoint_union(max_half, min_half);
  Separator separator(bi);
  CHECK_THROWS_AS(separator.evaluate(Term("g")), HypothesisViolationError);
}

TEST_CASE("run_sep") {
  BiAutomaton bi = e1_bi();
  Separator separator(bi);

  SepRun leaf = separator.run(Term("e"));
  CHECK(leaf.nodes.size() == 1);
  CHECK(leaf.total_shift == Weight(0));
  CHECK(leaf.root().state.representative == Term("e"));

  SepRun two = separator.run(unary_tower("a", "e", 1));
  CHECK(two.nodes.size() == 2);
  CHECK(two.total_shift == Weight(0));
  CHECK(two.root().state.representative.height() <= 1);

  for (int n = 0; n <= 6; ++n) {
    Term t = unary_tower("a", "e", n);
    SepRun run = separator.run(t);
    CHECK(run.root().state.reach_set == reach(bi, t));
    Weight total(0);
    for (const auto& [path, node] : run.nodes) total += node.shift;
    CHECK(total == run.total_shift);
  }
}

TEST_CASE("every node of a separator run satisfies the refinement chain") {
  for (BiAutomaton bi : {e1_bi(), e3_bi()}) {
    Separator separator(bi);
    int height = bi.core().alphabet().letters().size() > 2 ? 3 : 5;
    for (const Term& t : enumerate_terms(bi.core().alphabet(), height)) {
      SepRun run = separator.run(t);
      for (const auto& [path, node] : run.nodes) {
        CHECK(check_refinement(bi, subterm_at(t, path), node.state.representative,
                               node.state.prod_set, subtree_shift(run, path)));
        CHECK(reach(bi, node.state.representative) == node.state.reach_set);
        CHECK(BigInt(node.state.representative.height()) <= k_bound(bi));
      }
    }
  }
}

TEST_CASE("exhaustive separation chain on the binary pair") {
  Wta max_half = load_fixture("e3max.wta");
  Wta min_half = load_fixture("e3min.wta");
  BiAutomaton bi = disjoint_union(max_half, min_half);
  Separator separator(bi);
  for (const Term& t : enumerate_terms(bi.core().alphabet(), 3)) {
    SemValue vmax = evaluate(max_half, t);
    SemValue vmin = evaluate(min_half, t);
    SemValue vsep = separator.evaluate(t);
    REQUIRE(vmax.is_bot() == vsep.is_bot());
    REQUIRE(vmin.is_bot() == vsep.is_bot());
    if (!vsep.is_bot()) {
      CHECK(vmax.value() <= vsep.value());
      CHECK(vsep.value() <= vmin.value());
    }
  }
}

TEST_CASE("materialize") {
  BiAutomaton bi = e1_bi();
  Separator separator(bi);

  auto exceeded = separator.materialize(0);
  REQUIRE(std::holds_alternative<BudgetExceeded>(exceeded));

  auto result = separator.materialize(100);
  REQUIRE(std::holds_alternative<MaterializedSep>(result));
  const MaterializedSep& built = std::get<MaterializedSep>(result);
  CHECK(built.automaton.core().state_count() == 2);

  // The finite automaton computes the same function as the on-the-fly run.
  for (int n = 0; n <= 10; ++n) {
    Term t = unary_tower("a", "e", n);
    CHECK(evaluate(built.automaton, t) == separator.evaluate(t));
  }

  // Unambiguous, and therefore mode-independent.
  CHECK(!decide_ambiguity(built.automaton.core()));
  Wta as_min(Automaton(built.automaton.core()), Mode::Min);
  for (int n = 0; n <= 10; ++n) {
    Term t = unary_tower("a", "e", n);
    CHECK(evaluate(built.automaton, t) == evaluate(as_min, t));
  }
  for (const Term& t : enumerate_terms(bi.core().alphabet(), 4))
    CHECK(accepting_runs(built.automaton.core(), enumerate_runs(built.automaton.core(), t)).size() <= 1);

  // The sidecar names every state and round-trips through the text format.
  CHECK(built.state_table.size() == 2);
  std::string sidecar = built.sidecar_json(bi);
  CHECK(nlohmann::json::parse(sidecar).at("states").size() == 2);
  Wta reloaded = Wta::parse(built.automaton.str());
  for (int n = 0; n <= 5; ++n) {
    Term t = unary_tower("a", "e", n);
    CHECK(evaluate(reloaded, t) == evaluate(built.automaton, t));
  }
}

TEST_CASE("binary pair materialization honestly reports the budget") {
  // The binary pair keeps generating fresh reduced representatives, so its
  // reachable separator state space outgrows any desk-scale budget. The
  // result must be a BudgetExceeded, reported quickly, not a hang.
  BiAutomaton bi = e3_bi();
  Separator separator(bi);
  auto result = separator.materialize(300);
  REQUIRE(std::holds_alternative<BudgetExceeded>(result));
  CHECK(std::get<BudgetExceeded>(result).frontier_size == 301);
}
