#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "tropa/reachprod.hpp"

using namespace tropa;
using tropa::test::load_fixture;
using tropa::test::unary_tower;

namespace {

BiAutomaton e1_bi() {
  return disjoint_union(load_fixture("e1max.wta"), load_fixture("e1min.wta"));
}

// Min half with no rank-0 transition: nothing is reachable on that side.
BiAutomaton lopsided_bi() {
  Wta min_half = Wta::parse(
      "alphabet { e/0, a/1 }\nmode min\nstates r\nfinal r : 0\ntrans a(r) -> r : 1\n");
  return disjoint_union(load_fixture("e1max.wta"), min_half);
}

BiAutomaton no_final_bi() {
  Wta max_half = Wta::parse("alphabet { e/0 }\nmode max\nstates q\ntrans e() -> q : 0\n");
  Wta min_half = Wta::parse("alphabet { e/0 }\nmode min\nstates r\ntrans e() -> r : 0\n");
  return disjoint_union(max_half, min_half);
}

}  // namespace

TEST_CASE("reach") {
  BiAutomaton bi = e1_bi();
  CHECK(reach(bi, Term("e")) == StateSet{0, 1});
  CHECK(reach(bi, unary_tower("a", "e", 1)) == StateSet{0, 1});
  CHECK(reach(lopsided_bi(), Term("e")) == StateSet{0});
  CHECK(state_set_str(bi, reach(bi, Term("e"))) == "{q, r}");
}

TEST_CASE("prod") {
  BiAutomaton bi = e1_bi();
  const RankedAlphabet& alphabet = bi.core().alphabet();
  CHECK(prod(bi, Context::hole()) == StateSet{0, 1});
  CHECK(prod(bi, parse_context(alphabet, "a(□)")) == StateSet{0, 1});
  CHECK(prod(no_final_bi(), Context::hole()).empty());
}

TEST_CASE("families") {
  BiAutomaton bi = e1_bi();
  Families fam = families(bi);
  CHECK(fam.reachable == std::set<StateSet>{{0, 1}});
  CHECK(fam.productive == std::set<StateSet>{{0, 1}});

  Families empty_finals = families(no_final_bi());
  CHECK(empty_finals.productive == std::set<StateSet>{{}});

  // Alphabet with only a nullary letter: no recursion in the family.
  Wta max_half = Wta::parse("alphabet { e/0 }\nmode max\nstates q\nfinal q : 0\ntrans e() -> q : 0\n");
  Wta min_half = Wta::parse("alphabet { e/0 }\nmode min\nstates r\nfinal r : 0\ntrans e() -> r : 0\n");
  BiAutomaton tiny = disjoint_union(max_half, min_half);
  Families tiny_fam = families(tiny);
  CHECK(tiny_fam.reachable == std::set<StateSet>{reach(tiny, Term("e"))});

  // Every reach/prod of a small witness is in the family and vice versa.
  BiAutomaton e3 = disjoint_union(load_fixture("e3max.wta"), load_fixture("e3min.wta"));
  Families e3fam = families(e3);
  CHECK(e3fam.reachable.size() == 2);
  std::set<StateSet> seen;
  for (const Term& t : enumerate_terms(e3.core().alphabet(), 3)) {
    StateSet r = reach(e3, t);
    CHECK(e3fam.reachable.count(r));
    seen.insert(r);
  }
  CHECK(seen == e3fam.reachable);
  for (const Context& c : enumerate_contexts(e3.core().alphabet(), 2))
    CHECK(e3fam.productive.count(prod(e3, c)));
}

TEST_CASE("single analysis steps") {
  BiAutomaton bi = e1_bi();
  CHECK(bottom_up_reach(bi, "a", {StateSet{0, 1}}) == StateSet{0, 1});
  CHECK(bottom_up_reach(bi, "e", {}) == StateSet{0, 1});

  // No transition feeds from an empty child set.
  CHECK(bottom_up_reach(bi, "a", {StateSet{}}).empty());

  CHECK(top_down_prod(bi, "a", {StateSet{0, 1}}, StateSet{0, 1}, 0) == StateSet{0, 1});
  CHECK(top_down_prod(bi, "a", {StateSet{0, 1}}, StateSet{}, 0).empty());

  BiAutomaton e3 = disjoint_union(load_fixture("e3max.wta"), load_fixture("e3min.wta"));
  // An empty sibling reach set starves the transition.
  CHECK(top_down_prod(e3, "b", {StateSet{}, StateSet{}}, e3.final_state_set(), 0).empty());
}

TEST_CASE("annotate") {
  BiAutomaton bi = e1_bi();
  StateSet all{0, 1};
  auto ann = annotate(bi, unary_tower("a", "e", 1), all);
  CHECK(ann.at(NodePath{}) == ProState{all, all});
  CHECK(ann.at(NodePath{0}) == ProState{all, all});

  auto single = annotate(bi, Term("e"), all);
  CHECK(single.size() == 1);

  // Root reach component always equals Reach of the term.
  for (const Term& t : enumerate_terms(bi.core().alphabet(), 4))
    CHECK(annotate(bi, t, bi.final_state_set()).at(NodePath{}).reach_set == reach(bi, t));

  CHECK_THROWS_AS(annotate(bi, Term("e"), StateSet{0}), std::logic_error);
}

TEST_CASE("materialized annotation automaton satisfies the lookahead lemma") {
  BiAutomaton bi = e1_bi();
  Families fam = families(bi);
  ProAutomaton pro = materialize_pro(bi);
  CHECK(pro.states.size() == 1);

  for (const StateSet& p : fam.productive) {
    for (const Term& t : enumerate_terms(bi.core().alphabet(), 4)) {
      int hits = 0;
      StateSet reach_found;
      for (const Run& run : enumerate_runs(pro.nfa, t)) {
        const ProState& root = pro.states[run.root_state()];
        if (root.prod_set == p) {
          ++hits;
          reach_found = root.reach_set;
        }
      }
      CHECK(hits == 1);
      CHECK(reach_found == reach(bi, t));
      // The unique run is the one annotate() computes.
      auto ann = annotate(bi, t, p, fam);
      CHECK(ann.at(NodePath{}).reach_set == reach_found);
    }
  }
  for (const StateSet& r : fam.reachable) {
    for (const Context& c : enumerate_contexts(bi.core().alphabet(), 3)) {
      int hits = 0;
      StateSet prod_found;
      for (const ContextRun& run : enumerate_context_runs(pro.nfa, c)) {
        if (!pro.nfa.is_final(run.root_state())) continue;
        const ProState& at_hole = pro.states[run.hole_state];
        if (at_hole.reach_set == r) {
          ++hits;
          prod_found = at_hole.prod_set;
        }
      }
      CHECK(hits == 1);
      CHECK(prod_found == prod(bi, c));
    }
  }
}

TEST_CASE("reach of a composition depends on the plugged term only through its reach") {
  BiAutomaton e3 = disjoint_union(load_fixture("e3max.wta"), load_fixture("e3min.wta"));
  const RankedAlphabet& alphabet = e3.core().alphabet();
  auto terms = enumerate_terms(alphabet, 2);
  for (const Context& c : enumerate_contexts(alphabet, 2)) {
    for (const Term& s : terms)
      for (const Term& t : terms) {
        if (reach(e3, s) != reach(e3, t)) continue;
        CHECK(reach(e3, compose(c, s)) == reach(e3, compose(c, t)));
      }
  }
}
