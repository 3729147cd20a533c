#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "tropa/reachprod.hpp"

using namespace tropa;
using tropa::test::load_fixture;
using tropa::test::unary_tower;

namespace {

SemValue fold_runs(const Wta& w, const Term& t) {
  SemValue out;
  for (const Run& run : accepting_runs(w.core(), enumerate_runs(w.core(), t))) {
    Weight v = run.weight + w.core().final_weights().at(run.root_state());
    if (out.is_bot() || (w.mode() == Mode::Max ? v > out.value() : v < out.value()))
      out = SemValue(v);
  }
  return out;
}

}  // namespace

TEST_CASE("weight parsing is exact and canonical") {
  CHECK(parse_weight("1/2") == Weight(1, 2));
  CHECK(parse_weight("-2") == Weight(-2));
  CHECK(parse_weight("0.5") == Weight(1, 2));
  CHECK(parse_weight("-2.25") == Weight(-9, 4));
  CHECK(parse_weight("3/6") == Weight(1, 2));
  CHECK(weight_str(parse_weight("3/6")) == "1/2");
  CHECK(weight_str(parse_weight("4/2")) == "2");
  CHECK(weight_str(parse_weight("-1.50")) == "-3/2");
  CHECK_THROWS_AS(parse_weight("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight(""), std::invalid_argument);
  CHECK(SemValue::bot().str() == "bot");
  CHECK(SemValue(Weight(2)).str() == "2");
}

TEST_CASE("automaton text format") {
  Wta e1max = load_fixture("e1max.wta");
  CHECK(e1max.mode() == Mode::Max);
  CHECK(e1max.core().state_count() == 1);
  CHECK(e1max.core().transitions().size() == 2);
  CHECK(e1max.core().alphabet().rank("a") == 1);

  // Writer output parses back to the same automaton text.
  Wta reparsed = Wta::parse(e1max.str());
  CHECK(reparsed.str() == e1max.str());

  CHECK_THROWS_AS(Wta::parse("mode max\nstates q\n"), ParseError);  // no alphabet
  CHECK_THROWS_AS(Wta::parse("alphabet { e/0 }\nstates q\nfinal q : 0\ntrans e() -> q : 0\n"),
                  ParseError);  // no mode
  CHECK_THROWS_AS(
      Wta::parse("alphabet { e/0 }\nmode max\nstates q\ntrans e() -> z : 0\n"),
      ParseError);  // unknown state
  CHECK_THROWS_AS(
      Wta::parse("alphabet { e/0 }\nmode max\nstates q\ntrans a(q) -> q : 0\n"),
      ParseError);  // unknown letter

  // Duplicate structural transitions: conflicting weights rejected, identical tolerated.
  CHECK_THROWS_AS(Wta::parse("alphabet { e/0 }\nmode max\nstates q\nfinal q : 0\n"
                             "trans e() -> q : 0\ntrans e() -> q : 1\n"),
                  ParseError);
  Wta dup = Wta::parse("alphabet { e/0 }\nmode max\nstates q\nfinal q : 0\n"
                       "trans e() -> q : 0\ntrans e() -> q : 0\n");
  CHECK(dup.core().transitions().size() == 1);
}

TEST_CASE("evaluate") {
  Wta e1max = load_fixture("e1max.wta");
  Wta e1min = load_fixture("e1min.wta");
  Term t = unary_tower("a", "e", 2);
  CHECK(evaluate(e1max, t) == SemValue(Weight(2)));
  CHECK(evaluate(e1min, t) == SemValue(Weight(4)));

  Wta no_finals = Wta::parse("alphabet { e/0 }\nmode max\nstates q\ntrans e() -> q : 0\n");
  CHECK(evaluate(no_finals, Term("e")).is_bot());

  CHECK_THROWS_AS(evaluate(e1max, Term("z")), std::invalid_argument);  // alphabet mismatch
}

TEST_CASE("best_to_state") {
  Wta e1max = load_fixture("e1max.wta");
  auto table = best_to_state(e1max, Term("e"));
  CHECK(table[0] == SemValue(Weight(0)));
  table = best_to_state(e1max, unary_tower("a", "e", 1));
  CHECK(table[0] == SemValue(Weight(1)));

  // Two runs into one state; the max of the two run weights wins.
  Wta two = Wta::parse(
      "alphabet { e/0, a/1 }\nmode max\nstates u v\nfinal u : 0\n"
      "trans e() -> u : 0\ntrans e() -> v : 0\ntrans a(u) -> u : 1\ntrans a(v) -> u : 3\n");
  auto tt = best_to_state(two, unary_tower("a", "e", 1));
  CHECK(tt[*two.core().state_id("u")] == SemValue(Weight(3)));
  CHECK(tt[*two.core().state_id("v")].is_bot());
}

TEST_CASE("best_context") {
  Wta e1max = load_fixture("e1max.wta");
  Wta e1min = load_fixture("e1min.wta");
  const RankedAlphabet& alphabet = e1max.core().alphabet();

  PairTable identity = best_context(e1max, Context::hole());
  CHECK(identity.at(0, 0) == SemValue(Weight(0)));

  PairTable one = best_context(e1max, parse_context(alphabet, "a(□)"));
  CHECK(one.at(0, 0) == SemValue(Weight(1)));

  PairTable two = best_context(e1min, parse_context(alphabet, "a(a(□))"));
  CHECK(two.at(0, 0) == SemValue(Weight(4)));

  BiAutomaton bi = disjoint_union(e1max, e1min);
  PairTable bi_id = best_context(bi, Context::hole());
  for (StateId p = 0; p < 2; ++p)
    for (StateId q = 0; q < 2; ++q) {
      if (p == q)
        CHECK(bi_id.at(p, q) == SemValue(Weight(0)));
      else
        CHECK(bi_id.at(p, q).is_bot());
    }
}

TEST_CASE("run enumeration") {
  Wta e1max = load_fixture("e1max.wta");
  CHECK(enumerate_runs(e1max.core(), Term("e")).size() == 1);

  Wta amb = load_fixture("amb.wta");
  auto runs = enumerate_runs(amb.core(), Term("e"));
  CHECK(runs.size() == 2);
  CHECK(accepting_runs(amb.core(), runs).size() == 2);

  // A letter without transitions kills every run through it.
  Wta partial = Wta::parse(
      "alphabet { e/0, g/0 }\nmode max\nstates q\nfinal q : 0\ntrans e() -> q : 0\n");
  CHECK(enumerate_runs(partial.core(), Term("g")).empty());

  auto context_runs =
      enumerate_context_runs(e1max.core(), parse_context(e1max.core().alphabet(), "a(□)"));
  REQUIRE(context_runs.size() == 1);
  CHECK(context_runs[0].hole_state == 0);
  CHECK(context_runs[0].weight == Weight(1));
}

TEST_CASE("evaluate agrees with folding enumerated runs") {
  for (const char* name : {"e1max.wta", "e1min.wta", "e2min.wta", "e3max.wta", "e3min.wta"}) {
    Wta w = load_fixture(name);
    for (const Term& t : enumerate_terms(w.core().alphabet(), w.core().alphabet().letters().size() > 2 ? 2 : 4))
      CHECK(evaluate(w, t) == fold_runs(w, t));
  }
  Wta no_finals = Wta::parse("alphabet { e/0 }\nmode max\nstates q\ntrans e() -> q : 0\n");
  CHECK(evaluate(no_finals, Term("e")) == fold_runs(no_finals, Term("e")));
}

TEST_CASE("context tables compose with term tables") {
  Wta e3max = load_fixture("e3max.wta");
  Wta e3min = load_fixture("e3min.wta");
  BiAutomaton bi = disjoint_union(e3max, e3min);
  const RankedAlphabet& alphabet = bi.core().alphabet();
  for (const Context& c : enumerate_contexts(alphabet, 1)) {
    PairTable ct = best_context(bi, c);
    for (const Term& t : enumerate_terms(alphabet, 1)) {
      auto whole = best_to_state(bi, compose(c, t));
      auto part = best_to_state(bi, t);
      for (StateId q = 0; q < bi.core().state_count(); ++q) {
        SemValue expected;
        for (StateId p = 0; p < bi.core().state_count(); ++p) {
          if (part[p].is_bot() || ct.at(p, q).is_bot()) continue;
          Weight v = part[p].value() + ct.at(p, q).value();
          if (expected.is_bot() ||
              (bi.origin(q) == Mode::Max ? v > expected.value() : v < expected.value()))
            expected = SemValue(v);
        }
        CHECK(whole[q] == expected);
      }
    }
  }
}

TEST_CASE("disjoint union") {
  Wta e1max = load_fixture("e1max.wta");
  Wta e1min = load_fixture("e1min.wta");
  BiAutomaton bi = disjoint_union(e1max, e1min);
  CHECK(bi.core().state_count() == 2);
  CHECK(bi.core().transitions().size() == 4);
  CHECK(bi.origin(0) == Mode::Max);
  CHECK(bi.origin(1) == Mode::Min);
  CHECK(bi.core().state_name(0) == "q");
  CHECK(bi.core().state_name(1) == "r");

  // Name collision: the min half is renamed.
  BiAutomaton renamed = disjoint_union(e1max, load_fixture("e2min.wta"));
  CHECK(renamed.core().state_name(0) == "q");
  CHECK(renamed.core().state_name(1) == "q'");
  CHECK(renamed.core().state_count() == 2);

  // Empty min half: no min-origin final states.
  Wta empty_min = Wta::parse("alphabet { e/0, a/1 }\nmode min\nstates\n");
  BiAutomaton half_empty = disjoint_union(e1max, empty_min);
  for (const auto& [q, w] : half_empty.core().final_weights())
    CHECK(half_empty.origin(q) == Mode::Max);

  Wta other_alphabet = Wta::parse("alphabet { e/0 }\nmode min\nstates r\nfinal r : 0\n");
  CHECK_THROWS_AS(disjoint_union(e1max, other_alphabet), std::invalid_argument);
  CHECK_THROWS_AS(disjoint_union(e1min, e1min), std::invalid_argument);  // wrong modes

  CHECK(evaluate_half(bi, Mode::Max, unary_tower("a", "e", 3)) == SemValue(Weight(3)));
  CHECK(evaluate_half(bi, Mode::Min, unary_tower("a", "e", 3)) == SemValue(Weight(6)));
}

TEST_CASE("ambiguity decision") {
  CHECK(!decide_ambiguity(load_fixture("e1max.wta").core()));

  auto witness = decide_ambiguity(load_fixture("amb.wta").core());
  REQUIRE(witness.has_value());
  CHECK(*witness == Term("e"));

  // Two final states, but every term still has at most one accepting run.
  Wta chain = Wta::parse(
      "alphabet { e/0, a/1 }\nmode max\nstates u v\nfinal u : 0\nfinal v : 0\n"
      "trans e() -> u : 0\ntrans a(u) -> v : 0\n");
  CHECK(!decide_ambiguity(chain.core()));

  // Witnesses carry at least two accepting runs, and unambiguous automata
  // admit at most one on every small term.
  for (const char* name : {"e1max.wta", "e3max.wta", "amb.wta"}) {
    Wta w = load_fixture(name);
    auto verdict = decide_ambiguity(w.core());
    if (verdict) {
      CHECK(accepting_runs(w.core(), enumerate_runs(w.core(), *verdict)).size() >= 2);
    } else {
      for (const Term& t : enumerate_terms(w.core().alphabet(), 3))
        CHECK(accepting_runs(w.core(), enumerate_runs(w.core(), t)).size() <= 1);
    }
  }
}

TEST_CASE("unambiguous automata compute the same function in both modes") {
  Wta e1max = load_fixture("e1max.wta");
  Wta as_min(Automaton(e1max.core()), Mode::Min);
  for (const Term& t : enumerate_terms(e1max.core().alphabet(), 6))
    CHECK(evaluate(e1max, t) == evaluate(as_min, t));
}
