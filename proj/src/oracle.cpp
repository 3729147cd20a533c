#include "tropa/oracle.hpp"

#include <algorithm>
#include <future>
#include <ostream>

namespace tropa {

Report::Verdict Report::overall() const {
  Verdict worst = verdict;
  for (const Report& c : children) {
    Verdict v = c.overall();
    if (v == Verdict::Violation) return Verdict::Violation;
    if (v == Verdict::Fail) worst = Verdict::Fail;
  }
  return worst;
}

namespace {

const char* verdict_name(Report::Verdict v) {
  switch (v) {
    case Report::Verdict::Pass: return "pass";
    case Report::Verdict::Fail: return "fail";
    default: return "violation";
  }
}

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json j{{"name", name},
                   {"verdict", verdict_name(verdict)},
                   {"checked", checked},
                   {"duration_ms", duration.count()}};
  if (!witness.empty()) j["witness"] = witness;
  if (!detail.empty()) j["detail"] = detail;
  if (!children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const Report& c : children) kids.push_back(c.to_json());
    j["children"] = std::move(kids);
  }
  return j;
}

void Report::print(std::ostream& out, int indent) const {
  Verdict v = overall();
  for (int i = 0; i < indent; ++i) out << "  ";
  out << (v == Verdict::Pass ? "PASS" : v == Verdict::Fail ? "FAIL" : "VIOLATION") << " " << name
      << "  checked=" << checked << " (" << duration.count() << " ms)";
  if (!witness.empty()) out << "\n" << std::string(2 * indent + 2, ' ') << "witness: " << witness;
  if (!detail.empty()) out << "\n" << std::string(2 * indent + 2, ' ') << "detail: " << detail;
  out << "\n";
  for (const Report& c : children) c.print(out, indent + 1);
}

namespace {

struct Failure {
  Report::Verdict verdict = Report::Verdict::Fail;
  std::string witness;
  std::string detail;
};

class Timer {
 public:
  std::chrono::milliseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Checks `body` on every item; items may be partitioned across workers, and
// chunk results merge in index order so the report is deterministic.
template <typename Item, typename Body>
Report exhaustive(const std::string& name, const std::vector<Item>& items, int workers,
                  const Body& body) {
  Timer timer;
  Report report;
  report.name = name;
  report.checked = static_cast<long long>(items.size());

  auto run_chunk = [&](std::size_t begin, std::size_t end) -> std::optional<Failure> {
    for (std::size_t i = begin; i < end; ++i)
      if (auto f = body(items[i])) return f;
    return std::nullopt;
  };

  std::optional<Failure> failure;
  if (workers <= 1 || items.size() < 2) {
    failure = run_chunk(0, items.size());
  } else {
    std::size_t n = items.size();
    std::size_t chunks = std::min<std::size_t>(workers, n);
    std::vector<std::future<std::optional<Failure>>> futures;
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t begin = n * c / chunks, end = n * (c + 1) / chunks;
      futures.push_back(std::async(std::launch::async, run_chunk, begin, end));
    }
    for (auto& f : futures) {
      auto r = f.get();
      if (r && !failure) failure = std::move(r);
    }
  }
  if (failure) {
    report.verdict = failure->verdict;
    report.witness = std::move(failure->witness);
    report.detail = std::move(failure->detail);
  }
  report.duration = timer.elapsed();
  return report;
}

std::string chain_detail(const char* label, const SemValue& left, const SemValue& right) {
  return std::string(label) + ": " + left.str() + " vs " + right.str();
}

// Value of one half on compose(c, s) from precomputed tables:
// opt over hole state p and final q of table[p] + context(p, q) + final weight.
SemValue glue_value(const BiAutomaton& bi, const PairTable& context_table,
                    const std::vector<SemValue>& term_table, Mode half) {
  SemValue out;
  for (const auto& [q, w] : bi.core().final_weights()) {
    if (bi.origin(q) != half) continue;
    for (StateId p = 0; p < bi.core().state_count(); ++p) {
      if (bi.origin(p) != half || term_table[p].is_bot()) continue;
      const SemValue& through = context_table.at(p, q);
      if (through.is_bot()) continue;
      Weight v = term_table[p].value() + through.value() + w;
      if (out.is_bot() || (half == Mode::Max ? v > out.value() : v < out.value()))
        out = SemValue(v);
    }
  }
  return out;
}

}  // namespace

Report check_hypothesis(const Wta& max_half, const Wta& min_half, int height_bound,
                        const OracleOptions& options) {
  std::vector<Term> terms = enumerate_terms(max_half.core().alphabet(), height_bound);
  return exhaustive<Term>(
      "hypothesis: max <= min with equal support (height <= " + std::to_string(height_bound) + ")",
      terms, options.workers, [&](const Term& t) -> std::optional<Failure> {
        SemValue vmax = evaluate(max_half, t);
        SemValue vmin = evaluate(min_half, t);
        if (vmax.is_bot() != vmin.is_bot())
          return Failure{Report::Verdict::Fail, t.str(),
                         chain_detail("support differs; max vs min", vmax, vmin)};
        if (!vmax.is_bot() && vmax.value() > vmin.value())
          return Failure{Report::Verdict::Fail, t.str(),
                         chain_detail("max > min", vmax, vmin)};
        return std::nullopt;
      });
}

Report verify_separation(const Wta& max_half, const Wta& min_half, int height_bound,
                         const OracleOptions& options) {
  BiAutomaton bi = disjoint_union(max_half, min_half);
  Separator separator(bi);
  std::vector<Term> terms = enumerate_terms(max_half.core().alphabet(), height_bound);
  return exhaustive<Term>(
      "separation: max <= sep <= min (height <= " + std::to_string(height_bound) + ")", terms,
      options.workers, [&](const Term& t) -> std::optional<Failure> {
        SemValue vmax = evaluate(max_half, t);
        SemValue vmin = evaluate(min_half, t);
        SemValue vsep;
        try {
          vsep = separator.evaluate(t);
        } catch (const HypothesisViolationError& e) {
          return Failure{Report::Verdict::Violation, t.str(), e.what()};
        }
        if (vmax.is_bot() != vsep.is_bot() || vmin.is_bot() != vsep.is_bot())
          return Failure{Report::Verdict::Fail, t.str(),
                         "support mismatch: max " + vmax.str() + ", sep " + vsep.str() +
                             ", min " + vmin.str()};
        if (!vsep.is_bot() &&
            !(vmax.value() <= vsep.value() && vsep.value() <= vmin.value()))
          return Failure{Report::Verdict::Fail, t.str(),
                         "chain broken: max " + vmax.str() + ", sep " + vsep.str() + ", min " +
                             vmin.str()};
        return std::nullopt;
      });
}

namespace {

Report lookahead_report(const BiAutomaton& bi, const Families& fam,
                        const std::vector<Term>& terms, const std::vector<Context>& contexts,
                        int workers) {
  ProAutomaton pro = materialize_pro(bi);

  struct Job {
    const Term* term = nullptr;      // term half of the lemma
    const Context* context = nullptr;  // context half
    const StateSet* set = nullptr;   // productive set for terms, reach set for contexts
  };
  std::vector<Job> jobs;
  for (const StateSet& p : fam.productive)
    for (const Term& t : terms) jobs.push_back({&t, nullptr, &p});
  for (const StateSet& r : fam.reachable)
    for (const Context& c : contexts) jobs.push_back({nullptr, &c, &r});

  return exhaustive<Job>(
      "lemma: lookahead (unique annotation runs)", jobs, workers,
      [&](const Job& job) -> std::optional<Failure> {
        if (job.term) {
          int hits = 0;
          const ProState* found = nullptr;
          for (const Run& run : enumerate_runs(pro.nfa, *job.term)) {
            const ProState& root = pro.states[run.root_state()];
            if (root.prod_set == *job.set) {
              ++hits;
              found = &root;
            }
          }
          if (hits != 1)
            return Failure{Report::Verdict::Fail, job.term->str(),
                           "expected exactly one annotation run, found " + std::to_string(hits)};
          if (found->reach_set != reach(bi, *job.term))
            return Failure{Report::Verdict::Fail, job.term->str(),
                           "annotation reach component differs from Reach"};
          return std::nullopt;
        }
        int hits = 0;
        const ProState* hole = nullptr;
        for (const ContextRun& run : enumerate_context_runs(pro.nfa, *job.context)) {
          if (!pro.nfa.is_final(run.root_state())) continue;
          const ProState& at_hole = pro.states[run.hole_state];
          if (at_hole.reach_set == *job.set) {
            ++hits;
            hole = &at_hole;
          }
        }
        if (hits != 1)
          return Failure{Report::Verdict::Fail, job.context->str(),
                         "expected exactly one accepting annotation run, found " +
                             std::to_string(hits)};
        if (hole->prod_set != prod(bi, *job.context))
          return Failure{Report::Verdict::Fail, job.context->str(),
                         "annotation productive component differs from Prod"};
        return std::nullopt;
      });
}

Report pumping_report(const BiAutomaton& bi, const Families& fam,
                      const std::vector<Context>& contexts, int workers) {
  std::vector<const Context*> loops;
  for (const Context& c : contexts)
    if (!c.empty()) loops.push_back(&c);

  return exhaustive<const Context*>(
      "lemma: pumping (cycle weights straddle the shift)", loops, workers,
      [&](const Context* loop) -> std::optional<Failure> {
        for (const StateSet& p : fam.productive) {
          for (const StateSet& r : fam.reachable) {
            PumpingResult res = pumping_shift(bi, *loop, p, r);
            if (auto* violation = std::get_if<HypothesisViolation>(&res))
              return Failure{Report::Verdict::Violation, loop->str(), violation->describe(bi)};
            const Weight& x = std::get<Weight>(res);
            StateSet eligible = intersect(p, r);
            std::optional<Failure> bad;
            for_each_context_run_weight(
                bi.core(), *loop, [&](StateId from, StateId to, const Weight& w) {
                  if (bad || from != to || !eligible.count(from)) return;
                  bool ok = bi.origin(from) == Mode::Max ? w <= x : x <= w;
                  if (!ok)
                    bad = Failure{Report::Verdict::Fail, loop->str(),
                                  "cycle through " + bi.core().state_name(from) + " of weight " +
                                      weight_str(w) + " escapes shift " + weight_str(x)};
                });
            if (bad) return bad;
          }
        }
        return std::nullopt;
      });
}

Report refinement_facts_report(const BiAutomaton& bi, const Families& fam,
                               const std::vector<Term>& terms, int workers) {
  return exhaustive<Term>(
      "facts: reflexivity and transitivity of refinement", terms, workers,
      [&](const Term& t) -> std::optional<Failure> {
        for (const StateSet& p : fam.productive) {
          if (!check_refinement(bi, t, t, p, Weight(0)))
            return Failure{Report::Verdict::Fail, t.str(), "reflexivity failed"};
          std::vector<ShiftCertificate> steps;
          try {
            shift_reduce(bi, t, p, fam, &steps);
          } catch (const HypothesisViolationError& e) {
            return Failure{Report::Verdict::Violation, t.str(), e.what()};
          }
          if (steps.empty()) continue;
          ShiftCertificate chained = steps.front();
          for (std::size_t i = 1; i < steps.size(); ++i) {
            chained = compose_transitive(chained, steps[i]);
            if (!check_refinement(bi, chained.source, chained.target, chained.prod_set,
                                  chained.shift))
              return Failure{Report::Verdict::Fail, t.str(),
                             "transitive composition failed re-validation at step " +
                                 std::to_string(i)};
          }
        }
        return std::nullopt;
      });
}

Report congruence_report(const BiAutomaton& bi, const Families& fam,
                         const std::vector<Term>& terms, int workers) {
  return exhaustive<Term>(
      "lemma: congruence of refinement", terms, workers,
      [&](const Term& t) -> std::optional<Failure> {
        for (const StateSet& p : fam.productive) {
          auto annotation = annotate(bi, t, p, fam);
          ProTransition pro;
          pro.letter = t.letter();
          pro.target = annotation.at(NodePath{});
          std::vector<ShiftCertificate> child_certs;
          try {
            for (std::size_t i = 0; i < t.children().size(); ++i) {
              const ProState& child = annotation.at(NodePath{static_cast<int>(i)});
              pro.children.push_back(child);
              Reduction red = shift_reduce(bi, t.children()[i], child.prod_set, fam);
              child_certs.push_back(
                  ShiftCertificate{t.children()[i], red.term, child.prod_set, red.shift});
            }
            ShiftCertificate lifted = compose_congruence(bi, t.letter(), child_certs, pro);
            if (!check_refinement(bi, lifted.source, lifted.target, lifted.prod_set, lifted.shift))
              return Failure{Report::Verdict::Fail, t.str(),
                             "congruence certificate failed re-validation"};
          } catch (const HypothesisViolationError& e) {
            return Failure{Report::Verdict::Violation, t.str(), e.what()};
          }
        }
        return std::nullopt;
      });
}

Report improvement_report(const BiAutomaton& bi, const Families& fam,
                          const std::vector<Term>& terms, const std::vector<Context>& contexts,
                          int workers, bool corrupt_min_shift) {
  // Context tables are shared across all certificates; group them by Prod.
  std::map<StateSet, std::vector<std::pair<const Context*, PairTable>>> by_prod;
  for (const Context& c : contexts)
    by_prod[prod(bi, c)].emplace_back(&c, best_context(bi, c));

  return exhaustive<Term>(
      std::string("lemma: shift-refine-improves (separation interval preserved)") +
          (corrupt_min_shift ? " [corrupted min shift]" : ""),
      terms, workers, [&](const Term& s) -> std::optional<Failure> {
        for (const StateSet& p : fam.productive) {
          std::optional<Reduction> red;
          try {
            red = shift_reduce(bi, s, p, fam);
          } catch (const HypothesisViolationError& e) {
            return Failure{Report::Verdict::Violation, s.str(), e.what()};
          }
          auto it = by_prod.find(p);
          if (it == by_prod.end()) continue;
          std::vector<SemValue> table_s = best_to_state(bi, s);
          std::vector<SemValue> table_t = best_to_state(bi, red->term);
          Weight min_shift = red->shift + Weight(corrupt_min_shift ? 1 : 0);
          for (const auto& [context, bc] : it->second) {
            SemValue max_s = glue_value(bi, bc, table_s, Mode::Max);
            SemValue max_t = glue_value(bi, bc, table_t, Mode::Max);
            SemValue min_s = glue_value(bi, bc, table_s, Mode::Min);
            SemValue min_t = glue_value(bi, bc, table_t, Mode::Min);
            std::string witness = "s=" + s.str() + " c=" + context->str();
            if (max_s.is_bot() != max_t.is_bot() || min_s.is_bot() != min_t.is_bot())
              return Failure{Report::Verdict::Fail, witness,
                             "substitution changed the support of a half"};
            if (!max_s.is_bot() && !(max_s.value() <= max_t.value() + red->shift))
              return Failure{Report::Verdict::Fail, witness,
                             chain_detail("max(c.s) <= max(c.t)+x broken", max_s, max_t)};
            if (!max_t.is_bot() && !min_t.is_bot() && !(max_t.value() <= min_t.value()))
              return Failure{Report::Verdict::Fail, witness,
                             chain_detail("max(c.t) <= min(c.t) broken", max_t, min_t)};
            if (!min_t.is_bot() && !(min_t.value() + min_shift <= min_s.value()))
              return Failure{Report::Verdict::Fail, witness,
                             chain_detail("min(c.t)+x <= min(c.s) broken", min_t, min_s)};
          }
        }
        return std::nullopt;
      });
}

}  // namespace

Report verify_lemma_suite(const BiAutomaton& bi, int height_bound, const OracleOptions& options) {
  Timer timer;
  Families fam = families(bi);
  std::vector<Term> terms = enumerate_terms(bi.core().alphabet(), height_bound);
  std::vector<Context> contexts = enumerate_contexts(bi.core().alphabet(), height_bound - 1);

  Report report;
  report.name = "lemma suite (terms <= " + std::to_string(height_bound) + ", contexts <= " +
                std::to_string(height_bound - 1) + ")";
  report.children.push_back(lookahead_report(bi, fam, terms, contexts, options.workers));
  report.children.push_back(pumping_report(bi, fam, contexts, options.workers));
  report.children.push_back(refinement_facts_report(bi, fam, terms, options.workers));
  report.children.push_back(congruence_report(bi, fam, terms, options.workers));
  report.children.push_back(
      improvement_report(bi, fam, terms, contexts, options.workers, options.corrupt_min_shift));
  for (const Report& c : report.children) report.checked += c.checked;
  report.duration = timer.elapsed();
  return report;
}

Report check_lm_corollary(const Wta& max_half, const Wta& min_half, int height_bound,
                          const OracleOptions& options) {
  BiAutomaton bi = disjoint_union(max_half, min_half);
  Separator separator(bi);
  std::vector<Term> terms = enumerate_terms(max_half.core().alphabet(), height_bound);
  return exhaustive<Term>(
      "corollary: sep == max == min (height <= " + std::to_string(height_bound) + ")", terms,
      options.workers, [&](const Term& t) -> std::optional<Failure> {
        SemValue vmax = evaluate(max_half, t);
        SemValue vmin = evaluate(min_half, t);
        if (!(vmax == vmin))
          return Failure{Report::Verdict::Fail, t.str(),
                         "not a corollary instance: max " + vmax.str() + " differs from min " +
                             vmin.str()};
        SemValue vsep;
        try {
          vsep = separator.evaluate(t);
        } catch (const HypothesisViolationError& e) {
          return Failure{Report::Verdict::Violation, t.str(), e.what()};
        }
        if (!(vsep == vmax))
          return Failure{Report::Verdict::Fail, t.str(),
                         "separator value " + vsep.str() + " differs from " + vmax.str()};
        return std::nullopt;
      });
}

int default_height_bound(const RankedAlphabet& alphabet) {
  return alphabet.is_unary_word_alphabet() ? 10 : 4;
}

bool check_refinement_by_enumeration(const BiAutomaton& bi, const Term& source, const Term& target,
                                     const StateSet& prod_set, const Weight& shift) {
  auto reach_by_runs = [&](const Term& t) {
    StateSet out;
    for (const Run& r : enumerate_runs(bi.core(), t)) out.insert(r.root_state());
    return out;
  };
  if (reach_by_runs(source) != reach_by_runs(target)) return false;

  std::vector<Run> source_runs = enumerate_runs(bi.core(), source);
  std::vector<Run> target_runs = enumerate_runs(bi.core(), target);
  for (StateId p : prod_set) {
    for (const Run& challenge : source_runs) {
      if (challenge.root_state() != p) continue;
      bool answered = false;
      for (const Run& response : target_runs) {
        if (response.root_state() != p) continue;
        bool ok = bi.origin(p) == Mode::Max
                      ? challenge.weight <= response.weight + shift
                      : response.weight + shift <= challenge.weight;
        if (ok) {
          answered = true;
          break;
        }
      }
      if (!answered) return false;
    }
  }
  return true;
}

}  // namespace tropa
