#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tropa/oracle.hpp"
#include "tropa/separator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitHypothesisViolation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUsage = 64;

tropa::Term word_to_term(const tropa::RankedAlphabet& alphabet, const std::string& word) {
  if (!alphabet.is_unary_word_alphabet())
    throw std::invalid_argument(
        "--word needs an alphabet of unary letters plus exactly one rank-0 end letter");
  std::string end_letter;
  for (const auto& [name, rank] : alphabet.letters())
    if (rank == 0) end_letter = name;
  tropa::Term t(end_letter);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    std::string name(1, *it);
    if (!alphabet.contains(name) || alphabet.rank(name) != 1)
      throw std::invalid_argument("word symbol '" + name + "' is not a unary letter");
    t = tropa::Term(name, {std::move(t)});
  }
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

struct EvalArgs {
  std::string automaton_file;
  std::string term_text;
  std::string word;
};

int cmd_eval(const EvalArgs& args) {
  tropa::Wta automaton = tropa::Wta::load(args.automaton_file);
  tropa::Term t = args.word.empty()
                      ? tropa::parse_term(automaton.core().alphabet(), args.term_text)
                      : word_to_term(automaton.core().alphabet(), args.word);
  std::cout << tropa::evaluate(automaton, t).str() << "\n";
  return kExitOk;
}

struct SeparateArgs {
  std::string max_file, min_file;
  std::optional<int> check_height;
  bool materialize = false;
  std::size_t budget = 1000;
  std::string out_file;
  std::string eval_term, eval_word;
  int workers = 1;
};

int cmd_separate(const SeparateArgs& args) {
  tropa::Wta max_half = tropa::Wta::load(args.max_file);
  tropa::Wta min_half = tropa::Wta::load(args.min_file);

  if (args.check_height) {
    tropa::OracleOptions opts;
    opts.workers = args.workers;
    tropa::Report report = tropa::check_hypothesis(max_half, min_half, *args.check_height, opts);
    if (!report.passed()) {
      std::cout << "hypothesis check failed (height <= " << *args.check_height << ")\n";
      std::cout << "witness: " << report.witness << "\n";
      std::cout << "detail: " << report.detail << "\n";
      return kExitHypothesisViolation;
    }
    std::cout << "hypothesis check passed: " << report.checked << " terms up to height "
              << *args.check_height << "\n";
  }

  tropa::BiAutomaton bi = tropa::disjoint_union(max_half, min_half);
  tropa::Separator separator(bi);
  try {
    if (args.materialize) {
      auto result = separator.materialize(args.budget);
      if (auto* exceeded = std::get_if<tropa::BudgetExceeded>(&result)) {
        std::cerr << "state budget exceeded: " << exceeded->frontier_size
                  << " states discovered, budget " << args.budget << "\n";
        return kExitBudget;
      }
      auto& built = std::get<tropa::MaterializedSep>(result);
      std::cout << "materialized " << built.automaton.core().state_count() << " states, "
                << built.automaton.core().transitions().size() << " transitions\n";
      if (!args.out_file.empty()) {
        write_file(args.out_file, built.automaton.str());
        write_file(args.out_file + ".states.json", built.sidecar_json(bi));
        std::cout << "wrote " << args.out_file << " and " << args.out_file << ".states.json\n";
      }
    }
    if (!args.eval_term.empty() || !args.eval_word.empty()) {
      tropa::Term t = args.eval_word.empty()
                          ? tropa::parse_term(bi.core().alphabet(), args.eval_term)
                          : word_to_term(bi.core().alphabet(), args.eval_word);
      std::cout << separator.evaluate(t).str() << "\n";
    }
  } catch (const tropa::HypothesisViolationError& e) {
    std::cout << e.what() << "\n";
    return kExitHypothesisViolation;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string max_file, min_file;
  std::optional<int> height;
  std::string suite = "all";
  bool json = false;
  int workers = 1;
};

int cmd_verify(const VerifyArgs& args) {
  tropa::Wta max_half = tropa::Wta::load(args.max_file);
  tropa::Wta min_half = tropa::Wta::load(args.min_file);
  int height = args.height ? *args.height
                           : tropa::default_height_bound(max_half.core().alphabet());
  tropa::OracleOptions opts;
  opts.workers = args.workers;

  std::vector<tropa::Report> reports;
  if (args.suite == "lemmas" || args.suite == "all")
    reports.push_back(
        tropa::verify_lemma_suite(tropa::disjoint_union(max_half, min_half), height, opts));
  if (args.suite == "separation" || args.suite == "all")
    reports.push_back(tropa::verify_separation(max_half, min_half, height, opts));
  if (args.suite == "corollary")
    reports.push_back(tropa::check_lm_corollary(max_half, min_half, height, opts));

  bool ok = true;
  if (args.json) {
    nlohmann::json out = nlohmann::json::array();
    for (const tropa::Report& r : reports) {
      out.push_back(r.to_json());
      ok = ok && r.passed();
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const tropa::Report& r : reports) {
      r.print(std::cout);
      ok = ok && r.passed();
    }
  }
  return ok ? kExitOk : kExitVerifyFail;
}

struct ReachProdArgs {
  std::vector<std::string> bi_files;
  std::string term_text, context_text;
  bool families = false;
};

int cmd_reachprod(const ReachProdArgs& args) {
  tropa::Wta max_half = tropa::Wta::load(args.bi_files[0]);
  tropa::Wta min_half = tropa::Wta::load(args.bi_files[1]);
  tropa::BiAutomaton bi = tropa::disjoint_union(max_half, min_half);

  if (!args.term_text.empty()) {
    tropa::Term t = tropa::parse_term(bi.core().alphabet(), args.term_text);
    std::cout << tropa::state_set_str(bi, tropa::reach(bi, t)) << "\n";
  }
  if (!args.context_text.empty()) {
    tropa::Context c = tropa::parse_context(bi.core().alphabet(), args.context_text);
    std::cout << tropa::state_set_str(bi, tropa::prod(bi, c)) << "\n";
  }
  if (args.families) {
    tropa::Families fam = tropa::families(bi);
    for (const tropa::StateSet& r : fam.reachable)
      std::cout << "reachable: " << tropa::state_set_str(bi, r) << "\n";
    for (const tropa::StateSet& p : fam.productive)
      std::cout << "productive: " << tropa::state_set_str(bi, p) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tropa: separation toolkit for tropical tree automata"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate an automaton on a term or word");
  eval->add_option("--automaton", eval_args.automaton_file, "automaton file")->required();
  auto* eval_term = eval->add_option("--term", eval_args.term_text, "term text");
  auto* eval_word = eval->add_option("--word", eval_args.word, "word over a unary alphabet");
  eval_term->excludes(eval_word);

  SeparateArgs sep_args;
  CLI::App* separate =
      app.add_subcommand("separate", "build the separating automaton for a max/min pair");
  separate->add_option("--max", sep_args.max_file, "max-plus automaton file")->required();
  separate->add_option("--min", sep_args.min_file, "min-plus automaton file")->required();
  int check_height = -1;
  auto* check_opt =
      separate->add_option("--check", check_height, "bounded hypothesis check up to this height");
  separate->add_flag("--materialize", sep_args.materialize, "materialize a finite automaton");
  separate->add_option("--budget", sep_args.budget, "state budget for materialization");
  separate->add_option("--out", sep_args.out_file, "output file for the materialized automaton");
  separate->add_option("--eval-term", sep_args.eval_term, "evaluate the separator on this term");
  separate->add_option("--eval-word", sep_args.eval_word, "evaluate the separator on this word");
  separate->add_option("--workers", sep_args.workers, "worker threads for the check");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "run the brute-force oracle suites");
  verify->add_option("--max", verify_args.max_file, "max-plus automaton file")->required();
  verify->add_option("--min", verify_args.min_file, "min-plus automaton file")->required();
  int verify_height = -1;
  auto* height_opt = verify->add_option("--height", verify_height, "term height bound");
  verify->add_option("--suite", verify_args.suite, "lemmas|separation|corollary|all")
      ->check(CLI::IsMember({"lemmas", "separation", "corollary", "all"}));
  verify->add_flag("--json", verify_args.json, "machine-readable report");
  verify->add_option("--workers", verify_args.workers, "worker threads");

  ReachProdArgs rp_args;
  CLI::App* reachprod = app.add_subcommand("reachprod", "reachable/productive analyses");
  reachprod->add_option("--bi-of", rp_args.bi_files, "MAX and MIN automaton files")
      ->expected(2)
      ->required();
  reachprod->add_option("--term", rp_args.term_text, "print Reach of this term");
  reachprod->add_option("--context", rp_args.context_text, "print Prod of this context");
  reachprod->add_flag("--families", rp_args.families, "list the reachable/productive families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval->parsed()) {
      if (eval_args.term_text.empty() && eval_args.word.empty()) {
        std::cerr << "eval: one of --term or --word is required\n";
        return kExitUsage;
      }
      return cmd_eval(eval_args);
    }
    if (separate->parsed()) {
      if (*check_opt) sep_args.check_height = check_height;
      if (!sep_args.check_height && !sep_args.materialize && sep_args.eval_term.empty() &&
          sep_args.eval_word.empty()) {
        std::cerr << "separate: nothing to do (use --check, --materialize or --eval-*)\n";
        return kExitUsage;
      }
      return cmd_separate(sep_args);
    }
    if (verify->parsed()) {
      if (*height_opt) verify_args.height = verify_height;
      return cmd_verify(verify_args);
    }
    if (reachprod->parsed()) {
      if (rp_args.term_text.empty() && rp_args.context_text.empty() && !rp_args.families) {
        std::cerr << "reachprod: one of --term, --context or --families is required\n";
        return kExitUsage;
      }
      return cmd_reachprod(rp_args);
    }
  } catch (const tropa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
