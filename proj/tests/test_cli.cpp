#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

namespace {

struct CmdResult {
  int code;
  std::string output;  // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
  std::string capture = std::string(std::tmpnam(nullptr)) + ".out";
  std::string cmd = std::string(TROPA_BIN) + " " + args + " > " + capture + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::remove(capture.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, buf.str()};
}

std::string fx(const std::string& name) { return tropa::test::fixture_path(name); }

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("eval prints the exact value") {
  CmdResult r = run_cli("eval --automaton " + fx("e1max.wta") + " --word aa");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "2");

  r = run_cli("eval --automaton " + fx("e1max.wta") + " --term 'e()'");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "0");

  // Fractional weights print as fractions.
  r = run_cli("eval --automaton " + fx("e3min.wta") + " --term 'a(e())'");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "3/2");
}

TEST_CASE("eval prints bot outside the support") {
  std::string path = std::string(std::tmpnam(nullptr)) + ".wta";
  std::ofstream(path) << "alphabet { e/0, a/1 }\nmode max\nstates q\nfinal q : 0\n"
                         "trans e() -> q : 0\n";
  CmdResult r = run_cli("eval --automaton " + path + " --term 'a(e())'");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "bot");
  std::remove(path.c_str());
}

TEST_CASE("separate evaluates through the separator") {
  CmdResult r = run_cli("separate --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
                        " --check 6 --eval-word aaa");
  CHECK(r.code == 0);
  // Last line carries the value; the check summary precedes it.
  auto pos = r.output.rfind('\n', r.output.size() - 2);
  std::string value = r.output.substr(pos + 1);
  CHECK((value == "3\n" || value == "4\n" || value == "5\n" || value == "6\n"));
}

TEST_CASE("separate reports hypothesis violations with a replayable witness") {
  CmdResult r = run_cli("separate --max " + fx("e1min_as_max.wta") + " --min " +
                        fx("e1max_as_min.wta") + " --check 6");
  CHECK(r.code == 2);
  auto at = r.output.find("witness: ");
  REQUIRE(at != std::string::npos);
  std::string witness = r.output.substr(at + 9);
  witness = witness.substr(0, witness.find('\n'));
  CHECK(witness == "a(e())");

  // Replay: the claimed max automaton strictly exceeds the claimed min one.
  CmdResult vmax = run_cli("eval --automaton " + fx("e1min_as_max.wta") + " --term '" + witness + "'");
  CmdResult vmin = run_cli("eval --automaton " + fx("e1max_as_min.wta") + " --term '" + witness + "'");
  CHECK(tropa::parse_weight(first_line(vmax.output)) > tropa::parse_weight(first_line(vmin.output)));
}

TEST_CASE("separate materializes under a budget") {
  CmdResult r = run_cli("separate --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
                        " --materialize --budget 0");
  CHECK(r.code == 3);

  std::string out = std::string(std::tmpnam(nullptr)) + ".wta";
  r = run_cli("separate --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
              " --materialize --budget 100 --out " + out);
  CHECK(r.code == 0);
  CmdResult eval = run_cli("eval --automaton " + out + " --word aaaa");
  CHECK(first_line(eval.output) == "4");
  std::ifstream sidecar(out + ".states.json");
  CHECK(sidecar.good());
  std::remove(out.c_str());
  std::remove((out + ".states.json").c_str());
}

TEST_CASE("verify exit codes") {
  CmdResult r = run_cli("verify --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
                        " --height 4 --suite all");
  CHECK(r.code == 0);

  r = run_cli("verify --max " + fx("e1min_as_max.wta") + " --min " + fx("e1max_as_min.wta") +
              " --height 4");
  CHECK(r.code == 1);

  r = run_cli("verify --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
              " --height 0 --suite separation");
  CHECK(r.code == 0);
}

TEST_CASE("verify emits machine-readable reports") {
  CmdResult r = run_cli("verify --max " + fx("e1max.wta") + " --min " + fx("e2min.wta") +
                        " --height 4 --suite corollary --json");
  CHECK(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.output);
  REQUIRE(j.is_array());
  CHECK(j.at(0).at("verdict") == "pass");
}

TEST_CASE("reachprod output") {
  std::string bi = " --bi-of " + fx("e1max.wta") + " " + fx("e1min.wta");
  CmdResult r = run_cli("reachprod" + bi + " --term 'e()'");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "{q, r}");

  r = run_cli("reachprod" + bi + " --context '□'");
  CHECK(r.code == 0);
  CHECK(first_line(r.output) == "{q, r}");

  r = run_cli("reachprod" + bi + " --families");
  CHECK(r.code == 0);
  CHECK(r.output == "reachable: {q, r}\nproductive: {q, r}\n");

  // Empty set prints as {}.
  std::string no_finals = std::string(std::tmpnam(nullptr)) + ".wta";
  std::ofstream(no_finals) << "alphabet { e/0, a/1 }\nmode min\nstates r\ntrans e() -> r : 0\n"
                              "trans a(r) -> r : 2\n";
  r = run_cli("reachprod --bi-of " + fx("e1max.wta") + " " + no_finals + " --context '□'");
  CHECK(first_line(r.output) == "{q}");
  std::remove(no_finals.c_str());
}

TEST_CASE("usage errors exit with 64") {
  CHECK(run_cli("").code == 64);
  CHECK(run_cli("eval --automaton " + fx("e1max.wta")).code == 64);  // no term or word
  CHECK(run_cli("separate --max " + fx("e1max.wta") + " --min " + fx("e1min.wta")).code == 64);
  CHECK(run_cli("eval --automaton /nonexistent.wta --term 'e()'").code == 64);
  CHECK(run_cli("eval --automaton " + fx("e1max.wta") + " --term 'b(e())'").code == 64);
  CHECK(run_cli("verify --max " + fx("e1max.wta") + " --min " + fx("e1min.wta") +
                " --suite bogus").code == 64);
  // Word mode rejects non-word alphabets.
  CHECK(run_cli("eval --automaton " + fx("e3max.wta") + " --word aa").code == 64);
}
