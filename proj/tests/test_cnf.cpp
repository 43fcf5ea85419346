#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace cfgraph;
using oracle::nt;

namespace {

std::set<Word> without_epsilon(std::set<Word> s) {
  s.erase(Word{});
  return s;
}

}  // namespace

TEST_CASE("to_cnf leaves a CNF grammar unchanged", "[cnf]") {
  auto g = parse_grammar("start S\nS -> A B\nA -> a\nB -> b");
  auto r = to_cnf(g, nt("S"));
  CHECK(same_grammar(r.grammar, g));
  CHECK_FALSE(r.epsilon_dropped);
  CHECK_FALSE(r.empty_language);
}

TEST_CASE("to_cnf on a^n b^n preserves the language", "[cnf]") {
  auto g = oracle::load("anbn");
  auto r = to_cnf(g, nt("S"));
  REQUIRE(is_cnf(r.grammar));
  auto words = oracle::fixpoint_language(r.grammar, nt("S"), 6);
  CHECK(words == std::set<Word>{oracle::word(g, "a b"), oracle::word(g, "a a b b"),
                                oracle::word(g, "a a a b b b")});
}

TEST_CASE("to_cnf drops the only ε-production and flags it", "[cnf]") {
  auto r = to_cnf(parse_grammar("S -> eps"), nt("S"));
  CHECK(r.grammar.productions().empty());
  CHECK(r.epsilon_dropped);
  CHECK(r.empty_language);
}

TEST_CASE("to_cnf names fresh nonterminals with the reserved prefix", "[cnf]") {
  auto g = parse_grammar("S -> a S b c | d");
  auto r = to_cnf(g, nt("S"));
  REQUIRE(is_cnf(r.grammar));
  for (const auto& x : r.grammar.nonterminals()) {
    if (g.has_nonterminal(x)) continue;
    INFO(x.name);
    CHECK((x.name.rfind("_T_", 0) == 0 || x.name.rfind("_B_", 0) == 0));
  }
  CHECK(r.grammar.has_nonterminal(nt("_T_a")));
  CHECK(r.grammar.has_nonterminal(nt("_B_0")));
  // Output re-reads when internal names are allowed.
  auto again = parse_grammar(render(r.grammar), ParseOptions{.allow_internal_names = true});
  CHECK(same_grammar(again, r.grammar));
}

TEST_CASE("to_cnf handles unit cycles and nullable chains", "[cnf]") {
  auto g = parse_grammar("S -> A | a S\nA -> S | b | B B\nB -> eps | c");
  auto r = to_cnf(g, nt("S"));
  REQUIRE(is_cnf(r.grammar));
  CHECK(r.epsilon_dropped);
  CHECK(oracle::fixpoint_language(r.grammar, nt("S"), 5) ==
        without_epsilon(oracle::fixpoint_language(g, nt("S"), 5)));
}

TEST_CASE("to_cnf preserves every corpus language up to length 6", "[cnf][property]") {
  for (const auto& c : oracle::load_corpus()) {
    INFO(c.name);
    auto r = to_cnf(c.grammar, c.start);
    REQUIRE(is_cnf(r.grammar));
    auto original = enumerate_language(c.grammar, c.start, 6);
    auto converted = enumerate_language(r.grammar, c.start, 6);
    CHECK(r.epsilon_dropped == (original.count(Word{}) != 0));
    original.erase(Word{});
    CHECK(std::set<Word>(original.begin(), original.end()) ==
          std::set<Word>(converted.begin(), converted.end()));
    CHECK(oracle::fixpoint_language(r.grammar, c.start, 6) ==
          without_epsilon(oracle::fixpoint_language(c.grammar, c.start, 6)));
  }
}

TEST_CASE("to_cnf rejects a start that is not a nonterminal", "[cnf]") {
  CHECK_THROWS_AS(to_cnf(parse_grammar("S -> a"), nt("X")), GrammarError);
}
