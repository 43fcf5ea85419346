#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace cfgraph;
using oracle::nt;
using oracle::t;

TEST_CASE("parse_grammar reads rules, alternatives and start", "[grammar]") {
  auto g = parse_grammar("start S\nS -> a S b | a b");
  REQUIRE(g.nonterminals() == std::vector<Symbol>{nt("S")});
  REQUIRE(g.terminals() == std::vector<Symbol>{t("a"), t("b")});
  REQUIRE(g.productions().size() == 2);
  REQUIRE(g.start() == nt("S"));
  CHECK(g.production(0).rhs() == Word{t("a"), nt("S"), t("b")});
  CHECK(g.production(1).rhs() == Word{t("a"), t("b")});
  CHECK(g.production(1).id() == 1);
}

TEST_CASE("eps is the empty right-hand side", "[grammar]") {
  auto g = parse_grammar("A -> eps");
  REQUIRE(g.productions().size() == 1);
  CHECK(g.production(0).rhs().empty());
  CHECK(g.production(0).arity() == 0);
  CHECK_FALSE(g.start().has_value());
}

TEST_CASE("nonterminal status comes from lhs occurrence anywhere in the file", "[grammar]") {
  auto g = parse_grammar("S -> x T   # T is defined below\nT -> y\n\n# trailing comment\n");
  CHECK(g.production(0).rhs() == Word{t("x"), nt("T")});
  CHECK(g.terminals() == std::vector<Symbol>{t("x"), t("y")});
}

TEST_CASE("parse errors carry line numbers", "[grammar]") {
  auto line_of = [](const char* text) -> std::optional<std::size_t> {
    try {
      parse_grammar(text);
    } catch (const GrammarError& e) {
      return e.line();
    }
    return std::nullopt;
  };
  CHECK(line_of("S -> a\nS ->") == 2u);
  CHECK(line_of("S -> a |") == 1u);
  CHECK(line_of("S -> a | | b") == 1u);
  CHECK(line_of("start S\nstart S\nS -> a") == 2u);
  CHECK(line_of("S a b") == 1u);
  CHECK(line_of("S -> a eps") == 1u);
  CHECK(line_of("S -> _x") == 1u);
  CHECK(line_of("S -> a -> b") == 1u);
  CHECK(line_of("start T\nS -> a") == 1u);
  CHECK_THROWS_AS(parse_grammar("# nothing\n\n"), GrammarError);
}

TEST_CASE("internal names parse only when allowed", "[grammar]") {
  CHECK_THROWS_AS(parse_grammar("S -> _T_a"), GrammarError);
  auto g = parse_grammar("S -> _T_a\n_T_a -> a", ParseOptions{.allow_internal_names = true});
  CHECK(g.has_nonterminal(nt("_T_a")));
}

TEST_CASE("Symbol rejects reserved and blank names", "[grammar]") {
  CHECK_THROWS_AS(Symbol::terminal(""), GrammarError);
  CHECK_THROWS_AS(Symbol::terminal("eps"), GrammarError);
  CHECK_THROWS_AS(Symbol::nonterminal("->"), GrammarError);
  CHECK_THROWS_AS(Symbol::terminal("a b"), GrammarError);
  CHECK(Symbol::terminal("a") != Symbol::nonterminal("a"));
}

TEST_CASE("Grammar constructor enforces N ∩ Σ = ∅ and declared symbols", "[grammar]") {
  CHECK_THROWS_AS(Grammar({nt("S")}, {Symbol{"S", SymbolKind::terminal}}, {}), GrammarError);
  CHECK_THROWS_AS(Grammar({nt("S")}, {}, {Rule{nt("S"), {t("a")}}}), GrammarError);
  CHECK_THROWS_AS(Grammar({nt("S")}, {}, {Rule{nt("T"), {}}}), GrammarError);
  CHECK_THROWS_AS(Grammar({nt("S")}, {}, {}, nt("T")), GrammarError);
  Grammar empty({nt("A")}, {}, {});
  CHECK(empty.productions_for(nt("A")).empty());
}

TEST_CASE("decomposition reassembles to the rhs for every corpus production", "[grammar]") {
  for (const auto& c : oracle::load_corpus()) {
    for (const auto& p : c.grammar.productions()) {
      const auto& d = p.decomposition();
      INFO(c.name << ": " << to_string(p));
      CHECK(d.reassemble() == p.rhs());
      CHECK(d.runs.size() == d.arity() + 1);
      CHECK(d.arity() == static_cast<std::size_t>(std::count_if(
                             p.rhs().begin(), p.rhs().end(),
                             [](const Symbol& s) { return s.is_nonterminal(); })));
      for (const auto& run : d.runs) CHECK(is_terminal_word(run));
    }
  }
}

TEST_CASE("decomposition splits terminal runs around nonterminals", "[grammar]") {
  auto g = parse_grammar("S -> a A b B c C\nA -> a\nB -> b\nC -> c");
  const auto& d = g.production(0).decomposition();
  REQUIRE(d.arity() == 3);
  CHECK(d.runs == std::vector<Word>{{t("a")}, {t("b")}, {t("c")}, {}});
  auto h = parse_grammar("S -> A B\nA -> a\nB -> b");
  CHECK(h.production(0).decomposition().runs == std::vector<Word>{{}, {}, {}});
}

TEST_CASE("render round-trips through parse_grammar", "[grammar]") {
  for (const auto& c : oracle::load_corpus()) {
    INFO(c.name);
    auto again = parse_grammar(render(c.grammar));
    CHECK(same_grammar(again, c.grammar));
  }
  // Interleaved lhs lines collapse to one line per lhs.
  auto g = parse_grammar("S -> a\nT -> b\nS -> T | eps");
  CHECK(render(g) == "S -> a | T | eps\nT -> b\n");
  CHECK(same_grammar(parse_grammar(render(g)), g));
}

TEST_CASE("validate reports reachability, productivity and unused terminals", "[grammar]") {
  CHECK(validate(parse_grammar("start S\nS -> a S b | a b")).empty());
  CHECK(validate(parse_grammar("start S\nS -> a S")) ==
        std::vector<Diagnostic>{{DiagnosticKind::unproductive, nt("S")}});
  CHECK(validate(parse_grammar("start S\nS -> a\nT -> b")) ==
        std::vector<Diagnostic>{{DiagnosticKind::unreachable, nt("T")}});
  Grammar spare({nt("S")}, {t("a"), t("z")}, {Rule{nt("S"), {t("a")}}}, nt("S"));
  CHECK(validate(spare) == std::vector<Diagnostic>{{DiagnosticKind::unused_terminal, t("z")}});
  // No start: reachability is skipped.
  CHECK(validate(parse_grammar("S -> a\nT -> b")).empty());
}

TEST_CASE("is_cnf accepts only A -> B C and A -> x", "[grammar]") {
  CHECK(is_cnf(parse_grammar("S -> A B\nA -> a\nB -> b")));
  CHECK_FALSE(is_cnf(parse_grammar("S -> a S b")));
  CHECK_FALSE(is_cnf(parse_grammar("S -> eps")));
  CHECK_FALSE(is_cnf(parse_grammar("S -> A\nA -> a")));
  CHECK_FALSE(is_cnf(parse_grammar("S -> A B C\nA -> a\nB -> b\nC -> c")));
  CHECK_FALSE(is_cnf(parse_grammar("S -> a b")));
}

TEST_CASE("nullable and minimum yields", "[grammar]") {
  auto g = parse_grammar("S -> A B | a a a\nA -> eps | a\nB -> A A | b\nC -> C");
  CHECK(nullable_nonterminals(g) == std::vector<bool>{true, true, true, false});
  auto m = min_yield_lengths(g);
  CHECK(m[0] == 0u);
  CHECK(m[1] == 0u);
  CHECK(m[2] == 0u);
  CHECK_FALSE(m[3].has_value());
}

TEST_CASE("parse trees: yield, validity and leftmost derivation view", "[grammar]") {
  auto g = parse_grammar("start S\nS -> a S b | a b");
  ParseTree leaf{nt("S"), 1, {}};
  ParseTree nested{nt("S"), 0, {leaf}};
  CHECK(yield(g, nested) == Word{t("a"), t("a"), t("b"), t("b")});
  CHECK(is_valid_tree(g, nested));
  CHECK_FALSE(is_valid_tree(g, ParseTree{nt("S"), 0, {}}));
  CHECK(leftmost_derivation(nested) == std::vector<ProductionId>{0, 1});
  CHECK(tree_from_leftmost(g, nt("S"), {0, 1}) == nested);
  CHECK_THROWS_AS(tree_from_leftmost(g, nt("S"), {0}), GrammarError);
  CHECK(to_string(g, nested) == "[S -> a S b [S -> a b]]");
}
