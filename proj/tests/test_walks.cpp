#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace cfgraph;
using oracle::nt;
using oracle::t;

namespace {

// anbn: arc 0 entry (a, b), arc 1 exit (b, b'), arc 2 leaf (a b, ε).
constexpr ArcId kEntry = 0, kExit = 1, kLeaf = 2;

Diagram g1() { return Diagram(oracle::load("anbn")); }

std::vector<ArcId> random_continuous_walk(const Diagram& d, std::mt19937& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> pick_arc(0, d.arcs().size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::vector<ArcId> w{pick_arc(rng)};
  const std::size_t target = len(rng);
  while (w.size() < target) {
    auto next = d.out_arcs(d.arc(w.back()).target);
    if (next.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
    w.push_back(next[pick(rng)]);
  }
  return w;
}

}  // namespace

TEST_CASE("walk_label folds arc labels", "[walks]") {
  auto d = g1();
  const auto a = t("a"), b = t("b");
  CHECK(walk_label(d, Walk{{kEntry, kLeaf, kExit}}) == Label({a, a, b, b}, TWord()));
  CHECK(walk_label(d, Walk{{kLeaf}}) == Label({a, b}, TWord()));
  CHECK(walk_label(d, Walk{{kEntry, kLeaf}}) == Label({a, a, b}, TWord::of({b})));
  CHECK_THROWS_AS(walk_label(d, Walk{{kLeaf, kEntry}}), WalkError);
  CHECK_THROWS_AS(walk_label(d, Walk{}), WalkError);
  CHECK_THROWS_AS(walk_label(d, Walk{{7}}), WalkError);
}

TEST_CASE("decompose parses the bracket structure", "[walks]") {
  auto d = g1();
  auto node = decompose(d, Walk{{kEntry, kLeaf, kExit}});
  REQUIRE(std::holds_alternative<WalkStructure>(node));
  const auto& s = std::get<WalkStructure>(node);
  CHECK(s == WalkStructure{kEntry, {WalkStructure::leaf(kLeaf)}, {}, kExit});
  CHECK(to_sexpr(s) == "(node ρ=0 (leaf 2) τ=1)");
  CHECK(s.flatten() == Walk{{kEntry, kLeaf, kExit}});
  CHECK(s.depth() == 2);

  auto leaf = decompose(d, Walk{{kLeaf}});
  REQUIRE(std::holds_alternative<WalkStructure>(leaf));
  CHECK(std::get<WalkStructure>(leaf).is_leaf());

  auto open = decompose(d, Walk{{kEntry, kLeaf}});
  REQUIRE(std::holds_alternative<StructuralFailure>(open));
  CHECK(std::get<StructuralFailure>(open).reason.find("unclosed") != std::string::npos);

  CHECK(std::holds_alternative<StructuralFailure>(decompose(d, Walk{{kEntry, kEntry, kLeaf, kExit}})));
}

TEST_CASE("decompose rejects a close arc into a different nonterminal", "[walks]") {
  // arcs: 0 u_A->u_B, 1 v_B->v_A, 2 leaf y, 3 u_C->u_B, 4 v_B->v_C, 5 leaf b
  Diagram d(parse_grammar("A -> B x | y\nC -> B z\nB -> b"));
  REQUIRE(d.arc(4).target == Vertex{Side::v, nt("C")});
  auto r = decompose(d, Walk{{0, 5, 4}});
  REQUIRE(std::holds_alternative<StructuralFailure>(r));
  CHECK(std::get<StructuralFailure>(r).position == 2);
  CHECK_FALSE(is_proper(d, Walk{{0, 5, 4}}));
  CHECK(is_proper(d, Walk{{0, 5, 1}}));
}

TEST_CASE("is_proper examples", "[walks]") {
  auto d = g1();
  CHECK(is_proper(d, Walk{{kLeaf}}));
  auto ok = is_proper(d, Walk{{kEntry, kLeaf, kExit}});
  CHECK(ok);
  REQUIRE(ok.witness.has_value());
  CHECK(ok.witness->children.size() == 1);
  CHECK_FALSE(is_proper(d, Walk{{kEntry, kEntry, kLeaf, kExit}}));

  // Leaf u_A->v_A then a separator out of v_A at depth 0.
  Diagram cnf(parse_grammar("S -> A B\nA -> a\nB -> b"));
  // arcs: 0 u_S->u_A, 1 v_A->u_B, 2 v_B->v_S, 3 leaf A, 4 leaf B
  auto r = is_proper(cnf, Walk{{3, 1}});
  CHECK_FALSE(r);
  CHECK(r.reason.find("separator") != std::string::npos);
  CHECK(is_proper(cnf, Walk{{0, 3, 1, 4, 2}}));
}

TEST_CASE("is_proper checks the tail of every node", "[walks]") {
  // arcs: 0 entry (a, b), 1 exit (b, b'), 2 entry (a, c), 3 exit (c, c'), 4 leaf x
  Diagram d(parse_grammar("S -> a S b | a S c | x"));
  auto bad = is_proper(d, Walk{{0, 4, 3}});
  CHECK_FALSE(bad);
  CHECK(bad.reason.find("non-ε tail") != std::string::npos);
  CHECK(is_proper(d, Walk{{2, 4, 3}}));
}

TEST_CASE("proper walks may mix arcs of different productions", "[walks]") {
  // arcs: 0 entry (a, b), 1 exit (b, b'), 2 entry (c, b), 3 exit (b, b'), 4 leaf x
  Diagram d(parse_grammar("S -> a S b | c S b | x"));
  auto mixed = Walk{{0, 4, 3}};
  REQUIRE(d.arc(3).provenance.production == 1);
  CHECK(is_proper(d, mixed));
  CHECK(walk_label(d, mixed) == Label({t("a"), t("x"), t("b")}, TWord()));
}

TEST_CASE("enumerate_proper_walks examples", "[walks]") {
  auto d = g1();
  auto walks = enumerate_proper_walks(d, nt("S"), 6, 4);
  std::set<Word> words;
  for (const auto& w : walks) words.insert(w.word);
  CHECK(walks.size() == 3);
  CHECK(words == std::set<Word>{oracle::word(d.grammar(), "a b"), oracle::word(d.grammar(), "a a b b"),
                                oracle::word(d.grammar(), "a a a b b b")});
  CHECK(enumerate_proper_walks(d, nt("S"), 1, 4).empty());
  CHECK(enumerate_proper_walks(Diagram(Grammar({nt("A")}, {}, {})), nt("A"), 6, 4).empty());
  CHECK_THROWS_AS(enumerate_proper_walks(d, nt("S"), 6, 4, 2), BudgetExceeded);
}

TEST_CASE("enumerated proper walks are proper, distinct and cover the language", "[walks][property]") {
  for (const auto& c : oracle::load_corpus()) {
    INFO(c.name);
    const Diagram d(c.grammar);
    const std::size_t n = 5;
    auto walks = enumerate_proper_walks(d, c.start, n, completeness_depth(c.grammar, n));
    std::set<Word> words;
    std::set<std::vector<ArcId>> distinct;
    for (const auto& pw : walks) {
      CHECK(is_proper(d, pw.walk));
      CHECK(walk_label(d, pw.walk) == Label(pw.word, TWord()));
      CHECK(pw.word.size() <= n);
      CHECK(d.arc(pw.walk.arcs.front()).source == Vertex{Side::u, c.start});
      CHECK(d.arc(pw.walk.arcs.back()).target == Vertex{Side::v, c.start});
      words.insert(pw.word);
      distinct.insert(pw.walk.arcs);
    }
    CHECK(distinct.size() == walks.size());
    CHECK(words == oracle::fixpoint_language(c.grammar, c.start, n));
  }
}

TEST_CASE("find_proper_walk examples", "[walks]") {
  auto d = g1();
  const auto& g = d.grammar();
  auto found = find_proper_walk(d, nt("S"), oracle::word(g, "a a b b"), 10'000);
  CHECK(found.status == SearchStatus::found);
  REQUIRE(found.walk.has_value());
  CHECK(*found.walk == Walk{{kEntry, kLeaf, kExit}});
  CHECK(find_proper_walk(d, nt("S"), oracle::word(g, "a a b"), 10'000).status == SearchStatus::not_found);
  CHECK(find_proper_walk(d, nt("S"), {}, 10'000).status == SearchStatus::not_found);
  CHECK(find_proper_walk(d, nt("S"), oracle::word(g, "a a a b b b"), 2).status ==
        SearchStatus::budget_exceeded);
  CHECK_THROWS_AS(find_proper_walk(d, nt("S"), {nt("S")}), PreconditionError);
  CHECK_THROWS_AS(find_proper_walk(d, nt("T"), {}), GrammarError);
  CHECK(std::string(to_string(SearchStatus::not_found)) == "not-found");
}

TEST_CASE("find_proper_walk decides membership on the corpus", "[walks][property]") {
  for (const auto& c : oracle::load_corpus()) {
    INFO(c.name);
    const Diagram d(c.grammar);
    const auto language = oracle::fixpoint_language(c.grammar, c.start, 5);
    for (const auto& w : all_words(c.grammar, 5)) {
      INFO(to_string(w));
      auto r = find_proper_walk(d, c.start, w);
      REQUIRE(r.status != SearchStatus::budget_exceeded);
      CHECK((r.status == SearchStatus::found) == (language.count(w) != 0));
      if (r.walk) {
        CHECK(is_proper(d, *r.walk));
        CHECK(walk_label(d, *r.walk) == Label(w, TWord()));
      }
    }
  }
}

TEST_CASE("walk labels are a homomorphism over splits", "[walks][property]") {
  std::mt19937 rng(99);
  const auto corpus = oracle::load_corpus();
  std::vector<Diagram> diagrams;
  for (const auto& c : corpus) diagrams.emplace_back(c.grammar);
  for (int i = 0; i < 10'000; ++i) {
    const Diagram& d = diagrams[static_cast<std::size_t>(i) % diagrams.size()];
    auto w = random_continuous_walk(d, rng, 16);
    if (w.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> cut(1, w.size() - 1);
    const std::size_t k = cut(rng);
    std::span<const ArcId> all(w);
    REQUIRE(walk_label(d, all) == compose(walk_label(d, all.first(k)), walk_label(d, all.subspan(k))));
  }
}
