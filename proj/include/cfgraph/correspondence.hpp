#pragma once

// Both directions between derivations and proper walks, independent
// membership oracles, and the exhaustive checking harness that ties them
// together.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfgraph/cnf.hpp"
#include "cfgraph/diagram.hpp"
#include "cfgraph/enumerate.hpp"
#include "cfgraph/grammar.hpp"
#include "cfgraph/walks.hpp"

namespace cfgraph {

// Node for production A -> α0 B1 ... Bk αk becomes
// entry · walk(child1) · bridge1 · ... · walk(childk) · exit, all arcs taken
// from that production's own fragment.
inline Walk derivation_to_walk(const Diagram& d, const ParseTree& tree) {
  try {
    check_tree(d.grammar(), tree);
  } catch (const GrammarError& e) {
    throw PreconditionError(std::string("not a parse tree of the diagram's grammar: ") + e.what());
  }
  Walk w;
  std::function<void(const ParseTree&)> emit = [&](const ParseTree& t) {
    auto frag = d.production_arcs(t.production);
    w.arcs.push_back(frag[0]);  // leaf or entry
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      emit(t.children[i]);
      w.arcs.push_back(frag[i + 1]);  // bridge i, or the exit after the last child
    }
  };
  emit(tree);
  return w;
}

// Reads the properness witness: each leaf arc and each entry arc names the
// production applied at that node. Separators and exits may come from other
// productions; label cancellation already forces them to agree.
inline ParseTree walk_to_derivation(const Diagram& d, const Walk& w) {
  auto check = is_proper(d, w);
  if (!check) throw PreconditionError("walk is not proper: " + check.reason);
  const Grammar& g = d.grammar();
  std::function<ParseTree(const WalkStructure&)> build = [&](const WalkStructure& s) {
    const auto& p = g.production(d.arc(s.entry).provenance.production);
    ParseTree t{p.lhs(), p.id(), {}};
    for (const auto& c : s.children) t.children.push_back(build(c));
    if (t.children.size() != p.arity())
      throw Error("proper walk node has " + std::to_string(t.children.size()) +
                  " children for '" + to_string(p) + "'");
    return t;
  };
  ParseTree tree = build(*check.witness);
  check_tree(g, tree);
  return tree;
}

enum class Method { walks, cyk, enumeration };
enum class Membership { member, non_member, inconclusive };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::walks: return "walks";
    case Method::cyk: return "cyk";
    case Method::enumeration: return "enum";
  }
  return "?";
}

inline const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "yes";
    case Membership::non_member: return "no";
    case Membership::inconclusive: return "inconclusive";
  }
  return "?";
}

struct MembershipVerdict {
  Word word;
  Membership member = Membership::inconclusive;
  Method method = Method::walks;
  std::variant<std::monostate, Walk, ParseTree> witness;
  // Grammar a ParseTree witness refers to (the CNF grammar for CYK).
  std::shared_ptr<const Grammar> tree_grammar;
  std::size_t cost = 0;
  std::string note;
};

// CYK over a CNF grammar, with back-pointers for a witness tree.
class CykRecognizer {
 public:
  explicit CykRecognizer(Grammar cnf) : g_(std::make_shared<const Grammar>(std::move(cnf))) {
    if (!is_cnf(*g_)) throw PreconditionError("CYK requires a grammar in Chomsky normal form");
    for (const auto& p : g_->productions()) {
      const auto lhs = g_->nonterminal_index(p.lhs());
      if (p.rhs().size() == 1) {
        by_terminal_[p.rhs()[0].name].push_back({lhs, p.id()});
      } else {
        binary_.push_back({lhs, g_->nonterminal_index(p.rhs()[0]),
                           g_->nonterminal_index(p.rhs()[1]), p.id()});
      }
    }
  }

  const Grammar& grammar() const noexcept { return *g_; }

  MembershipVerdict recognize(const Symbol& a, const Word& target) const {
    MembershipVerdict v;
    v.word = target;
    v.method = Method::cyk;
    v.tree_grammar = g_;
    const auto goal = g_->nonterminal_index(a);
    const std::size_t n = target.size();
    if (n == 0)
      throw PreconditionError("ε is not representable in Chomsky normal form");

    const std::size_t nts = g_->nonterminals().size();
    // cell(i, len)[X] = back-pointer for X =>* target[i, i+len)
    std::vector<std::vector<std::optional<Back>>> table(n * n,
                                                        std::vector<std::optional<Back>>(nts));
    auto cell = [&](std::size_t i, std::size_t len) -> auto& { return table[i * n + (len - 1)]; };

    for (std::size_t i = 0; i < n; ++i) {
      auto it = by_terminal_.find(target[i].name);
      if (it == by_terminal_.end() || !target[i].is_terminal()) continue;
      for (const auto& [lhs, prod] : it->second) {
        ++v.cost;
        if (!cell(i, 1)[lhs]) cell(i, 1)[lhs] = Back{prod, 0};
      }
    }
    for (std::size_t len = 2; len <= n; ++len) {
      for (std::size_t i = 0; i + len <= n; ++i) {
        for (std::size_t split = 1; split < len; ++split) {
          const auto& left = cell(i, split);
          const auto& right = cell(i + split, len - split);
          for (const auto& r : binary_) {
            ++v.cost;
            if (left[r.left] && right[r.right] && !cell(i, len)[r.lhs])
              cell(i, len)[r.lhs] = Back{r.production, split};
          }
        }
      }
    }

    if (!cell(0, n)[goal]) {
      v.member = Membership::non_member;
      return v;
    }
    std::function<ParseTree(std::size_t, std::size_t, std::size_t)> rebuild =
        [&](std::size_t x, std::size_t i, std::size_t len) {
          const Back& b = *cell(i, len)[x];
          const auto& p = g_->production(b.production);
          ParseTree t{p.lhs(), p.id(), {}};
          if (p.rhs().size() == 2) {
            t.children.push_back(rebuild(g_->nonterminal_index(p.rhs()[0]), i, b.split));
            t.children.push_back(
                rebuild(g_->nonterminal_index(p.rhs()[1]), i + b.split, len - b.split));
          }
          return t;
        };
    v.member = Membership::member;
    v.witness = rebuild(goal, 0, n);
    return v;
  }

 private:
  struct Back {
    ProductionId production;
    std::size_t split;
  };
  struct Binary {
    std::size_t lhs, left, right;
    ProductionId production;
  };

  std::shared_ptr<const Grammar> g_;
  std::map<std::string, std::vector<std::pair<std::size_t, ProductionId>>> by_terminal_;
  std::vector<Binary> binary_;
};

inline MembershipVerdict cyk_membership(const Grammar& g_cnf, const Symbol& a, const Word& target) {
  return CykRecognizer(g_cnf).recognize(a, target);
}

// Answers membership queries for one (grammar, start) pair with any method,
// caching the per-method setup (diagram, CNF conversion, enumerated
// language) across queries.
class MembershipOracle {
 public:
  MembershipOracle(const Grammar& g, Symbol start, std::size_t budget = kDefaultBudget)
      : g_(g), diagram_(g), start_(std::move(start)), budget_(budget) {
    if (!g_.has_nonterminal(start_))
      throw GrammarError("unknown nonterminal '" + start_.name + "'");
  }

  const Diagram& diagram() const noexcept { return diagram_; }

  MembershipVerdict query(const Word& target, Method method) {
    for (const auto& s : target)
      if (!g_.has_terminal(s))
        throw PreconditionError("'" + s.name + "' is not a terminal of the grammar");
    switch (method) {
      case Method::walks: return by_walks(target);
      case Method::cyk: return by_cyk(target);
      case Method::enumeration: return by_enumeration(target);
    }
    return {};
  }

 private:
  MembershipVerdict by_walks(const Word& target) const {
    MembershipVerdict v{target, Membership::inconclusive, Method::walks, {}, {}, 0, {}};
    auto r = find_proper_walk(diagram_, start_, target, budget_);
    v.cost = r.expansions;
    switch (r.status) {
      case SearchStatus::found:
        v.member = Membership::member;
        v.witness = *r.walk;
        break;
      case SearchStatus::not_found:
        v.member = Membership::non_member;
        break;
      case SearchStatus::budget_exceeded:
        v.note = "search budget of " + std::to_string(budget_) + " expansions exhausted";
        break;
    }
    return v;
  }

  MembershipVerdict by_cyk(const Word& target) {
    if (target.empty()) {
      MembershipVerdict v{target, Membership::non_member, Method::cyk, {}, {}, 0,
                          "ε handled via nullable-set (not representable in CNF)"};
      if (is_nullable(g_, start_)) {
        v.member = Membership::member;
        if (auto t = find_derivation(g_, start_, target, budget_)) {
          v.witness = *t;
          v.tree_grammar = std::make_shared<const Grammar>(g_);
        }
      }
      return v;
    }
    if (!cyk_) cyk_.emplace(to_cnf(g_, start_).grammar);
    auto v = cyk_->recognize(start_, target);
    v.note = "witness tree is over the CNF grammar";
    return v;
  }

  MembershipVerdict by_enumeration(const Word& target) {
    MembershipVerdict v{target, Membership::inconclusive, Method::enumeration, {}, {}, 0, {}};
    try {
      if (!language_ || language_length_ < target.size()) {
        language_ = enumerate_language(g_, start_, target.size(), budget_);
        language_length_ = target.size();
      }
      v.cost = language_->size();
      if (!language_->count(target)) {
        v.member = Membership::non_member;
        return v;
      }
      v.member = Membership::member;
      if (auto t = find_derivation(g_, start_, target, budget_)) {
        v.witness = *t;
        v.tree_grammar = std::make_shared<const Grammar>(g_);
      }
    } catch (const BudgetExceeded& e) {
      v.member = Membership::inconclusive;
      v.note = e.what();
    }
    return v;
  }

  Grammar g_;
  Diagram diagram_;
  Symbol start_;
  std::size_t budget_;
  std::optional<CykRecognizer> cyk_;
  std::optional<Language> language_;
  std::size_t language_length_ = 0;
};

inline MembershipVerdict membership(const Grammar& g, const Symbol& a, const Word& target,
                                    Method method, std::size_t budget = kDefaultBudget) {
  return MembershipOracle(g, a, budget).query(target, method);
}

// ---------------------------------------------------------------------------
// Exhaustive harness

struct ReportRow {
  Word word;
  bool in_language = false;         // by derivation enumeration
  std::optional<bool> walk_found;   // nullopt: search inconclusive
  bool agree = false;
};

struct VerificationReport {
  std::string grammar;
  Symbol start;
  std::size_t max_len = 0;
  std::vector<ReportRow> rows;
  std::vector<std::string> discrepancies;
  std::vector<std::string> notes;
  std::size_t trees_checked = 0;
  std::size_t walks_checked = 0;
  bool structural_checks_complete = true;

  std::size_t in_language() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.in_language;
    return n;
  }
  std::size_t agreements() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.agree;
    return n;
  }
  std::size_t inconclusive() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += !r.walk_found.has_value();
    return n;
  }
  bool clean() const { return discrepancies.empty(); }
  bool complete() const { return inconclusive() == 0 && structural_checks_complete; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["grammar"] = grammar;
    j["start"] = start.name;
    j["max_len"] = max_len;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json row;
      std::string word;
      for (const auto& s : r.word) word += (word.empty() ? "" : " ") + s.name;
      row["word"] = word;
      row["enum"] = r.in_language;
      row["walk"] = r.walk_found ? nlohmann::ordered_json(*r.walk_found) : nlohmann::ordered_json(nullptr);
      row["agree"] = r.agree;
      j["rows"].push_back(std::move(row));
    }
    j["discrepancies"] = discrepancies;
    j["notes"] = notes;
    nlohmann::ordered_json s;
    s["checked"] = rows.size();
    s["in_language"] = in_language();
    s["agreements"] = agreements();
    s["inconclusive"] = inconclusive();
    s["trees_checked"] = trees_checked;
    s["walks_checked"] = walks_checked;
    s["complete"] = complete();
    j["summary"] = std::move(s);
    return j;
  }
};

struct VerifyOptions {
  std::string grammar_name;
  // Depth bound for tree and walk enumeration; defaults to
  // completeness_depth(g, max_len), which loses no word.
  std::optional<std::size_t> max_depth;
  std::size_t budget = kDefaultBudget;
};

// All words over the grammar's terminals up to max_len, shortest first.
inline std::vector<Word> all_words(const Grammar& g, std::size_t max_len) {
  std::vector<Symbol> sigma = g.terminals();
  std::sort(sigma.begin(), sigma.end());
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& x : sigma) {
        Word w = out[i];
        w.push_back(x);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

// For every α over Σ with |α| <= max_len, compares membership by derivation
// enumeration with existence of a proper walk u_A -> v_A labelled (α, ε).
// Also runs both constructions: every enumerated parse tree must map to a
// proper walk labelled (yield, ε), and every enumerated proper walk must map
// back to a tree with the walk's word as yield.
inline VerificationReport verify_walk_correspondence(const Grammar& g, const Symbol& a,
                                                     std::size_t max_len,
                                                     VerifyOptions options = {}) {
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  VerificationReport report;
  report.grammar = options.grammar_name;
  report.start = a;
  report.max_len = max_len;

  const Diagram d(g);
  const std::size_t depth = options.max_depth.value_or(completeness_depth(g, max_len));
  const Language language = enumerate_language(g, a, max_len, options.budget);

  std::optional<std::vector<ProperWalk>> walks;
  try {
    walks = enumerate_proper_walks(d, a, max_len, depth, options.budget);
  } catch (const BudgetExceeded& e) {
    report.notes.push_back(std::string("proper-walk enumeration incomplete, fell back to per-word search: ") +
                           e.what());
    report.structural_checks_complete = false;
  }
  std::set<Word> walk_words;
  if (walks)
    for (const auto& pw : *walks) walk_words.insert(pw.word);

  for (auto& word : all_words(g, max_len)) {
    ReportRow row;
    row.word = std::move(word);
    row.in_language = language.count(row.word) != 0;
    if (walks) {
      row.walk_found = walk_words.count(row.word) != 0;
    } else {
      auto r = find_proper_walk(d, a, row.word, options.budget);
      if (r.status != SearchStatus::budget_exceeded) row.walk_found = r.status == SearchStatus::found;
    }
    row.agree = row.walk_found && *row.walk_found == row.in_language;
    if (row.walk_found && !row.agree) {
      report.discrepancies.push_back("word '" + to_string(row.word) + "': enumeration says " +
                                     (row.in_language ? "member" : "non-member") +
                                     ", proper walk " + (*row.walk_found ? "found" : "absent"));
    }
    report.rows.push_back(std::move(row));
  }

  try {
    for (const auto& tree : enumerate_parse_trees(g, a, max_len, {depth, options.budget})) {
      ++report.trees_checked;
      const Word y = yield(g, tree);
      const Walk w = derivation_to_walk(d, tree);
      if (!is_proper(d, w)) {
        report.discrepancies.push_back("tree " + to_string(g, tree) + " maps to an improper walk");
      } else if (!(walk_label(d, w) == Label(y, TWord()))) {
        report.discrepancies.push_back("tree " + to_string(g, tree) + " maps to walk labelled " +
                                       to_string(walk_label(d, w)));
      }
    }
  } catch (const BudgetExceeded& e) {
    report.notes.push_back(std::string("parse-tree checks incomplete: ") + e.what());
    report.structural_checks_complete = false;
  }

  if (walks) {
    for (const auto& pw : *walks) {
      ++report.walks_checked;
      const Label l = walk_label(d, pw.walk);
      if (!is_neutral_tail(l))
        report.discrepancies.push_back("walk " + to_string(pw.walk) + " has label " + to_string(l));
      const ParseTree t = walk_to_derivation(d, pw.walk);
      if (yield(g, t) != pw.word)
        report.discrepancies.push_back("walk " + to_string(pw.walk) + " maps to tree with yield " +
                                       to_string(yield(g, t)));
      if (!(walk_label(d, derivation_to_walk(d, t)) == l))
        report.discrepancies.push_back("walk " + to_string(pw.walk) +
                                       " does not round-trip through its derivation");
    }
  }
  return report;
}

}  // namespace cfgraph
