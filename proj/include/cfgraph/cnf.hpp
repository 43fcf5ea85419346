#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cfgraph/grammar.hpp"

namespace cfgraph {

struct CnfResult {
  Grammar grammar;
  // ε belonged to L(g, start) and is not representable in CNF.
  bool epsilon_dropped = false;
  // start derives no non-empty word; grammar may be left without productions
  // for it.
  bool empty_language = false;
};

namespace detail {

using RuleSet = std::vector<Rule>;

inline void add_unique(RuleSet& rules, std::set<std::pair<Symbol, Word>>& seen,
                       const Symbol& lhs, const Word& rhs) {
  if (seen.emplace(lhs, rhs).second) rules.push_back({lhs, rhs});
}

// DEL: every production spawns the variants that drop any subset of its
// nullable occurrences; ε-productions themselves disappear.
inline RuleSet eliminate_epsilon(const Grammar& g) {
  const auto nullable = nullable_nonterminals(g);
  RuleSet out;
  std::set<std::pair<Symbol, Word>> seen;
  for (const auto& p : g.productions()) {
    std::vector<std::size_t> optional_at;
    for (std::size_t i = 0; i < p.rhs().size(); ++i) {
      const auto& s = p.rhs()[i];
      if (s.is_nonterminal() && nullable[g.nonterminal_index(s)]) optional_at.push_back(i);
    }
    const std::size_t variants = std::size_t{1} << optional_at.size();
    for (std::size_t mask = 0; mask < variants; ++mask) {
      Word rhs;
      std::size_t next_opt = 0;
      for (std::size_t i = 0; i < p.rhs().size(); ++i) {
        if (next_opt < optional_at.size() && optional_at[next_opt] == i) {
          bool drop = (mask >> next_opt) & 1u;
          ++next_opt;
          if (drop) continue;
        }
        rhs.push_back(p.rhs()[i]);
      }
      if (!rhs.empty()) add_unique(out, seen, p.lhs(), rhs);
    }
  }
  return out;
}

// UNIT: A -> B chains are replaced by A -> ω for every non-unit B -> ω with
// B in the unit closure of A.
inline RuleSet eliminate_units(const std::vector<Symbol>& nts, const RuleSet& rules) {
  auto is_unit = [](const Rule& r) {
    return r.rhs.size() == 1 && r.rhs[0].is_nonterminal();
  };
  std::map<Symbol, std::set<Symbol>> unit_edges;
  for (const auto& r : rules)
    if (is_unit(r)) unit_edges[r.lhs].insert(r.rhs[0]);

  RuleSet out;
  std::set<std::pair<Symbol, Word>> seen;
  for (const auto& a : nts) {
    std::set<Symbol> closure{a};
    std::vector<Symbol> stack{a};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (const auto& y : unit_edges[x])
        if (closure.insert(y).second) stack.push_back(y);
    }
    // Closure order follows the original rule order for determinism.
    for (const auto& r : rules) {
      if (!is_unit(r) && closure.count(r.lhs)) add_unique(out, seen, a, r.rhs);
    }
  }
  return out;
}

}  // namespace detail

// Pipeline DEL -> UNIT -> TERM -> BIN. Fresh nonterminals are `_T_<x>` for
// the wrapper of terminal x and `_B_<n>` for binarization links; the parser
// rejects `_`-prefixed user tokens, so these never collide.
inline CnfResult to_cnf(const Grammar& g, const Symbol& start) {
  if (!g.has_nonterminal(start))
    throw GrammarError("start '" + start.name + "' is not a nonterminal");

  const bool eps = is_nullable(g, start);
  auto rules = detail::eliminate_units(g.nonterminals(), detail::eliminate_epsilon(g));

  std::vector<Symbol> nts = g.nonterminals();
  std::vector<Rule> out;
  std::set<std::pair<Symbol, Word>> seen;

  // TERM
  std::map<Symbol, Symbol> wrapper;
  std::vector<Rule> wrapper_rules;
  auto wrap = [&](const Symbol& x) {
    auto it = wrapper.find(x);
    if (it != wrapper.end()) return it->second;
    Symbol w{"_T_" + x.name, SymbolKind::nonterminal};
    nts.push_back(w);
    wrapper_rules.push_back({w, {x}});
    wrapper.emplace(x, w);
    return w;
  };
  for (auto& r : rules) {
    if (r.rhs.size() < 2) continue;
    for (auto& s : r.rhs)
      if (s.is_terminal()) s = wrap(s);
  }

  // BIN
  std::size_t fresh = 0;
  for (const auto& r : rules) {
    if (r.rhs.size() <= 2) {
      detail::add_unique(out, seen, r.lhs, r.rhs);
      continue;
    }
    Symbol lhs = r.lhs;
    for (std::size_t i = 0; i + 2 < r.rhs.size(); ++i) {
      Symbol link{"_B_" + std::to_string(fresh++), SymbolKind::nonterminal};
      nts.push_back(link);
      detail::add_unique(out, seen, lhs, {r.rhs[i], link});
      lhs = link;
    }
    detail::add_unique(out, seen, lhs, {r.rhs[r.rhs.size() - 2], r.rhs.back()});
  }
  for (const auto& r : wrapper_rules) detail::add_unique(out, seen, r.lhs, r.rhs);

  Grammar cnf(std::move(nts), g.terminals(), std::move(out), start);
  const bool empty = !min_yield_lengths(cnf)[cnf.nonterminal_index(start)];
  return CnfResult{std::move(cnf), eps, empty};
}

}  // namespace cfgraph
