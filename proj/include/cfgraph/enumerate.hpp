#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cfgraph/grammar.hpp"

namespace cfgraph {

inline constexpr std::size_t kDefaultBudget = 1'000'000;

// Shorter words first, then lexicographic by token.
struct ShortLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

using Language = std::set<Word, ShortLex>;

// Depth a minimal derivation tree of a word of length <= max_len can need:
// along any root-to-leaf path the spans are nested, there are at most
// max_len + 1 distinct ones, and a minimal tree never repeats a
// (nonterminal, span) pair on a path.
inline std::size_t completeness_depth(const Grammar& g, std::size_t max_len) {
  return std::max<std::size_t>(1, g.nonterminals().size() * (max_len + 1));
}

namespace detail {

// Sentential forms are encoded as ints: nonterminal i -> i, terminal j -> -(j+1).
struct FormHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = v.size();
    for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x + 0x9e37);
    return h;
  }
};

class FormSpace {
 public:
  explicit FormSpace(const Grammar& g) : g_(g), min_yield_(min_yield_lengths(g)) {
    for (std::size_t j = 0; j < g.terminals().size(); ++j)
      t_index_.emplace(g.terminals()[j].name, j);
    for (const auto& p : g.productions()) {
      std::vector<int> rhs;
      for (const auto& s : p.rhs()) rhs.push_back(encode(s));
      rhs_.push_back(std::move(rhs));
    }
  }

  int encode(const Symbol& s) const {
    if (s.is_nonterminal()) return static_cast<int>(g_.nonterminal_index(s));
    return -static_cast<int>(t_index_.at(s.name)) - 1;
  }
  Symbol decode(int c) const {
    return c >= 0 ? g_.nonterminals()[static_cast<std::size_t>(c)]
                  : g_.terminals()[static_cast<std::size_t>(-c - 1)];
  }

  // Lower bound on the length of any terminal word derivable from the form;
  // nullopt if some nonterminal in it is unproductive.
  std::optional<std::size_t> weight(const std::vector<int>& form) const {
    std::size_t w = 0;
    for (int c : form) {
      if (c < 0) {
        ++w;
      } else {
        const auto& m = min_yield_[static_cast<std::size_t>(c)];
        if (!m) return std::nullopt;
        w += *m;
      }
    }
    return w;
  }

  const std::vector<int>& rhs(ProductionId id) const { return rhs_[id]; }
  const Grammar& grammar() const { return g_; }

 private:
  const Grammar& g_;
  std::vector<std::optional<std::size_t>> min_yield_;
  std::unordered_map<std::string, std::size_t> t_index_;
  std::vector<std::vector<int>> rhs_;
};

struct FormStep {
  std::vector<int> parent;
  ProductionId production;
};

// Breadth-first search over leftmost sentential forms reachable from `start`.
// `keep` filters forms (beyond the sound length bounds applied here). Calls
// `on_word` for each terminal form reached; stops early if it returns false.
template <typename Keep, typename OnWord>
void leftmost_search(const FormSpace& fs, const Symbol& start, std::size_t max_len,
                     std::size_t budget, Keep keep, OnWord on_word,
                     std::unordered_map<std::vector<int>, FormStep, FormHash>* parents) {
  const Grammar& g = fs.grammar();
  const std::size_t length_cap =
      max_len + 1 + completeness_depth(g, max_len) * std::max<std::size_t>(1, g.max_rhs_length());

  std::unordered_map<std::vector<int>, bool, FormHash> seen;
  std::deque<std::vector<int>> frontier;
  std::vector<int> root{fs.encode(start)};
  if (!fs.weight(root) || *fs.weight(root) > max_len) return;
  seen.emplace(root, true);
  frontier.push_back(root);

  while (!frontier.empty()) {
    std::vector<int> form = std::move(frontier.front());
    frontier.pop_front();
    auto lead = std::find_if(form.begin(), form.end(), [](int c) { return c >= 0; });
    if (lead == form.end()) {
      if (!on_word(form)) return;
      continue;
    }
    const auto pos = static_cast<std::size_t>(lead - form.begin());
    const Symbol a = fs.decode(*lead);
    for (ProductionId id : g.productions_for(a)) {
      const auto& rhs = fs.rhs(id);
      std::vector<int> next;
      next.reserve(form.size() + rhs.size());
      next.insert(next.end(), form.begin(), form.begin() + static_cast<std::ptrdiff_t>(pos));
      next.insert(next.end(), rhs.begin(), rhs.end());
      next.insert(next.end(), form.begin() + static_cast<std::ptrdiff_t>(pos) + 1, form.end());
      if (next.size() > length_cap) continue;
      auto w = fs.weight(next);
      if (!w || *w > max_len) continue;
      if (!keep(next)) continue;
      if (!seen.emplace(next, true).second) continue;
      if (seen.size() > budget)
        throw BudgetExceeded("sentential-form frontier exceeded " +
                             std::to_string(budget) + " forms");
      if (parents) parents->emplace(next, FormStep{form, id});
      frontier.push_back(std::move(next));
    }
  }
}

}  // namespace detail

// {α ∈ L(g, a) : |α| <= max_len}, by exhaustive leftmost derivation.
inline Language enumerate_language(const Grammar& g, const Symbol& a, std::size_t max_len,
                                   std::size_t budget = kDefaultBudget) {
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  detail::FormSpace fs(g);
  Language out;
  detail::leftmost_search(
      fs, a, max_len, budget, [](const std::vector<int>&) { return true; },
      [&](const std::vector<int>& form) {
        Word w;
        for (int c : form) w.push_back(fs.decode(c));
        out.insert(std::move(w));
        return true;
      },
      nullptr);
  return out;
}

// A shortest leftmost derivation of `target` from `a`, as a tree.
inline std::optional<ParseTree> find_derivation(const Grammar& g, const Symbol& a,
                                                const Word& target,
                                                std::size_t budget = kDefaultBudget) {
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  detail::FormSpace fs(g);
  std::vector<int> goal;
  for (const auto& s : target) {
    if (!g.has_terminal(s)) return std::nullopt;
    goal.push_back(fs.encode(s));
  }
  auto prefix_ok = [&](const std::vector<int>& form) {
    for (std::size_t i = 0; i < form.size(); ++i) {
      if (form[i] >= 0) return true;
      if (i >= goal.size() || form[i] != goal[i]) return false;
    }
    return form.size() == goal.size();
  };
  std::unordered_map<std::vector<int>, detail::FormStep, detail::FormHash> parents;
  std::optional<std::vector<int>> hit;
  const std::vector<int> root{fs.encode(a)};
  detail::leftmost_search(
      fs, a, goal.size(), budget, prefix_ok,
      [&](const std::vector<int>& form) {
        if (form != goal) return true;
        hit = form;
        return false;
      },
      &parents);
  if (!hit) return std::nullopt;
  std::vector<ProductionId> steps;
  for (std::vector<int> cur = *hit; cur != root;) {
    const auto& step = parents.at(cur);
    steps.push_back(step.production);
    cur = step.parent;
  }
  std::reverse(steps.begin(), steps.end());
  return tree_from_leftmost(g, a, steps);
}

struct TreeEnumOptions {
  // Bound on tree depth (a leaf production has depth 1). Without it,
  // grammars with derivation cycles have infinitely many trees and the
  // enumeration reports BudgetExceeded.
  std::optional<std::size_t> max_depth;
  std::size_t budget = kDefaultBudget;
};

// Every parse tree rooted at `a` with yield length <= max_len (and depth <=
// max_depth, if given), each exactly once.
inline std::vector<ParseTree> enumerate_parse_trees(const Grammar& g, const Symbol& a,
                                                    std::size_t max_len,
                                                    TreeEnumOptions options = {}) {
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  struct Item {
    ParseTree tree;
    std::size_t length;
  };
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  const auto min_yield = min_yield_lengths(g);
  const bool bounded = options.max_depth.has_value();
  std::map<Key, std::vector<Item>> memo;
  std::set<std::pair<std::size_t, std::size_t>> active;
  std::size_t produced = 0;

  std::function<const std::vector<Item>&(std::size_t, std::size_t, std::size_t)> gen =
      [&](std::size_t x, std::size_t limit, std::size_t depth) -> const std::vector<Item>& {
    const Key key{x, limit, bounded ? depth : 0};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (!bounded && !active.emplace(x, limit).second)
      throw BudgetExceeded("infinitely many parse trees for " + g.nonterminals()[x].name +
                           " (derivation cycle); set a depth bound");
    std::vector<Item> items;
    if (depth > 0) {
      for (ProductionId id : g.productions_for(g.nonterminals()[x])) {
        const auto& p = g.production(id);
        const auto& kids = p.decomposition().nonterminals;
        std::vector<std::size_t> suffix_min(kids.size() + 1, 0);
        bool productive = true;
        for (std::size_t i = kids.size(); i-- > 0;) {
          const auto& m = min_yield[g.nonterminal_index(kids[i])];
          if (!m) {
            productive = false;
            break;
          }
          suffix_min[i] = suffix_min[i + 1] + *m;
        }
        if (!productive || p.terminal_count() + suffix_min[0] > limit) continue;

        ParseTree node{p.lhs(), id, {}};
        std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t i,
                                                                  std::size_t used) {
          if (i == kids.size()) {
            if (++produced > options.budget)
              throw BudgetExceeded("parse-tree enumeration exceeded " +
                                   std::to_string(options.budget) + " trees");
            items.push_back({node, used});
            return;
          }
          const std::size_t room = limit - used - suffix_min[i + 1];
          const auto& sub = gen(g.nonterminal_index(kids[i]), room, bounded ? depth - 1 : depth);
          for (const auto& child : sub) {
            if (child.length > room) continue;
            node.children.push_back(child.tree);
            fill(i + 1, used + child.length);
            node.children.pop_back();
          }
        };
        fill(0, p.terminal_count());
      }
    }
    if (!bounded) active.erase({x, limit});
    return memo.emplace(key, std::move(items)).first->second;
  };

  const std::size_t depth =
      bounded ? *options.max_depth : std::numeric_limits<std::size_t>::max();
  std::vector<ParseTree> out;
  for (auto& item : gen(g.nonterminal_index(a), max_len, depth)) out.push_back(item.tree);
  return out;
}

}  // namespace cfgraph
