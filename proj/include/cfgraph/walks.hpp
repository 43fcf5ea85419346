#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "cfgraph/diagram.hpp"
#include "cfgraph/enumerate.hpp"

namespace cfgraph {

struct Walk {
  std::vector<ArcId> arcs;

  friend bool operator==(const Walk&, const Walk&) = default;
};

inline std::string to_string(const Walk& w) {
  std::string out;
  for (ArcId id : w.arcs) {
    if (!out.empty()) out += ' ';
    out += std::to_string(id);
  }
  return out;
}

inline void check_continuous(const Diagram& d, std::span<const ArcId> arcs) {
  if (arcs.empty()) throw WalkError("empty walk");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = d.arc(arcs[i]);
    if (i + 1 < arcs.size() && !(a.target == d.arc(arcs[i + 1]).source))
      throw WalkError("walk is discontinuous between positions " + std::to_string(i) +
                      " and " + std::to_string(i + 1));
  }
}

// l(e1) ∘ l(e2) ∘ ... ∘ l(em).
inline Label walk_label(const Diagram& d, std::span<const ArcId> arcs) {
  check_continuous(d, arcs);
  Label acc = Label::identity();
  for (ArcId id : arcs) acc = compose(acc, d.arc(id).label);
  return acc;
}

inline Label walk_label(const Diagram& d, const Walk& w) { return walk_label(d, w.arcs); }

// Either a single leaf arc, or entry · child1 · sep1 · ... · childk · exit.
struct WalkStructure {
  ArcId entry = 0;  // the leaf arc itself when children is empty
  std::vector<WalkStructure> children;
  std::vector<ArcId> separators;
  ArcId exit = 0;

  static WalkStructure leaf(ArcId id) { return WalkStructure{id, {}, {}, 0}; }

  bool is_leaf() const noexcept { return children.empty(); }

  void flatten_into(std::vector<ArcId>& out) const {
    out.push_back(entry);
    if (is_leaf()) return;
    for (std::size_t i = 0; i < children.size(); ++i) {
      children[i].flatten_into(out);
      if (i < separators.size()) out.push_back(separators[i]);
    }
    out.push_back(exit);
  }

  Walk flatten() const {
    Walk w;
    flatten_into(w.arcs);
    return w;
  }

  std::size_t depth() const {
    std::size_t m = 0;
    for (const auto& c : children) m = std::max(m, c.depth());
    return m + 1;
  }

  friend bool operator==(const WalkStructure&, const WalkStructure&) = default;
};

// "(node ρ=2 (leaf 0) τ=1)"
inline std::string to_sexpr(const WalkStructure& s) {
  if (s.is_leaf()) return "(leaf " + std::to_string(s.entry) + ")";
  std::string out = "(node ρ=" + std::to_string(s.entry);
  for (std::size_t i = 0; i < s.children.size(); ++i) {
    out += " " + to_sexpr(s.children[i]);
    if (i < s.separators.size()) out += " σ=" + std::to_string(s.separators[i]);
  }
  return out + " τ=" + std::to_string(s.exit) + ")";
}

struct StructuralFailure {
  std::size_t position;  // index into the walk's arc sequence
  std::string reason;
};

namespace detail {

class BracketParser {
 public:
  BracketParser(const Diagram& d, std::span<const ArcId> arcs) : d_(d), arcs_(arcs) {}

  std::variant<WalkStructure, StructuralFailure> run() {
    auto top = sub_walk(0);
    if (!top) return *failure_;
    if (pos_ < arcs_.size()) {
      const auto shape = shape_of(d_.arc(arcs_[pos_]));
      return StructuralFailure{pos_, std::string(shape == ArcRole::bridge ? "separator" : "close") +
                                         " arc at depth 0 after the walk reached " +
                                         to_string(d_.arc(arcs_[pos_ - 1]).target)};
    }
    return std::move(*top);
  }

 private:
  std::optional<WalkStructure> fail(std::size_t at, std::string why) {
    failure_ = StructuralFailure{at, std::move(why)};
    return std::nullopt;
  }

  std::optional<WalkStructure> sub_walk(std::size_t depth) {
    if (pos_ >= arcs_.size()) return fail(pos_, "walk ends where a sub-walk should start");
    const std::size_t open_at = pos_;
    const Arc& first = d_.arc(arcs_[pos_]);
    const auto shape = shape_of(first);
    if (shape == ArcRole::leaf) {
      ++pos_;
      return WalkStructure::leaf(first.id);
    }
    if (shape != ArcRole::entry)
      return fail(pos_, "sub-walk starts at " + to_string(first.source) + " (depth " +
                            std::to_string(depth) + ")");

    WalkStructure node;
    node.entry = first.id;
    ++pos_;
    for (;;) {
      auto child = sub_walk(depth + 1);
      if (!child) return std::nullopt;
      node.children.push_back(std::move(*child));
      if (pos_ >= arcs_.size())
        return fail(pos_, "unclosed open arc at position " + std::to_string(open_at));
      const Arc& next = d_.arc(arcs_[pos_]);
      const auto next_shape = shape_of(next);
      if (next_shape == ArcRole::bridge) {
        node.separators.push_back(next.id);
        ++pos_;
        continue;
      }
      if (next_shape != ArcRole::exit)
        return fail(pos_, "expected separator or close after a sub-walk");
      if (next.target.nonterminal != first.source.nonterminal)
        return fail(pos_, "close arc reaches " + to_string(next.target) + " but the open arc left " +
                              to_string(first.source));
      node.exit = next.id;
      ++pos_;
      return node;
    }
  }

  const Diagram& d_;
  std::span<const ArcId> arcs_;
  std::size_t pos_ = 0;
  std::optional<StructuralFailure> failure_;
};

}  // namespace detail

// Parses the walk as a nested bracket structure over arc endpoint shapes.
// Succeeds iff it starts at some u_A, ends at v_A, and is balanced with
// separators only between siblings. Throws WalkError if discontinuous.
inline std::variant<WalkStructure, StructuralFailure> decompose(const Diagram& d,
                                                                const Walk& w) {
  check_continuous(d, w.arcs);
  return detail::BracketParser(d, w.arcs).run();
}

struct ProperCheck {
  bool proper = false;
  std::optional<WalkStructure> witness;
  std::string reason;

  explicit operator bool() const noexcept { return proper; }
};

// Properness: the bracket structure exists and every node's composite label
// has an empty tail. Leaf arcs are proper unconditionally.
inline ProperCheck is_proper(const Diagram& d, const Walk& w) {
  auto parsed = decompose(d, w);
  if (auto* f = std::get_if<StructuralFailure>(&parsed))
    return {false, std::nullopt, "at arc position " + std::to_string(f->position) + ": " + f->reason};
  auto& structure = std::get<WalkStructure>(parsed);

  std::string reason;
  std::size_t offset = 0;
  std::function<std::optional<Label>(const WalkStructure&)> label_of =
      [&](const WalkStructure& s) -> std::optional<Label> {
    const std::size_t start = offset;
    if (s.is_leaf()) {
      ++offset;
      return d.arc(s.entry).label;
    }
    ++offset;
    Label acc = d.arc(s.entry).label;
    for (std::size_t i = 0; i < s.children.size(); ++i) {
      auto child = label_of(s.children[i]);
      if (!child) return std::nullopt;
      acc = compose(acc, *child);
      if (i < s.separators.size()) {
        acc = compose(acc, d.arc(s.separators[i]).label);
        ++offset;
      }
    }
    acc = compose(acc, d.arc(s.exit).label);
    ++offset;
    if (!is_neutral_tail(acc)) {
      reason = "sub-walk at arc positions " + std::to_string(start) + ".." +
               std::to_string(offset - 1) + " has label " + to_string(acc) + " with non-ε tail";
      return std::nullopt;
    }
    return acc;
  };
  if (!label_of(structure)) return {false, std::nullopt, reason};
  return {true, std::move(structure), {}};
}

struct ProperWalk {
  Walk walk;
  Word word;
};

// Every proper walk u_A -> v_A whose label word has length <= max_word_len and
// whose structure depth is <= max_depth, each once, in arc-id order of choice.
inline std::vector<ProperWalk> enumerate_proper_walks(const Diagram& d, const Symbol& a,
                                                      std::size_t max_word_len,
                                                      std::size_t max_depth,
                                                      std::size_t budget = kDefaultBudget) {
  const Grammar& g = d.grammar();
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  struct Partial {
    std::vector<ArcId> arcs;
    std::size_t length;
  };
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  std::map<Key, std::vector<Partial>> memo;
  std::size_t work = 0;
  auto tick = [&] {
    if (++work > budget)
      throw BudgetExceeded("proper-walk enumeration exceeded " + std::to_string(budget) +
                           " partial walks");
  };

  std::function<const std::vector<Partial>&(const Symbol&, std::size_t, std::size_t)> gen =
      [&](const Symbol& c, std::size_t limit, std::size_t depth) -> const std::vector<Partial>& {
    const Key key{g.nonterminal_index(c), limit, depth};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Partial> out;

    // Walks out of a node after its child at `b` closes, tail `acc` pending.
    std::function<void(const Symbol&, const std::vector<ArcId>&, std::size_t, const TWord&)> extend =
        [&](const Symbol& b, const std::vector<ArcId>& arcs, std::size_t used, const TWord& acc) {
          tick();
          const auto& children = gen(b, limit - used, depth - 1);
          for (const auto& child : children) {
            if (used + child.length > limit) continue;
            for (ArcId fid : d.out_arcs({Side::v, b})) {
              const Arc& f = d.arc(fid);
              const std::size_t total = used + child.length + f.label.word().size();
              if (total > limit) continue;
              TWord pending = t_concat(f.label.tail(), acc);
              if (pending.has_primed()) continue;  // a primed letter never cancels later
              std::vector<ArcId> next = arcs;
              next.insert(next.end(), child.arcs.begin(), child.arcs.end());
              next.push_back(fid);
              if (shape_of(f) == ArcRole::exit) {
                if (f.target.nonterminal == c && pending.empty()) {
                  tick();
                  out.push_back({std::move(next), total});
                }
              } else {
                extend(f.target.nonterminal, next, total, pending);
              }
            }
          }
        };

    if (depth > 0) {
      for (ArcId eid : d.out_arcs({Side::u, c})) {
        const Arc& e = d.arc(eid);
        const std::size_t len = e.label.word().size();
        if (len > limit) continue;
        if (shape_of(e) == ArcRole::leaf) {
          tick();
          out.push_back({{eid}, len});
        } else if (depth > 1) {
          extend(e.target.nonterminal, {eid}, len, e.label.tail());
        }
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  };

  std::vector<ProperWalk> result;
  for (const auto& p : gen(a, max_word_len, max_depth)) {
    Walk w{p.arcs};
    result.push_back({w, walk_label(d, w).word()});
  }
  return result;
}

enum class SearchStatus { found, not_found, budget_exceeded };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::not_found: return "not-found";
    case SearchStatus::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

struct SearchResult {
  SearchStatus status = SearchStatus::not_found;
  std::optional<Walk> walk;
  std::size_t expansions = 0;
};

namespace detail {

class WalkSearch {
 public:
  WalkSearch(const Diagram& d, const Word& target, std::size_t budget)
      : d_(d), target_(target), budget_(budget) {}

  struct Outcome {
    std::optional<std::vector<ArcId>> arcs;
    bool tainted = false;  // a failure that relied on a cycle cut
  };

  struct OutOfBudget {};

  // A proper walk u_c -> v_c whose word is target[i, j).
  Outcome solve(const Symbol& c, std::size_t i, std::size_t j) {
    const Key key{d_.grammar().nonterminal_index(c), i, j};
    if (auto it = memo_.find(key); it != memo_.end()) return {it->second, false};
    // Repeating (c, i, j) on the stack is never needed: a minimal derivation
    // can replace the outer occurrence by the inner one.
    if (active_.count(key)) return {std::nullopt, true};
    tick();
    active_.insert(key);
    bool tainted = false;
    std::optional<std::vector<ArcId>> found;
    for (ArcId eid : d_.out_arcs({Side::u, c})) {
      const Arc& e = d_.arc(eid);
      const auto& w = e.label.word();
      if (shape_of(e) == ArcRole::leaf) {
        if (i + w.size() == j && matches(w, i)) {
          found = std::vector<ArcId>{eid};
          break;
        }
        continue;
      }
      if (i + w.size() > j || !matches(w, i)) continue;
      found = extend(c, j, e.target.nonterminal, i + w.size(), {eid}, e.label.tail(), tainted);
      if (found) break;
    }
    active_.erase(key);
    if (found || !tainted) memo_.emplace(key, found);
    return {std::move(found), tainted && !found};
  }

  std::size_t expansions() const noexcept { return expansions_; }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;

  void tick() {
    if (++expansions_ > budget_) throw OutOfBudget{};
  }

  bool matches(const Word& w, std::size_t at) const {
    if (at + w.size() > target_.size()) return false;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (!(w[k] == target_[at + k])) return false;
    return true;
  }

  std::optional<std::vector<ArcId>> extend(const Symbol& c, std::size_t j, const Symbol& b,
                                           std::size_t pos, const std::vector<ArcId>& arcs,
                                           const TWord& acc, bool& tainted) {
    for (std::size_t m = pos; m <= j; ++m) {
      tick();
      auto child = solve(b, pos, m);
      tainted = tainted || child.tainted;
      if (!child.arcs) continue;
      for (ArcId fid : d_.out_arcs({Side::v, b})) {
        const Arc& f = d_.arc(fid);
        const auto& w = f.label.word();
        if (m + w.size() > j || !matches(w, m)) continue;
        TWord pending = t_concat(f.label.tail(), acc);
        if (pending.has_primed()) continue;
        std::vector<ArcId> next = arcs;
        next.insert(next.end(), child.arcs->begin(), child.arcs->end());
        next.push_back(fid);
        if (shape_of(f) == ArcRole::exit) {
          if (f.target.nonterminal == c && pending.empty() && m + w.size() == j) return next;
        } else if (auto r = extend(c, j, f.target.nonterminal, m + w.size(), next, pending, tainted)) {
          return r;
        }
      }
    }
    return std::nullopt;
  }

  const Diagram& d_;
  const Word& target_;
  std::size_t budget_;
  std::size_t expansions_ = 0;
  std::map<Key, std::optional<std::vector<ArcId>>> memo_;
  std::set<Key> active_;
};

}  // namespace detail

// Depth-first search over proper-walk shapes for one whose label word is
// `target`, pruning on word prefix and on pending tails that can no longer
// cancel. not_found is definitive (search space exhausted); budget_exceeded
// is inconclusive. Arcs are tried in id order, so results are deterministic.
inline SearchResult find_proper_walk(const Diagram& d, const Symbol& a, const Word& target,
                                     std::size_t budget = kDefaultBudget) {
  const Grammar& g = d.grammar();
  if (!g.has_nonterminal(a)) throw GrammarError("unknown nonterminal '" + a.name + "'");
  for (const auto& s : target)
    if (!g.has_terminal(s))
      throw PreconditionError("'" + s.name + "' is not a terminal of the grammar");

  detail::WalkSearch search(d, target, budget);
  try {
    auto r = search.solve(a, 0, target.size());
    if (r.arcs) return {SearchStatus::found, Walk{std::move(*r.arcs)}, search.expansions()};
    return {SearchStatus::not_found, std::nullopt, search.expansions()};
  } catch (const detail::WalkSearch::OutOfBudget&) {
    return {SearchStatus::budget_exceeded, std::nullopt, search.expansions()};
  }
}

}  // namespace cfgraph
