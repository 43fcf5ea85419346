#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfgraph/error.hpp"

namespace cfgraph {

enum class SymbolKind : std::uint8_t { terminal, nonterminal };

// A grammar token. Two symbols are equal only if both name and kind agree,
// which keeps N and Σ disjoint at the type level.
struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::terminal;

  static Symbol terminal(std::string name) {
    check_name(name);
    return Symbol{std::move(name), SymbolKind::terminal};
  }
  static Symbol nonterminal(std::string name) {
    check_name(name);
    return Symbol{std::move(name), SymbolKind::nonterminal};
  }

  bool is_terminal() const noexcept { return kind == SymbolKind::terminal; }
  bool is_nonterminal() const noexcept {
    return kind == SymbolKind::nonterminal;
  }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.kind <=> b.kind;
  }

  static bool is_reserved(std::string_view token) {
    return token == "->" || token == "|" || token == "eps" || token == "#" ||
           token == "start";
  }

  static void check_name(std::string_view name) {
    if (name.empty()) throw GrammarError("empty symbol name");
    if (is_reserved(name))
      throw GrammarError("reserved token used as symbol: " + std::string(name));
    for (char c : name) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
          c == '\f')
        throw GrammarError("symbol name contains whitespace: '" +
                           std::string(name) + "'");
    }
  }
};

struct SymbolHash {
  std::size_t operator()(const Symbol& s) const noexcept {
    return std::hash<std::string>{}(s.name) * 2 +
           static_cast<std::size_t>(s.kind);
  }
};

// A sequence over N ∪ Σ. Empty means ε.
using Word = std::vector<Symbol>;

inline bool is_terminal_word(const Word& w) {
  return std::all_of(w.begin(), w.end(),
                     [](const Symbol& s) { return s.is_terminal(); });
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "ε";
  std::string out;
  for (const auto& s : w) {
    if (!out.empty()) out += ' ';
    out += s.name;
  }
  return out;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

using ProductionId = std::size_t;

// rhs = runs[0] nonterminals[0] runs[1] ... nonterminals[k-1] runs[k], with
// every run a maximal terminal-only (possibly empty) segment.
struct Decomposition {
  std::vector<Word> runs;
  std::vector<Symbol> nonterminals;

  std::size_t arity() const noexcept { return nonterminals.size(); }

  static Decomposition of(const Word& rhs) {
    Decomposition d;
    d.runs.emplace_back();
    for (const auto& s : rhs) {
      if (s.is_nonterminal()) {
        d.nonterminals.push_back(s);
        d.runs.emplace_back();
      } else {
        d.runs.back().push_back(s);
      }
    }
    return d;
  }

  Word reassemble() const {
    Word out = runs.front();
    for (std::size_t i = 0; i < nonterminals.size(); ++i) {
      out.push_back(nonterminals[i]);
      out.insert(out.end(), runs[i + 1].begin(), runs[i + 1].end());
    }
    return out;
  }
};

class Production {
 public:
  Production(ProductionId id, Symbol lhs, Word rhs)
      : id_(id),
        lhs_(std::move(lhs)),
        rhs_(std::move(rhs)),
        decomposition_(Decomposition::of(rhs_)) {}

  ProductionId id() const noexcept { return id_; }
  const Symbol& lhs() const noexcept { return lhs_; }
  const Word& rhs() const noexcept { return rhs_; }
  const Decomposition& decomposition() const noexcept { return decomposition_; }
  std::size_t arity() const noexcept { return decomposition_.arity(); }

  std::size_t terminal_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        rhs_.begin(), rhs_.end(), [](const Symbol& s) { return s.is_terminal(); }));
  }

 private:
  ProductionId id_;
  Symbol lhs_;
  Word rhs_;
  Decomposition decomposition_;
};

inline std::string to_string(const Production& p) {
  return p.lhs().name + " -> " + (p.rhs().empty() ? "eps" : to_string(p.rhs()));
}

struct Rule {
  Symbol lhs;
  Word rhs;
};

// Γ = (N, Σ, Π) plus an optional default start symbol. Symbol lists keep
// first-declaration order so every derived artifact is deterministic.
class Grammar {
 public:
  Grammar(std::vector<Symbol> nonterminals, std::vector<Symbol> terminals,
          std::vector<Rule> rules, std::optional<Symbol> start = std::nullopt)
      : nonterminals_(std::move(nonterminals)),
        terminals_(std::move(terminals)),
        start_(std::move(start)) {
    for (std::size_t i = 0; i < nonterminals_.size(); ++i) {
      const auto& s = nonterminals_[i];
      if (!s.is_nonterminal())
        throw GrammarError("'" + s.name + "' listed as nonterminal has terminal kind");
      if (!nt_index_.emplace(s.name, i).second)
        throw GrammarError("duplicate nonterminal '" + s.name + "'");
    }
    for (const auto& s : terminals_) {
      if (!s.is_terminal())
        throw GrammarError("'" + s.name + "' listed as terminal has nonterminal kind");
      if (nt_index_.count(s.name))
        throw GrammarError("'" + s.name + "' is both terminal and nonterminal");
      if (!t_names_.insert(s.name).second)
        throw GrammarError("duplicate terminal '" + s.name + "'");
    }
    if (start_ && !has_nonterminal(*start_))
      throw GrammarError("start symbol '" + start_->name + "' is not a nonterminal");
    by_lhs_.resize(nonterminals_.size());
    productions_.reserve(rules.size());
    for (auto& r : rules) {
      if (!has_nonterminal(r.lhs))
        throw GrammarError("production lhs '" + r.lhs.name + "' is not a nonterminal");
      for (const auto& s : r.rhs) {
        if (s.is_nonterminal() ? !has_nonterminal(s) : !has_terminal(s))
          throw GrammarError("production for '" + r.lhs.name +
                             "' uses undeclared symbol '" + s.name + "'");
      }
      const ProductionId id = productions_.size();
      by_lhs_[nt_index_.at(r.lhs.name)].push_back(id);
      productions_.emplace_back(id, std::move(r.lhs), std::move(r.rhs));
    }
  }

  const std::vector<Symbol>& nonterminals() const noexcept { return nonterminals_; }
  const std::vector<Symbol>& terminals() const noexcept { return terminals_; }
  const std::vector<Production>& productions() const noexcept { return productions_; }
  const std::optional<Symbol>& start() const noexcept { return start_; }

  const Production& production(ProductionId id) const {
    if (id >= productions_.size())
      throw GrammarError("unknown production id " + std::to_string(id));
    return productions_[id];
  }

  bool has_nonterminal(const Symbol& s) const {
    return s.is_nonterminal() && nt_index_.count(s.name) != 0;
  }
  bool has_terminal(const Symbol& s) const {
    return s.is_terminal() && t_names_.count(s.name) != 0;
  }

  std::size_t nonterminal_index(const Symbol& s) const {
    auto it = nt_index_.find(s.name);
    if (!s.is_nonterminal() || it == nt_index_.end())
      throw GrammarError("unknown nonterminal '" + s.name + "'");
    return it->second;
  }

  const std::vector<ProductionId>& productions_for(const Symbol& lhs) const {
    return by_lhs_[nonterminal_index(lhs)];
  }

  // Resolves a bare token name against the grammar's alphabets.
  std::optional<Symbol> lookup(std::string_view name) const {
    std::string key(name);
    if (nt_index_.count(key)) return Symbol{key, SymbolKind::nonterminal};
    if (t_names_.count(key)) return Symbol{key, SymbolKind::terminal};
    return std::nullopt;
  }

  std::size_t max_rhs_length() const noexcept {
    std::size_t m = 0;
    for (const auto& p : productions_) m = std::max(m, p.rhs().size());
    return m;
  }

 private:
  std::vector<Symbol> nonterminals_;
  std::vector<Symbol> terminals_;
  std::optional<Symbol> start_;
  std::vector<Production> productions_;
  std::unordered_map<std::string, std::size_t> nt_index_;
  std::set<std::string> t_names_;
  std::vector<std::vector<ProductionId>> by_lhs_;
};

// Equality up to production order (and symbol declaration order).
inline bool same_grammar(const Grammar& a, const Grammar& b) {
  auto as_set = [](const std::vector<Symbol>& v) {
    return std::set<Symbol>(v.begin(), v.end());
  };
  auto rules = [](const Grammar& g) {
    std::multiset<std::pair<Symbol, Word>> out;
    for (const auto& p : g.productions()) out.emplace(p.lhs(), p.rhs());
    return out;
  };
  return as_set(a.nonterminals()) == as_set(b.nonterminals()) &&
         as_set(a.terminals()) == as_set(b.terminals()) &&
         a.start() == b.start() && rules(a) == rules(b);
}

// ---------------------------------------------------------------------------
// Text format

struct ParseOptions {
  // Accept `_`-prefixed tokens, which the format otherwise reserves for
  // names minted by CNF conversion. Needed to read back `cnf` output.
  bool allow_internal_names = false;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

inline Grammar parse_grammar(std::istream& in, ParseOptions options = {}) {
  struct RawRule {
    std::string lhs;
    std::vector<std::string> rhs;
    std::size_t line;
  };
  std::vector<RawRule> raw;
  std::optional<std::pair<std::string, std::size_t>> start;

  auto check_token = [&](const std::string& tok, std::size_t line) {
    if (Symbol::is_reserved(tok))
      throw GrammarError("unexpected reserved token '" + tok + "'", line);
    if (!options.allow_internal_names && tok.front() == '_')
      throw GrammarError("tokens beginning with '_' are reserved: '" + tok + "'",
                         line);
  };

  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    auto toks = detail::split_ws(text);
    if (toks.empty()) continue;

    if (toks[0] == "start") {
      if (toks.size() != 2)
        throw GrammarError("start directive takes exactly one symbol", lineno);
      if (start) throw GrammarError("duplicate start directive", lineno);
      check_token(toks[1], lineno);
      start.emplace(toks[1], lineno);
      continue;
    }
    if (toks.size() < 2 || toks[1] != "->")
      throw GrammarError("expected '<lhs> -> ...'", lineno);
    check_token(toks[0], lineno);

    std::vector<std::string> alt;
    auto flush = [&] {
      if (alt.empty())
        throw GrammarError("empty right-hand side (write 'eps' for ε)", lineno);
      if (alt.size() == 1 && alt[0] == "eps") {
        raw.push_back({toks[0], {}, lineno});
      } else {
        for (const auto& t : alt) {
          if (t == "eps")
            throw GrammarError("'eps' must stand alone in an alternative", lineno);
          check_token(t, lineno);
        }
        raw.push_back({toks[0], alt, lineno});
      }
      alt.clear();
    };
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i] == "|") {
        flush();
      } else {
        alt.push_back(toks[i]);
      }
    }
    flush();
  }
  if (raw.empty()) throw GrammarError("grammar has no productions");

  std::vector<Symbol> nts;
  std::set<std::string> nt_names;
  for (const auto& r : raw) {
    if (nt_names.insert(r.lhs).second)
      nts.push_back(Symbol{r.lhs, SymbolKind::nonterminal});
  }
  std::vector<Symbol> ts;
  std::set<std::string> t_names;
  std::vector<Rule> rules;
  for (const auto& r : raw) {
    Word rhs;
    for (const auto& t : r.rhs) {
      if (nt_names.count(t)) {
        rhs.push_back(Symbol{t, SymbolKind::nonterminal});
      } else {
        if (t_names.insert(t).second) ts.push_back(Symbol{t, SymbolKind::terminal});
        rhs.push_back(Symbol{t, SymbolKind::terminal});
      }
    }
    rules.push_back({Symbol{r.lhs, SymbolKind::nonterminal}, std::move(rhs)});
  }
  std::optional<Symbol> start_symbol;
  if (start) {
    if (!nt_names.count(start->first))
      throw GrammarError("start symbol '" + start->first +
                             "' has no productions",
                         start->second);
    start_symbol = Symbol{start->first, SymbolKind::nonterminal};
  }
  return Grammar(std::move(nts), std::move(ts), std::move(rules),
                 std::move(start_symbol));
}

inline Grammar parse_grammar(std::string_view text, ParseOptions options = {}) {
  std::istringstream in{std::string(text)};
  return parse_grammar(in, options);
}

// Canonical emitter: optional start line, then one line per lhs (in order of
// its first production) with alternatives in production-id order.
inline void render(std::ostream& out, const Grammar& g) {
  if (g.start()) out << "start " << g.start()->name << '\n';
  std::vector<Symbol> order;
  std::set<Symbol> seen;
  for (const auto& p : g.productions()) {
    if (seen.insert(p.lhs()).second) order.push_back(p.lhs());
  }
  for (const auto& lhs : order) {
    out << lhs.name << " ->";
    bool first = true;
    for (ProductionId id : g.productions_for(lhs)) {
      const auto& rhs = g.production(id).rhs();
      out << (first ? " " : " | ") << (rhs.empty() ? "eps" : to_string(rhs));
      first = false;
    }
    out << '\n';
  }
}

inline std::string render(const Grammar& g) {
  std::ostringstream out;
  render(out, g);
  return out.str();
}

// ---------------------------------------------------------------------------
// Fixpoint analyses

inline std::vector<bool> nullable_nonterminals(const Grammar& g) {
  std::vector<bool> nullable(g.nonterminals().size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions()) {
      const auto lhs = g.nonterminal_index(p.lhs());
      if (nullable[lhs]) continue;
      bool all = std::all_of(p.rhs().begin(), p.rhs().end(), [&](const Symbol& s) {
        return s.is_nonterminal() && nullable[g.nonterminal_index(s)];
      });
      if (all) nullable[lhs] = changed = true;
    }
  }
  return nullable;
}

inline bool is_nullable(const Grammar& g, const Symbol& a) {
  return nullable_nonterminals(g)[g.nonterminal_index(a)];
}

// Length of the shortest terminal word each nonterminal derives; nullopt for
// unproductive nonterminals.
inline std::vector<std::optional<std::size_t>> min_yield_lengths(const Grammar& g) {
  std::vector<std::optional<std::size_t>> best(g.nonterminals().size());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions()) {
      std::size_t total = p.terminal_count();
      bool ok = true;
      for (const auto& b : p.decomposition().nonterminals) {
        const auto& m = best[g.nonterminal_index(b)];
        if (!m) {
          ok = false;
          break;
        }
        total += *m;
      }
      auto& cur = best[g.nonterminal_index(p.lhs())];
      if (ok && (!cur || total < *cur)) {
        cur = total;
        changed = true;
      }
    }
  }
  return best;
}

enum class DiagnosticKind { unreachable, unproductive, unused_terminal };

struct Diagnostic {
  DiagnosticKind kind;
  Symbol symbol;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline std::string to_string(const Diagnostic& d) {
  switch (d.kind) {
    case DiagnosticKind::unreachable:
      return "unreachable: " + d.symbol.name;
    case DiagnosticKind::unproductive:
      return "unproductive: " + d.symbol.name;
    case DiagnosticKind::unused_terminal:
      return "unused terminal: " + d.symbol.name;
  }
  return {};
}

// Reachability is measured from `start` (or the grammar's start directive);
// with neither, unreachable checks are skipped.
inline std::vector<Diagnostic> validate(const Grammar& g,
                                        std::optional<Symbol> start = std::nullopt) {
  std::vector<Diagnostic> out;
  if (!start) start = g.start();

  if (start) {
    std::vector<bool> reached(g.nonterminals().size(), false);
    std::vector<std::size_t> stack{g.nonterminal_index(*start)};
    reached[stack.back()] = true;
    while (!stack.empty()) {
      auto a = stack.back();
      stack.pop_back();
      for (ProductionId id : g.productions_for(g.nonterminals()[a])) {
        for (const auto& b : g.production(id).decomposition().nonterminals) {
          auto bi = g.nonterminal_index(b);
          if (!reached[bi]) {
            reached[bi] = true;
            stack.push_back(bi);
          }
        }
      }
    }
    for (std::size_t i = 0; i < reached.size(); ++i) {
      if (!reached[i])
        out.push_back({DiagnosticKind::unreachable, g.nonterminals()[i]});
    }
  }

  auto productive = min_yield_lengths(g);
  for (std::size_t i = 0; i < productive.size(); ++i) {
    if (!productive[i])
      out.push_back({DiagnosticKind::unproductive, g.nonterminals()[i]});
  }

  std::set<Symbol> used;
  for (const auto& p : g.productions())
    for (const auto& s : p.rhs())
      if (s.is_terminal()) used.insert(s);
  for (const auto& t : g.terminals()) {
    if (!used.count(t)) out.push_back({DiagnosticKind::unused_terminal, t});
  }
  return out;
}

// Every production is A -> B C or A -> x.
inline bool is_cnf(const Grammar& g) {
  return std::all_of(g.productions().begin(), g.productions().end(),
                     [](const Production& p) {
                       const auto& r = p.rhs();
                       if (r.size() == 1) return r[0].is_terminal();
                       if (r.size() == 2)
                         return r[0].is_nonterminal() && r[1].is_nonterminal();
                       return false;
                     });
}

// ---------------------------------------------------------------------------
// Parse trees

// A derivation in tree form: one child per nonterminal occurrence of the
// production applied at the root, in rhs order.
struct ParseTree {
  Symbol root;
  ProductionId production = 0;
  std::vector<ParseTree> children;

  friend bool operator==(const ParseTree&, const ParseTree&) = default;

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return d + 1;
  }
};

// Throws GrammarError if the tree does not match the grammar's productions.
inline void check_tree(const Grammar& g, const ParseTree& t) {
  const auto& p = g.production(t.production);
  if (p.lhs() != t.root)
    throw GrammarError("tree node " + t.root.name + " uses production of " +
                       p.lhs().name);
  if (t.children.size() != p.arity())
    throw GrammarError("tree node for '" + to_string(p) + "' has " +
                       std::to_string(t.children.size()) + " children, expected " +
                       std::to_string(p.arity()));
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (t.children[i].root != p.decomposition().nonterminals[i])
      throw GrammarError("child " + std::to_string(i) + " of '" + to_string(p) +
                         "' is rooted at " + t.children[i].root.name);
    check_tree(g, t.children[i]);
  }
}

inline bool is_valid_tree(const Grammar& g, const ParseTree& t) {
  try {
    check_tree(g, t);
    return true;
  } catch (const GrammarError&) {
    return false;
  }
}

inline void append_yield(const Grammar& g, const ParseTree& t, Word& out) {
  const auto& d = g.production(t.production).decomposition();
  out.insert(out.end(), d.runs[0].begin(), d.runs[0].end());
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    append_yield(g, t.children[i], out);
    out.insert(out.end(), d.runs[i + 1].begin(), d.runs[i + 1].end());
  }
}

inline Word yield(const Grammar& g, const ParseTree& t) {
  Word out;
  append_yield(g, t, out);
  return out;
}

// Productions of the leftmost derivation, i.e. the tree in preorder.
inline std::vector<ProductionId> leftmost_derivation(const ParseTree& t) {
  std::vector<ProductionId> out;
  std::function<void(const ParseTree&)> walk = [&](const ParseTree& n) {
    out.push_back(n.production);
    for (const auto& c : n.children) walk(c);
  };
  walk(t);
  return out;
}

// Inverse of leftmost_derivation.
inline ParseTree tree_from_leftmost(const Grammar& g, const Symbol& root,
                                    const std::vector<ProductionId>& steps) {
  std::size_t next = 0;
  std::function<ParseTree(const Symbol&)> build = [&](const Symbol& a) {
    if (next >= steps.size()) throw GrammarError("leftmost derivation is incomplete");
    const auto& p = g.production(steps[next++]);
    if (p.lhs() != a)
      throw GrammarError("leftmost derivation expands " + a.name + " with '" +
                         to_string(p) + "'");
    ParseTree t{a, p.id(), {}};
    for (const auto& b : p.decomposition().nonterminals) t.children.push_back(build(b));
    return t;
  };
  ParseTree t = build(root);
  if (next != steps.size()) throw GrammarError("leftmost derivation has extra steps");
  return t;
}

// "[S -> a S b [S -> a b]]"
inline std::string to_string(const Grammar& g, const ParseTree& t) {
  std::string out = "[" + to_string(g.production(t.production));
  for (const auto& c : t.children) out += " " + to_string(g, c);
  return out + "]";
}

}  // namespace cfgraph
