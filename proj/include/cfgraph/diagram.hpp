#pragma once

#include <cassert>
#include <cstddef>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cfgraph/grammar.hpp"
#include "cfgraph/label.hpp"

namespace cfgraph {

enum class Side : std::uint8_t { u, v };

struct Vertex {
  Side side;
  Symbol nonterminal;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

inline std::string to_string(const Vertex& x) {
  return (x.side == Side::u ? "u_" : "v_") + x.nonterminal.name;
}

enum class ArcRole : std::uint8_t { leaf, entry, bridge, exit };

inline const char* to_string(ArcRole r) {
  switch (r) {
    case ArcRole::leaf: return "leaf";
    case ArcRole::entry: return "entry";
    case ArcRole::bridge: return "bridge";
    case ArcRole::exit: return "exit";
  }
  return "?";
}

struct Provenance {
  ProductionId production = 0;
  ArcRole role = ArcRole::leaf;
  std::size_t bridge_index = 0;  // 1-based; only meaningful for bridges

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

using ArcId = std::size_t;

struct Arc {
  ArcId id = 0;
  Vertex source;
  Vertex target;
  Label label;
  Provenance provenance;
};

// Endpoint shape, read off the u/v sides alone. Each role has exactly one
// shape: leaf u->v, entry u->u, bridge v->u, exit v->v.
inline ArcRole shape_of(const Arc& a) {
  if (a.source.side == Side::u) return a.target.side == Side::v ? ArcRole::leaf : ArcRole::entry;
  return a.target.side == Side::u ? ArcRole::bridge : ArcRole::exit;
}

namespace detail {

inline TWord checked_tail(const std::vector<SignedSymbol>& raw) {
  TWord t = TWord::reduce(raw);
  assert(t.size() == raw.size() && "arc tails are emitted in normal form");
  return t;
}

}  // namespace detail

// The fragment of H(Γ) contributed by one production
// A -> α0 B1 α1 ... Bk αk. Arc ids are local (0..); build_diagram renumbers.
inline std::vector<Arc> arcs_for_production(const Production& p) {
  const auto& d = p.decomposition();
  const auto& runs = d.runs;
  const auto& bs = d.nonterminals;
  const Symbol& a = p.lhs();
  std::vector<Arc> out;

  if (bs.empty()) {
    out.push_back({0, {Side::u, a}, {Side::v, a}, Label(runs[0], TWord()),
                   {p.id(), ArcRole::leaf, 0}});
    return out;
  }

  const std::size_t k = bs.size();
  // Entry: u_A -> u_B1 with (α0, α1 B2 α2 ... Bk αk).
  Word rest = runs[1];
  for (std::size_t i = 1; i < k; ++i) {
    rest.push_back(bs[i]);
    rest.insert(rest.end(), runs[i + 1].begin(), runs[i + 1].end());
  }
  out.push_back({0, {Side::u, a}, {Side::u, bs[0]}, Label(runs[0], TWord::of(rest)),
                 {p.id(), ArcRole::entry, 0}});

  // Bridge(i): v_Bi -> u_B(i+1) with (αi, B'(i+1) α'i).
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<SignedSymbol> tail{primed(bs[i])};
    auto alpha_primed = prime(runs[i]);
    tail.insert(tail.end(), alpha_primed.begin(), alpha_primed.end());
    out.push_back({out.size(), {Side::v, bs[i - 1]}, {Side::u, bs[i]},
                   Label(runs[i], detail::checked_tail(tail)),
                   {p.id(), ArcRole::bridge, i}});
  }

  // Exit: v_Bk -> v_A with (αk, α'k).
  out.push_back({out.size(), {Side::v, bs[k - 1]}, {Side::v, a},
                 Label(runs[k], detail::checked_tail(prime(runs[k]))),
                 {p.id(), ArcRole::exit, 0}});
  return out;
}

// H(Γ): vertices u_A, v_A for every A ∈ N; arcs are exactly the union of the
// per-production fragments, in production order. Parallel arcs are kept.
class Diagram {
 public:
  explicit Diagram(Grammar g) : grammar_(std::move(g)) {
    const std::size_t n = grammar_.nonterminals().size();
    out_.resize(2 * n);
    by_production_.resize(grammar_.productions().size());
    for (const auto& p : grammar_.productions()) {
      for (auto& arc : arcs_for_production(p)) {
        arc.id = arcs_.size();
        out_[index(arc.source)].push_back(arc.id);
        by_production_[p.id()].push_back(arc.id);
        arcs_.push_back(std::move(arc));
      }
    }
  }

  const Grammar& grammar() const noexcept { return grammar_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  const Arc& arc(ArcId id) const {
    if (id >= arcs_.size()) throw WalkError("unknown arc id " + std::to_string(id));
    return arcs_[id];
  }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    for (const auto& a : grammar_.nonterminals()) {
      out.push_back({Side::u, a});
      out.push_back({Side::v, a});
    }
    return out;
  }

  // Out-arcs in arc-id order.
  std::span<const ArcId> out_arcs(const Vertex& x) const { return out_[index(x)]; }

  // The production's fragment: [leaf] or [entry, bridge 1..k-1, exit].
  std::span<const ArcId> production_arcs(ProductionId id) const {
    if (id >= by_production_.size())
      throw PreconditionError("production " + std::to_string(id) + " is not in the diagram");
    return by_production_[id];
  }

  std::size_t index(const Vertex& x) const {
    return 2 * grammar_.nonterminal_index(x.nonterminal) + (x.side == Side::v ? 1 : 0);
  }

 private:
  Grammar grammar_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> by_production_;
};

inline Diagram build_diagram(const Grammar& g) { return Diagram(g); }

namespace detail {

inline bool is_dot_id(const std::string& s) {
  if (s.empty() || (s[0] >= '0' && s[0] <= '9')) return false;
  for (unsigned char c : s) {
    if (!(c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c >= 0x80))
      return false;
  }
  return true;
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string dot_vertex(const Vertex& x) {
  auto name = to_string(x);
  return is_dot_id(name) ? name : dot_quote(name);
}

}  // namespace detail

inline void write_dot(std::ostream& out, const Diagram& d) {
  out << "digraph H {\n";
  for (const auto& x : d.vertices()) out << "  " << detail::dot_vertex(x) << ";\n";
  for (const auto& a : d.arcs()) {
    out << "  " << detail::dot_vertex(a.source) << " -> " << detail::dot_vertex(a.target)
        << " [label=" << detail::dot_quote(to_string(a.label)) << "];"
        << "  // arc " << a.id << ": production " << a.provenance.production << ' '
        << to_string(a.provenance.role);
    if (a.provenance.role == ArcRole::bridge) out << ' ' << a.provenance.bridge_index;
    out << '\n';
  }
  out << "}\n";
}

inline std::string to_dot(const Diagram& d) {
  std::ostringstream out;
  write_dot(out, d);
  return out.str();
}

}  // namespace cfgraph
