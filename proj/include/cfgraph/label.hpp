#pragma once

// The monoid T generated by N ∪ Σ ∪ N' ∪ Σ' under the one-sided relations
// z'z = ε, and the label monoid R = Σ* × T with reversed tail composition.
//
// Reduction. The rewriting system z'z -> ε has no overlapping redexes: a
// redex starts with a primed letter and ends with an unprimed one, so two
// redexes can never share a letter (the shared letter would have to be both
// primed and unprimed). Non-overlapping length-reducing systems are
// confluent and terminating, hence every word has a unique normal form and
// any strategy reaches it. We use one left-to-right pass with a stack:
// pushing letter c onto a stack whose top t satisfies cancels(t, c) pops t.
//
// The relations are deliberately one-sided: zz' is irreducible. Making them
// two-sided would turn T into a free group and let unrelated arc labels
// cancel.

#include <span>
#include <string>
#include <vector>

#include "cfgraph/grammar.hpp"

namespace cfgraph {

struct SignedSymbol {
  Symbol base;
  bool primed = false;

  SignedSymbol toggled() const { return SignedSymbol{base, !primed}; }

  friend bool operator==(const SignedSymbol&, const SignedSymbol&) = default;
  friend std::strong_ordering operator<=>(const SignedSymbol& a, const SignedSymbol& b) {
    if (auto c = a.base <=> b.base; c != 0) return c;
    return a.primed <=> b.primed;
  }
};

inline SignedSymbol plain(Symbol s) { return SignedSymbol{std::move(s), false}; }
inline SignedSymbol primed(Symbol s) { return SignedSymbol{std::move(s), true}; }

// True iff (left, right) is a redex z'z.
inline bool cancels(const SignedSymbol& left, const SignedSymbol& right) {
  return left.primed && !right.primed && left.base == right.base;
}

// An element of T, always in normal form.
class TWord {
 public:
  TWord() = default;

  static TWord reduce(std::span<const SignedSymbol> raw) {
    std::vector<SignedSymbol> stack;
    stack.reserve(raw.size());
    for (const auto& c : raw) {
      if (!stack.empty() && cancels(stack.back(), c)) {
        stack.pop_back();
      } else {
        stack.push_back(c);
      }
    }
    return TWord(std::move(stack));
  }

  // Unprimed letters never form a redex.
  static TWord of(const Word& w) {
    std::vector<SignedSymbol> letters;
    letters.reserve(w.size());
    for (const auto& s : w) letters.push_back(plain(s));
    return TWord(std::move(letters));
  }

  const std::vector<SignedSymbol>& letters() const noexcept { return letters_; }
  bool empty() const noexcept { return letters_.empty(); }
  std::size_t size() const noexcept { return letters_.size(); }

  bool has_primed() const noexcept {
    for (const auto& c : letters_)
      if (c.primed) return true;
    return false;
  }

  friend bool operator==(const TWord&, const TWord&) = default;

 private:
  explicit TWord(std::vector<SignedSymbol> letters) : letters_(std::move(letters)) {}

  std::vector<SignedSymbol> letters_;
};

inline TWord reduce(std::span<const SignedSymbol> raw) { return TWord::reduce(raw); }

// ω' = z'_k ... z'_1 for ω = z_1 ... z_k; an involutive anti-homomorphism.
inline std::vector<SignedSymbol> prime(std::span<const SignedSymbol> w) {
  std::vector<SignedSymbol> out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->toggled());
  return out;
}

inline std::vector<SignedSymbol> prime(const Word& w) {
  return prime(TWord::of(w).letters());
}

// Only the u|v boundary can cancel since both sides are already reduced.
inline TWord t_concat(const TWord& u, const TWord& v) {
  const auto& a = u.letters();
  const auto& b = v.letters();
  std::size_t keep = a.size();
  std::size_t skip = 0;
  while (keep > 0 && skip < b.size() && cancels(a[keep - 1], b[skip])) {
    --keep;
    ++skip;
  }
  std::vector<SignedSymbol> out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(keep));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(skip), b.end());
  return TWord::reduce(out);
}

// (ω, z) ∈ Σ* × T.
class Label {
 public:
  Label() = default;
  Label(Word word, TWord tail) : word_(std::move(word)), tail_(std::move(tail)) {
    if (!is_terminal_word(word_))
      throw GrammarError("label word must be terminal-only: " + to_string(word_));
  }

  static Label identity() { return Label(); }

  const Word& word() const noexcept { return word_; }
  const TWord& tail() const noexcept { return tail_; }

  friend bool operator==(const Label&, const Label&) = default;

 private:
  Word word_;
  TWord tail_;
};

// (ω1, z1) ∘ (ω2, z2) = (ω1 ω2, z2 z1). Note the tail order.
inline Label compose(const Label& p, const Label& q) {
  return Label(concat(p.word(), q.word()), t_concat(q.tail(), p.tail()));
}

inline bool is_neutral_tail(const Label& p) { return p.tail().empty(); }

inline std::string to_string(const SignedSymbol& c) {
  return c.primed ? c.base.name + "'" : c.base.name;
}

inline std::string to_string(std::span<const SignedSymbol> w) {
  if (w.empty()) return "ε";
  std::string out;
  for (const auto& c : w) {
    if (!out.empty()) out += ' ';
    out += to_string(c);
  }
  return out;
}

inline std::string to_string(const TWord& t) { return to_string(t.letters()); }

// "(a b, b')"
inline std::string to_string(const Label& l) {
  return "(" + to_string(l.word()) + ", " + to_string(l.tail()) + ")";
}

}  // namespace cfgraph
