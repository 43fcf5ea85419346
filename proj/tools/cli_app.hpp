#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfgraph/cfgraph.hpp"

namespace cfgraph::cli {

enum ExitCode : int {
  kOk = 0,
  kNonMember = 1,
  kInconclusive = 2,
  kDiscrepancy = 3,
  kInputError = 64,
  kBadArguments = 65,
};

struct Config {
  std::string subcommand;
  std::string grammar_path;
  std::optional<std::string> start;
  std::optional<std::string> word;
  std::string method = "walks";
  std::size_t max_len = 6;
  std::optional<std::size_t> max_depth;
  std::size_t budget = kDefaultBudget;
  std::optional<std::string> output;  // --dot / --report
};

namespace detail {

struct Failure {
  int code;
  std::string message;
};

inline Grammar load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kInputError, "cannot read grammar file '" + path + "'"};
  try {
    return parse_grammar(in, ParseOptions{.allow_internal_names = true});
  } catch (const GrammarError& e) {
    throw Failure{kInputError, path + ": " + e.what()};
  }
}

inline Symbol start_symbol(const Grammar& g, const Config& c) {
  if (c.start) {
    Symbol s{*c.start, SymbolKind::nonterminal};
    if (!g.has_nonterminal(s)) throw Failure{kBadArguments, "'" + *c.start + "' is not a nonterminal"};
    return s;
  }
  if (g.start()) return *g.start();
  return g.productions().front().lhs();
}

inline Word parse_word(const Grammar& g, const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto s = g.lookup(tok);
    if (!s || !s->is_terminal()) throw Failure{kBadArguments, "'" + tok + "' is not a terminal"};
    w.push_back(*s);
  }
  return w;
}

inline void write_output(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw Failure{kInputError, "cannot write '" + path + "'"};
}

inline int check(const Config& c, std::ostream& out, std::ostream& err) {
  Grammar g = load(c.grammar_path);
  std::optional<Symbol> start;
  if (c.start || g.start()) start = start_symbol(g, c);
  auto diags = validate(g, start);
  for (const auto& d : diags) err << "warning: " << to_string(d) << '\n';
  out << "ok: " << g.nonterminals().size() << " nonterminals, " << g.terminals().size()
      << " terminals, " << g.productions().size() << " productions";
  if (!diags.empty()) out << ", " << diags.size() << " warnings";
  out << '\n';
  return kOk;
}

inline int cnf(const Config& c, std::ostream& out) {
  Grammar g = load(c.grammar_path);
  auto result = to_cnf(g, start_symbol(g, c));
  if (result.epsilon_dropped) out << "# epsilon dropped: the start symbol derives ε\n";
  if (result.empty_language) out << "# the start symbol derives no non-empty word\n";
  render(out, result.grammar);
  return kOk;
}

inline int diagram(const Config& c, std::ostream& out) {
  Grammar g = load(c.grammar_path);
  auto dot = to_dot(build_diagram(g));
  if (c.output) {
    write_output(*c.output, dot);
  } else {
    out << dot;
  }
  return kOk;
}

inline Method parse_method(const std::string& m) {
  if (m == "walks") return Method::walks;
  if (m == "cyk") return Method::cyk;
  if (m == "enum") return Method::enumeration;
  throw Failure{kBadArguments, "unknown method '" + m + "'"};
}

inline int member(const Config& c, std::ostream& out) {
  Grammar g = load(c.grammar_path);
  const Symbol a = start_symbol(g, c);
  const Word w = parse_word(g, c.word.value_or(""));
  MembershipOracle oracle(g, a, c.budget);
  auto v = oracle.query(w, parse_method(c.method));
  out << "member (" << to_string(v.method) << "): " << to_string(v.member) << '\n';
  if (const auto* walk = std::get_if<Walk>(&v.witness)) {
    const auto& d = oracle.diagram();
    out << "witness walk: " << to_string(*walk) << '\n';
    if (auto check = is_proper(d, *walk)) out << "structure: " << to_sexpr(*check.witness) << '\n';
    out << "label: " << to_string(walk_label(d, *walk)) << '\n';
  } else if (const auto* tree = std::get_if<ParseTree>(&v.witness)) {
    out << "witness tree: " << to_string(*v.tree_grammar, *tree) << '\n';
  }
  if (!v.note.empty()) out << "note: " << v.note << '\n';
  switch (v.member) {
    case Membership::member: return kOk;
    case Membership::non_member: return kNonMember;
    case Membership::inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

inline int enumerate(const Config& c, std::ostream& out) {
  Grammar g = load(c.grammar_path);
  Language words;
  try {
    words = enumerate_language(g, start_symbol(g, c), c.max_len, c.budget);
  } catch (const BudgetExceeded& e) {
    throw Failure{kInconclusive, e.what()};
  }
  for (const auto& w : words) out << to_string(w) << '\n';
  return kOk;
}

inline int verify(const Config& c, std::ostream& out, std::ostream& err) {
  Grammar g = load(c.grammar_path);
  VerifyOptions options;
  options.grammar_name = c.grammar_path;
  options.max_depth = c.max_depth;
  options.budget = c.budget;
  VerificationReport report;
  try {
    report = verify_walk_correspondence(g, start_symbol(g, c), c.max_len, options);
  } catch (const BudgetExceeded& e) {
    throw Failure{kInconclusive, e.what()};
  }
  for (const auto& d : report.discrepancies) err << "discrepancy: " << d << '\n';
  for (const auto& n : report.notes) err << "note: " << n << '\n';

  int code = kOk;
  if (!report.clean()) {
    out << "DISCREPANCIES: " << report.discrepancies.size();
    code = kDiscrepancy;
  } else if (!report.complete()) {
    out << "inconclusive: " << report.inconclusive() << " words undecided";
    code = kInconclusive;
  } else {
    out << "clean";
  }
  out << ": " << report.rows.size() << " words checked, " << report.in_language()
      << " in language\n";
  out << "parse trees checked: " << report.trees_checked
      << ", proper walks checked: " << report.walks_checked << '\n';
  if (c.output) write_output(*c.output, report.to_json().dump(2) + "\n");
  return code;
}

}  // namespace detail

// Runs one subcommand. Human-readable results go to `out`, diagnostics to
// `err`; the return value is the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transition diagrams and proper walks for context-free grammars", "cfgraph"};
  app.require_subcommand(1);
  Config c;

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", c.grammar_path, "grammar file")->required();
  };
  auto add_start = [&](CLI::App* sub) {
    sub->add_option("--start", c.start, "start symbol (default: the file's start directive)");
  };

  auto* check = app.add_subcommand("check", "parse and validate a grammar");
  add_file(check);
  add_start(check);

  auto* cnf = app.add_subcommand("cnf", "print an equivalent grammar in Chomsky normal form");
  add_file(cnf);
  add_start(cnf);

  auto* diagram = app.add_subcommand("diagram", "write the transition diagram as DOT");
  add_file(diagram);
  diagram->add_option("--dot", c.output, "output path (default: standard output)");

  auto* member = app.add_subcommand("member", "decide membership of one word");
  add_file(member);
  add_start(member);
  member->add_option("--word", c.word, "space-separated terminal tokens")->required();
  member->add_option("--method", c.method, "walks | cyk | enum")
      ->check(CLI::IsMember({"walks", "cyk", "enum"}));
  member->add_option("--budget", c.budget, "search budget (node expansions)");

  auto* enumerate = app.add_subcommand("enumerate", "list the language up to a length");
  add_file(enumerate);
  add_start(enumerate);
  enumerate->add_option("--max-len", c.max_len, "maximum word length");
  enumerate->add_option("--budget", c.budget, "sentential-form cap");

  auto* verify = app.add_subcommand("verify", "check derivations against proper walks exhaustively");
  add_file(verify);
  add_start(verify);
  verify->add_option("--max-len", c.max_len, "maximum word length");
  verify->add_option("--max-depth", c.max_depth, "depth bound for tree/walk enumeration");
  verify->add_option("--budget", c.budget, "work cap per enumeration");
  verify->add_option("--report", c.output, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kBadArguments;
  }

  try {
    if (check->parsed()) return detail::check(c, out, err);
    if (cnf->parsed()) return detail::cnf(c, out);
    if (diagram->parsed()) return detail::diagram(c, out);
    if (member->parsed()) return detail::member(c, out);
    if (enumerate->parsed()) return detail::enumerate(c, out);
    if (verify->parsed()) return detail::verify(c, out, err);
  } catch (const detail::Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  }
  return kBadArguments;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cfgraph"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cfgraph::cli
