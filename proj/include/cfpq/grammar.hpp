#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfpq {

struct Symbol {
  enum class Kind : std::uint8_t { Terminal, Nonterminal };

  Kind kind = Kind::Terminal;
  std::string name;

  static Symbol terminal(std::string name) { return {Kind::Terminal, std::move(name)}; }
  static Symbol nonterminal(std::string name) { return {Kind::Nonterminal, std::move(name)}; }

  bool is_terminal() const { return kind == Kind::Terminal; }
  bool is_nonterminal() const { return kind == Kind::Nonterminal; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// Regular expression over terminals and nonterminals.
///
/// Concat and Union always hold at least two children; the smart constructors
/// collapse the degenerate cases.
struct Regex {
  enum class Kind : std::uint8_t { Epsilon, Sym, Concat, Union, Star, Plus, Optional };

  Kind kind = Kind::Epsilon;
  Symbol symbol;                 // Sym only
  std::vector<Regex> children;   // Concat/Union: >= 2; Star/Plus/Optional: exactly 1

  static Regex epsilon() { return {}; }
  static Regex sym(Symbol s);
  static Regex terminal(std::string name) { return sym(Symbol::terminal(std::move(name))); }
  static Regex nonterminal(std::string name) { return sym(Symbol::nonterminal(std::move(name))); }
  static Regex concat(std::vector<Regex> parts);
  static Regex alt(std::vector<Regex> branches);
  static Regex star(Regex child);
  static Regex plus(Regex child);
  static Regex optional(Regex child);

  friend bool operator==(const Regex&, const Regex&) = default;
};

struct EbnfProduction {
  std::string lhs;
  Regex rhs;
};

/// One production per nonterminal, in declaration order.
struct EbnfGrammar {
  std::vector<EbnfProduction> productions;
  std::string start;

  const EbnfProduction* find(std::string_view lhs) const;
};

struct BnfProduction {
  std::string lhs;
  std::vector<Symbol> rhs;  // empty = epsilon production

  friend bool operator==(const BnfProduction&, const BnfProduction&) = default;
};

struct BnfGrammar {
  std::vector<BnfProduction> productions;
  std::string start;

  /// Nonterminals in order of first appearance as a left-hand side.
  std::vector<std::string> nonterminals() const;
};

/// Chomsky normal form. Only the start symbol may derive the empty word and the
/// start symbol never appears on a right-hand side.
struct CnfGrammar {
  struct BinaryRule {
    std::uint32_t lhs;
    std::uint32_t left;
    std::uint32_t right;
    friend bool operator==(const BinaryRule&, const BinaryRule&) = default;
    friend auto operator<=>(const BinaryRule&, const BinaryRule&) = default;
  };
  struct TerminalRule {
    std::uint32_t lhs;
    std::string terminal;
    friend bool operator==(const TerminalRule&, const TerminalRule&) = default;
    friend auto operator<=>(const TerminalRule&, const TerminalRule&) = default;
  };

  std::vector<std::string> nonterminals;
  std::uint32_t start = 0;
  bool start_nullable = false;
  std::vector<BinaryRule> binary;
  std::vector<TerminalRule> terminal;

  bool empty_language() const { return !start_nullable && binary.empty() && terminal.empty(); }
};

struct Diagnostic {
  enum class Kind : std::uint8_t {
    MissingStart,
    UndefinedNonterminal,
    DuplicateProduction,
    MalformedRegex
  };
  Kind kind;
  std::string subject;
  std::string message;
};

class GrammarError : public std::runtime_error {
 public:
  GrammarError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses `Lhs -> regex` lines. The first rule's lhs is the start symbol and
/// repeated left-hand sides are folded into one union.
EbnfGrammar parse_grammar_text(std::string_view text);
Regex parse_regex_text(std::string_view text);

std::vector<Diagnostic> validate(const EbnfGrammar& g);

/// Canonical text form; parse_grammar_text(to_text(g)) == g for parsed grammars.
std::string to_text(const Regex& r);
std::string to_text(const EbnfGrammar& g);
std::string to_text(const BnfGrammar& g);

BnfGrammar ebnf_to_bnf(const EbnfGrammar& g);
CnfGrammar to_cnf(const BnfGrammar& g);

/// Terminals in order of first occurrence (pre-order) in the regex.
std::vector<std::string> terminals_of(const Regex& r);
std::vector<std::string> terminals_of(const EbnfGrammar& g);

/// Grammar with a single production `S -> r`.
EbnfGrammar single_rule_grammar(Regex r, std::string start = "S");

/// Applies `rename` to every terminal name, leaving nonterminals alone.
template <class Fn>
void rename_terminals(Regex& r, Fn&& rename) {
  if (r.kind == Regex::Kind::Sym && r.symbol.is_terminal()) r.symbol.name = rename(r.symbol.name);
  for (Regex& c : r.children) rename_terminals(c, rename);
}

}  // namespace cfpq
