#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "cfpq/grammar.hpp"

namespace cfpq {

GrammarError::GrammarError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

Regex Regex::sym(Symbol s) {
  Regex r;
  r.kind = Kind::Sym;
  r.symbol = std::move(s);
  return r;
}

Regex Regex::concat(std::vector<Regex> parts) {
  if (parts.empty()) return epsilon();
  if (parts.size() == 1) return std::move(parts.front());
  Regex r;
  r.kind = Kind::Concat;
  r.children = std::move(parts);
  return r;
}

Regex Regex::alt(std::vector<Regex> branches) {
  if (branches.empty()) return epsilon();
  if (branches.size() == 1) return std::move(branches.front());
  Regex r;
  r.kind = Kind::Union;
  r.children = std::move(branches);
  return r;
}

namespace {

Regex unary(Regex::Kind kind, Regex child) {
  Regex r;
  r.kind = kind;
  r.children.push_back(std::move(child));
  return r;
}

}  // namespace

Regex Regex::star(Regex child) { return unary(Kind::Star, std::move(child)); }
Regex Regex::plus(Regex child) { return unary(Kind::Plus, std::move(child)); }
Regex Regex::optional(Regex child) { return unary(Kind::Optional, std::move(child)); }

const EbnfProduction* EbnfGrammar::find(std::string_view lhs) const {
  for (const auto& p : productions) {
    if (p.lhs == lhs) return &p;
  }
  return nullptr;
}

std::vector<std::string> BnfGrammar::nonterminals() const {
  std::vector<std::string> out;
  for (const auto& p : productions) {
    if (std::find(out.begin(), out.end(), p.lhs) == out.end()) out.push_back(p.lhs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexing and parsing

namespace {

bool is_meta(char c) {
  return c == '(' || c == ')' || c == '|' || c == '*' || c == '+' || c == '?' || c == '\'';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_nonterminal_name(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front())) != 0;
}

bool is_bare_token(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) { return is_space(c) || is_meta(c); });
}

struct Token {
  enum class Kind { LParen, RParen, Bar, Star, Plus, Question, Bare, Quoted, End };
  Kind kind;
  std::string text;
  std::size_t column;  // 1-based
};

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (is_space(c)) {
        ++i;
        continue;
      }
      const std::size_t col = i + 1;
      switch (c) {
        case '(': out.push_back({Token::Kind::LParen, "(", col}); ++i; continue;
        case ')': out.push_back({Token::Kind::RParen, ")", col}); ++i; continue;
        case '|': out.push_back({Token::Kind::Bar, "|", col}); ++i; continue;
        case '*': out.push_back({Token::Kind::Star, "*", col}); ++i; continue;
        case '+': out.push_back({Token::Kind::Plus, "+", col}); ++i; continue;
        case '?': out.push_back({Token::Kind::Question, "?", col}); ++i; continue;
        default: break;
      }
      if (c == '\'') {
        std::string value;
        ++i;
        bool closed = false;
        while (i < text_.size()) {
          char d = text_[i++];
          if (d == '\\' && i < text_.size()) {
            value.push_back(text_[i++]);
          } else if (d == '\'') {
            closed = true;
            break;
          } else {
            value.push_back(d);
          }
        }
        if (!closed) throw GrammarError(line_, col, "unterminated quoted terminal");
        if (value.empty()) throw GrammarError(line_, col, "empty quoted terminal");
        out.push_back({Token::Kind::Quoted, std::move(value), col});
        continue;
      }
      std::size_t j = i;
      while (j < text_.size() && !is_space(text_[j]) && !is_meta(text_[j])) ++j;
      out.push_back({Token::Kind::Bare, std::string(text_.substr(i, j - i)), col});
      i = j;
    }
    out.push_back({Token::Kind::End, "", text_.size() + 1});
    return out;
  }

 private:
  std::string_view text_;
  std::size_t line_;
};

struct NonterminalUse {
  std::string name;
  std::size_t line;
  std::size_t column;
};

class RegexParser {
 public:
  RegexParser(std::vector<Token> tokens, std::size_t line, std::size_t column_offset,
              std::vector<NonterminalUse>* uses)
      : tokens_(std::move(tokens)), line_(line), offset_(column_offset), uses_(uses) {}

  Regex parse() {
    Regex r = parse_alt();
    if (peek().kind != Token::Kind::End) fail(peek(), "unexpected `" + peek().text + "`");
    return r;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const Token& at, const std::string& what) const {
    throw GrammarError(line_, at.column + offset_, what);
  }

  Regex parse_alt() {
    std::vector<Regex> branches;
    branches.push_back(parse_seq());
    while (peek().kind == Token::Kind::Bar) {
      next();
      branches.push_back(parse_seq());
    }
    return Regex::alt(std::move(branches));
  }

  bool starts_atom() const {
    auto k = peek().kind;
    return k == Token::Kind::LParen || k == Token::Kind::Bare || k == Token::Kind::Quoted;
  }

  Regex parse_seq() {
    if (!starts_atom()) {
      fail(peek(), peek().kind == Token::Kind::End ? std::string("expected a symbol, got end of line")
                                                   : "expected a symbol, got `" + peek().text + "`");
    }
    std::vector<Regex> parts;
    while (starts_atom()) parts.push_back(parse_postfix());
    return Regex::concat(std::move(parts));
  }

  Regex parse_postfix() {
    Regex r = parse_atom();
    for (;;) {
      switch (peek().kind) {
        case Token::Kind::Star: next(); r = Regex::star(std::move(r)); continue;
        case Token::Kind::Plus: next(); r = Regex::plus(std::move(r)); continue;
        case Token::Kind::Question: next(); r = Regex::optional(std::move(r)); continue;
        default: return r;
      }
    }
  }

  Regex parse_atom() {
    const Token& t = next();
    switch (t.kind) {
      case Token::Kind::LParen: {
        Regex inner = parse_alt();
        if (peek().kind != Token::Kind::RParen) fail(peek(), "expected `)`");
        next();
        return inner;
      }
      case Token::Kind::Quoted:
        return Regex::terminal(t.text);
      case Token::Kind::Bare:
        if (t.text == "eps") return Regex::epsilon();
        if (is_nonterminal_name(t.text)) {
          if (uses_) uses_->push_back({t.text, line_, t.column + offset_});
          return Regex::nonterminal(t.text);
        }
        return Regex::terminal(t.text);
      default:
        fail(t, "unexpected `" + t.text + "`");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t offset_;
  std::vector<NonterminalUse>* uses_;
};

std::vector<Regex> branches_of(Regex r) {
  if (r.kind == Regex::Kind::Union) return std::move(r.children);
  std::vector<Regex> one;
  one.push_back(std::move(r));
  return one;
}

}  // namespace

Regex parse_regex_text(std::string_view text) {
  return RegexParser(Lexer(text, 1).run(), 1, 0, nullptr).parse();
}

EbnfGrammar parse_grammar_text(std::string_view text) {
  EbnfGrammar g;
  std::vector<NonterminalUse> uses;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t arrow = line.find("->", first);
    if (arrow == std::string::npos) throw GrammarError(line_no, first + 1, "expected `Lhs -> regex`");
    std::string_view lhs_view(line);
    lhs_view = lhs_view.substr(first, arrow - first);
    while (!lhs_view.empty() && is_space(lhs_view.back())) lhs_view.remove_suffix(1);
    std::string lhs(lhs_view);
    if (!is_bare_token(lhs) || !is_nonterminal_name(lhs) || lhs == "eps") {
      throw GrammarError(line_no, first + 1,
                         "left-hand side must be a nonterminal (uppercase initial), got `" + lhs +
                             "`");
    }
    std::string_view body = std::string_view(line).substr(arrow + 2);
    Regex rhs = RegexParser(Lexer(body, line_no).run(), line_no, arrow + 2, &uses).parse();
    if (g.start.empty()) g.start = lhs;
    auto it = std::find_if(g.productions.begin(), g.productions.end(),
                           [&](const EbnfProduction& p) { return p.lhs == lhs; });
    if (it == g.productions.end()) {
      g.productions.push_back({lhs, std::move(rhs)});
    } else {
      auto merged = branches_of(std::move(it->rhs));
      for (Regex& b : branches_of(std::move(rhs))) merged.push_back(std::move(b));
      it->rhs = Regex::alt(std::move(merged));
    }
  }
  if (g.productions.empty()) throw GrammarError(line_no == 0 ? 1 : line_no, 1, "empty grammar");
  for (const auto& use : uses) {
    if (!g.find(use.name)) {
      throw GrammarError(use.line, use.column, "undefined nonterminal `" + use.name + "`");
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_nonterminals(const Regex& r, std::vector<std::string>& out) {
  if (r.kind == Regex::Kind::Sym && r.symbol.is_nonterminal()) {
    if (std::find(out.begin(), out.end(), r.symbol.name) == out.end()) out.push_back(r.symbol.name);
  }
  for (const Regex& c : r.children) collect_nonterminals(c, out);
}

bool well_formed(const Regex& r) {
  switch (r.kind) {
    case Regex::Kind::Epsilon:
      return r.children.empty();
    case Regex::Kind::Sym:
      return r.children.empty() && !r.symbol.name.empty();
    case Regex::Kind::Concat:
    case Regex::Kind::Union:
      if (r.children.size() < 2) return false;
      break;
    case Regex::Kind::Star:
    case Regex::Kind::Plus:
    case Regex::Kind::Optional:
      if (r.children.size() != 1) return false;
      break;
  }
  return std::all_of(r.children.begin(), r.children.end(), well_formed);
}

}  // namespace

std::vector<Diagnostic> validate(const EbnfGrammar& g) {
  std::vector<Diagnostic> out;
  if (g.start.empty() || !g.find(g.start)) {
    out.push_back({Diagnostic::Kind::MissingStart, g.start,
                   "start nonterminal `" + g.start + "` has no production"});
  }
  std::set<std::string> seen;
  for (const auto& p : g.productions) {
    if (!seen.insert(p.lhs).second) {
      out.push_back({Diagnostic::Kind::DuplicateProduction, p.lhs,
                     "nonterminal `" + p.lhs + "` has more than one production"});
    }
    if (!well_formed(p.rhs)) {
      out.push_back({Diagnostic::Kind::MalformedRegex, p.lhs,
                     "production for `" + p.lhs + "` has a malformed regex"});
    }
  }
  std::vector<std::string> referenced;
  for (const auto& p : g.productions) collect_nonterminals(p.rhs, referenced);
  for (const auto& name : referenced) {
    if (!g.find(name)) {
      out.push_back({Diagnostic::Kind::UndefinedNonterminal, name,
                     "nonterminal `" + name + "` is used but never defined"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string symbol_text(const Symbol& s) {
  if (s.is_nonterminal()) return s.name;
  if (is_bare_token(s.name) && !is_nonterminal_name(s.name) && s.name != "eps") return s.name;
  std::string out = "'";
  for (char c : s.name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

// precedence: 0 = union, 1 = concat, 2 = postfix operand
void print(const Regex& r, int context, std::string& out) {
  auto wrap = [&](int own, auto&& body) {
    const bool parens = own < context;
    if (parens) out.push_back('(');
    body();
    if (parens) out.push_back(')');
  };
  switch (r.kind) {
    case Regex::Kind::Epsilon:
      out += "eps";
      return;
    case Regex::Kind::Sym:
      out += symbol_text(r.symbol);
      return;
    case Regex::Kind::Union:
      wrap(0, [&] {
        for (std::size_t i = 0; i < r.children.size(); ++i) {
          if (i) out += " | ";
          print(r.children[i], 1, out);
        }
      });
      return;
    case Regex::Kind::Concat:
      wrap(1, [&] {
        for (std::size_t i = 0; i < r.children.size(); ++i) {
          if (i) out.push_back(' ');
          print(r.children[i], 2, out);
        }
      });
      return;
    case Regex::Kind::Star:
    case Regex::Kind::Plus:
    case Regex::Kind::Optional:
      print(r.children.front(), 2, out);
      out.push_back(r.kind == Regex::Kind::Star ? '*' : r.kind == Regex::Kind::Plus ? '+' : '?');
      return;
  }
}

}  // namespace

std::string to_text(const Regex& r) {
  std::string out;
  print(r, 0, out);
  return out;
}

std::string to_text(const EbnfGrammar& g) {
  std::string out;
  auto emit = [&](const EbnfProduction& p) { out += p.lhs + " -> " + to_text(p.rhs) + "\n"; };
  if (const auto* s = g.find(g.start)) emit(*s);
  for (const auto& p : g.productions) {
    if (p.lhs != g.start) emit(p);
  }
  return out;
}

std::string to_text(const BnfGrammar& g) {
  std::string out;
  auto emit = [&](const BnfProduction& p) {
    out += p.lhs + " ->";
    if (p.rhs.empty()) out += " eps";
    for (const Symbol& s : p.rhs) out += " " + symbol_text(s);
    out += "\n";
  };
  for (const auto& p : g.productions) {
    if (p.lhs == g.start) emit(p);
  }
  for (const auto& p : g.productions) {
    if (p.lhs != g.start) emit(p);
  }
  return out;
}

namespace {

void collect_terminals(const Regex& r, std::vector<std::string>& out) {
  if (r.kind == Regex::Kind::Sym && r.symbol.is_terminal()) {
    if (std::find(out.begin(), out.end(), r.symbol.name) == out.end()) out.push_back(r.symbol.name);
  }
  for (const Regex& c : r.children) collect_terminals(c, out);
}

}  // namespace

std::vector<std::string> terminals_of(const Regex& r) {
  std::vector<std::string> out;
  collect_terminals(r, out);
  return out;
}

std::vector<std::string> terminals_of(const EbnfGrammar& g) {
  std::vector<std::string> out;
  for (const auto& p : g.productions) collect_terminals(p.rhs, out);
  return out;
}

EbnfGrammar single_rule_grammar(Regex r, std::string start) {
  EbnfGrammar g;
  g.start = start;
  g.productions.push_back({std::move(start), std::move(r)});
  return g;
}

}  // namespace cfpq
