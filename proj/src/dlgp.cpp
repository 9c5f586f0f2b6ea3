#include "ucqrew/dlgp.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ucqrew::dlgp {

bool Statement::operator==(const Statement& o) const {
  return kind == o.kind && label == o.label && facts == o.facts && rule == o.rule &&
         query == o.query;
}

KnowledgeBase Document::kb() const {
  KnowledgeBase kb;
  std::vector<Atom> facts;
  for (const auto& s : statements) {
    if (s.kind == Statement::Kind::Fact)
      facts.insert(facts.end(), s.facts.begin(), s.facts.end());
    else if (s.kind != Statement::Kind::Query)
      kb.rules.push_back(s.rule);
  }
  kb.facts = Csf(std::move(facts));
  return kb;
}

Ucq Document::queries() const {
  Ucq u;
  for (const auto& s : statements)
    if (s.kind == Statement::Kind::Query) u.cqs.push_back(s.query);
  return u;
}

namespace {

bool is_lower(unsigned char c) { return (c >= 'a' && c <= 'z') || c >= 0x80; }
bool is_upper(unsigned char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_name_char(unsigned char c) { return is_lower(c) || is_upper(c) || is_digit(c); }

enum class Tok {
  Ident, Var, String, Iri, Number, Prefixed,
  LParen, RParen, LBracket, RBracket, Comma, Dot, Implies, Bang, Question, Minus,
  Directive, End, Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
};

struct SyntaxError {
  std::size_t line;
  std::size_t column;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!has_peek_) {
      peeked_ = scan();
      has_peek_ = true;
    }
    return peeked_;
  }

  Token next() {
    Token t = peek();
    has_peek_ = false;
    last_kind_ = t.kind;
    ++consumed_;
    return t;
  }

  Tok last_kind() const { return last_kind_; }
  std::size_t consumed() const { return consumed_; }

  // Raw text of a bracket group starting at the peeked '[', or nullopt when unterminated.
  // Reports whether the group is followed by ":-".
  std::optional<std::pair<std::string, bool>> bracket_group() {
    const Token& open = peek();
    std::size_t close = src_.find(']', open.offset + 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::size_t k = close + 1;
    skip_blank_from(k);
    bool implies = k + 1 < src_.size() && src_[k] == ':' && src_[k + 1] == '-';
    return std::pair{std::string(src_.substr(open.offset + 1, close - open.offset - 1)), implies};
  }

  // Consumes the peeked '[' and everything up to the matching ']'.
  void consume_bracket_group() {
    std::size_t close = src_.find(']', peek().offset + 1);
    has_peek_ = false;
    last_kind_ = Tok::RBracket;
    ++consumed_;
    while (pos_ <= close) advance();
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank_from(std::size_t& k) const {
    while (k < src_.size()) {
      unsigned char c = src_[k];
      if (c == '%') {
        while (k < src_.size() && src_[k] != '\n') ++k;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        ++k;
      } else {
        break;
      }
    }
  }

  void skip_blank() {
    std::size_t k = pos_;
    skip_blank_from(k);
    while (pos_ < k) advance();
  }

  Token scan() {
    skip_blank();
    Token t;
    t.line = line_;
    t.column = col_;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    const std::size_t start = pos_;
    const unsigned char c = src_[pos_];
    auto single = [&](Tok k) {
      advance();
      t.kind = k;
      t.text = std::string(1, static_cast<char>(c));
      return t;
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ',': return single(Tok::Comma);
      case '.': return single(Tok::Dot);
      case '!': return single(Tok::Bang);
      case '?': return single(Tok::Question);
      case '-': return single(Tok::Minus);
      default: break;
    }
    if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
      advance();
      advance();
      t.kind = Tok::Implies;
      t.text = ":-";
      return t;
    }
    if (c == '"') {
      advance();
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
        advance();
      }
      if (pos_ >= src_.size()) return bad(t, start, "unterminated string");
      advance();
      t.kind = Tok::String;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '<') {
      advance();
      while (pos_ < src_.size() && src_[pos_] != '>' && src_[pos_] != '\n' && src_[pos_] != ' ')
        advance();
      if (pos_ >= src_.size() || src_[pos_] != '>') return bad(t, start, "unterminated IRI");
      advance();
      t.kind = Tok::Iri;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '@') {
      advance();
      while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
      t.kind = Tok::Directive;
      t.text = std::string(src_.substr(start + 1, pos_ - start - 1));
      return t;
    }
    if (is_digit(c)) {
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
        advance();
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      }
      t.kind = Tok::Number;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (is_name_char(c) || c == ':') {
      while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
      // prefix:local, where ':' is not the start of ":-".
      if (pos_ < src_.size() && src_[pos_] == ':' &&
          (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '-')) {
        if (!is_lower(c) && c != ':') return bad_prefix(t, start);
        advance();
        while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
        t.kind = Tok::Prefixed;
        t.text = std::string(src_.substr(start, pos_ - start));
        return t;
      }
      if (c == ':') return bad(t, start, "unexpected ':'");
      t.kind = is_upper(c) ? Tok::Var : Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    advance();
    return bad(t, start, "unexpected character");
  }

  Token bad(Token t, std::size_t start, const char* what) {
    if (pos_ == start) advance();
    t.kind = Tok::Bad;
    t.text = what;
    return t;
  }

  Token bad_prefix(Token t, std::size_t start) {
    return bad(t, start, "prefix names must start with a lowercase letter");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token peeked_;
  bool has_peek_ = false;
  Tok last_kind_ = Tok::End;
  std::size_t consumed_ = 0;
};

const char* describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Var: return "variable";
    case Tok::String: return "string";
    case Tok::Iri: return "IRI";
    case Tok::Number: return "number";
    case Tok::Prefixed: return "prefixed name";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Implies: return "':-'";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::Minus: return "'-'";
    case Tok::Directive: return "directive";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid token";
  }
  return "token";
}

struct Positioned {
  Atom atom;
  bool negative = false;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  ParseResult run() {
    while (lex_.peek().kind != Tok::End) {
      const std::size_t start = lex_.consumed();
      try {
        if (lex_.peek().kind == Tok::Directive)
          directive();
        else
          statement();
      } catch (const SyntaxError& e) {
        out_.diagnostics.push_back({e.line, e.column, e.message});
        // A statement whose closing '.' was already read needs no skipping.
        if (lex_.consumed() == start || lex_.last_kind() != Tok::Dot) recover();
      }
    }
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const Token& t, std::string msg) {
    if (t.kind == Tok::Bad) msg = t.text;
    throw SyntaxError{t.line, t.column, std::move(msg)};
  }

  Token expect(Tok k, const char* context) {
    Token t = lex_.next();
    if (t.kind != k)
      fail(t, std::string("expected ") + describe(k) + " " + context + ", found " +
                  describe(t.kind));
    return t;
  }

  void recover() {
    for (;;) {
      Token t = lex_.next();
      if (t.kind == Tok::Dot || t.kind == Tok::End) return;
      if (lex_.peek().kind == Tok::Directive) return;
    }
  }

  void directive() {
    Token d = lex_.next();
    if (d.text == "base") {
      Token iri = expect(Tok::Iri, "after @base");
      out_.document.base = iri.text;
    } else if (d.text == "prefix") {
      Token name = lex_.next();
      std::string prefix;
      if (name.kind == Tok::Prefixed && name.text.back() == ':') {
        prefix = name.text.substr(0, name.text.size() - 1);
      } else if (name.kind == Tok::Prefixed) {
        fail(name, "prefix declaration must end with ':'");
      } else {
        fail(name, "expected prefix name after @prefix");
      }
      Token iri = expect(Tok::Iri, "after prefix name");
      prefixes_[prefix] = iri.text.substr(1, iri.text.size() - 2);
      out_.document.prefixes.emplace_back(prefix, iri.text);
    } else if (d.text == "una") {
      out_.document.una = true;
    } else if (d.text != "facts" && d.text != "rules" && d.text != "constraints" &&
               d.text != "queries") {
      fail(d, "unknown directive @" + d.text);
    }
  }

  std::string expand(const Token& t) {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail(t, "undeclared prefix '" + prefix + "'");
    return "<" + it->second + t.text.substr(colon + 1) + ">";
  }

  Term term() {
    Token t = lex_.next();
    switch (t.kind) {
      case Tok::Var: return Term::variable(t.text);
      case Tok::Ident:
      case Tok::String:
      case Tok::Iri:
      case Tok::Number: return Term::constant(t.text);
      case Tok::Prefixed: return Term::constant(expand(t));
      default: fail(t, std::string("expected a term, found ") + describe(t.kind));
    }
  }

  Positioned atom() {
    Token p = lex_.next();
    Positioned out;
    out.line = p.line;
    out.column = p.column;
    switch (p.kind) {
      case Tok::Ident:
      case Tok::String:
      case Tok::Iri: out.atom.predicate = p.text; break;
      case Tok::Prefixed: out.atom.predicate = expand(p); break;
      case Tok::LBracket: fail(p, "disjunction is only allowed in rule heads");
      case Tok::Var: fail(p, "predicate names must not start with an uppercase letter");
      default: fail(p, std::string("expected an atom, found ") + describe(p.kind));
    }
    if (lex_.peek().kind == Tok::LParen) {
      lex_.next();
      if (lex_.peek().kind != Tok::RParen) {
        out.atom.args.push_back(term());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          out.atom.args.push_back(term());
        }
      }
      expect(Tok::RParen, "to close the argument list");
    }
    return out;
  }

  Positioned literal(bool negation_allowed) {
    if (lex_.peek().kind == Tok::Minus) {
      Token m = lex_.next();
      if (!negation_allowed) fail(m, "negation is only allowed in query bodies");
      Positioned a = atom();
      a.negative = true;
      return a;
    }
    return atom();
  }

  std::vector<Positioned> literals(bool negation_allowed) {
    std::vector<Positioned> out{literal(negation_allowed)};
    while (lex_.peek().kind == Tok::Comma) {
      lex_.next();
      out.push_back(literal(negation_allowed));
    }
    return out;
  }

  std::vector<Csf> disjunctive_head() {
    expect(Tok::LBracket, "to open a disjunctive head");
    std::vector<Csf> disjuncts;
    for (;;) {
      std::vector<Positioned> atoms;
      if (lex_.peek().kind == Tok::LParen) {
        lex_.next();
        atoms = literals(false);
        expect(Tok::RParen, "to close a head conjunction");
      } else {
        atoms.push_back(atom());
      }
      check_arities(atoms);
      disjuncts.push_back(to_csf(atoms));
      if (lex_.peek().kind != Tok::Comma) break;
      lex_.next();
    }
    expect(Tok::RBracket, "to close the disjunctive head");
    return disjuncts;
  }

  static Csf to_csf(const std::vector<Positioned>& atoms) {
    std::vector<Atom> out;
    for (const auto& a : atoms) out.push_back(a.atom);
    return Csf(std::move(out));
  }

  void check_arities(const std::vector<Positioned>& atoms) {
    for (const auto& a : atoms) {
      auto [it, fresh] = arities_.emplace(a.atom.predicate, a.atom.arity());
      if (!fresh && it->second != a.atom.arity())
        throw SyntaxError{a.line, a.column,
                          "predicate '" + a.atom.predicate + "' used with arity " +
                              std::to_string(a.atom.arity()) + " but earlier with arity " +
                              std::to_string(it->second)};
    }
  }

  std::optional<std::string> label() {
    if (lex_.peek().kind != Tok::LBracket) return std::nullopt;
    auto group = lex_.bracket_group();
    if (!group) fail(lex_.peek(), "unterminated '['");
    if (group->second) return std::nullopt;  // a disjunctive head, not a label
    lex_.consume_bracket_group();
    return group->first;
  }

  void statement() {
    const Token& first = lex_.peek();
    Statement s;
    s.line = first.line;
    s.column = first.column;
    s.label = label();

    // Arity checks are staged so a failing statement leaves no trace.
    auto saved_arities = arities_;
    try {
      statement_body(s);
    } catch (...) {
      arities_ = std::move(saved_arities);
      throw;
    }
    out_.document.statements.push_back(std::move(s));
  }

  void statement_body(Statement& s) {
    const Token start = lex_.peek();
    switch (start.kind) {
      case Tok::Bang: {
        lex_.next();
        expect(Tok::Implies, "after '!'");
        auto body = literals(false);
        check_arities(body);
        expect(Tok::Dot, "to end the constraint");
        s.kind = Statement::Kind::Constraint;
        s.rule.label = s.label;
        s.rule.body = to_csf(body);
        return;
      }
      case Tok::Question: {
        lex_.next();
        std::vector<std::pair<std::string, Token>> answers;
        if (lex_.peek().kind == Tok::LParen) {
          lex_.next();
          if (lex_.peek().kind != Tok::RParen) {
            for (;;) {
              Token v = lex_.next();
              if (v.kind != Tok::Var) fail(v, "answer variables must be variables");
              answers.emplace_back(v.text, v);
              if (lex_.peek().kind != Tok::Comma) break;
              lex_.next();
            }
          }
          expect(Tok::RParen, "to close the answer variables");
        }
        expect(Tok::Implies, "after the query head");
        auto body = literals(true);
        check_arities(body);
        expect(Tok::Dot, "to end the query");
        std::vector<Atom> pos, neg;
        for (const auto& l : body) (l.negative ? neg : pos).push_back(l.atom);
        s.kind = Statement::Kind::Query;
        s.query.label = s.label;
        s.query.positives = Csf(std::move(pos));
        s.query.negatives = Csf(std::move(neg));
        VarSet bound = s.query.positives.vars();
        for (const auto& [name, tok] : answers) {
          if (!bound.contains(name))
            fail(tok, "answer variable " + name + " does not occur in a positive atom");
          if (std::find(s.query.answer_vars.begin(), s.query.answer_vars.end(), name) ==
              s.query.answer_vars.end())
            s.query.answer_vars.push_back(name);
        }
        if (s.query.positives.empty())
          fail(start, "a query needs at least one positive atom");
        return;
      }
      case Tok::LBracket: {
        auto group = lex_.bracket_group();
        if (!group) fail(start, "unterminated '['");
        auto head = disjunctive_head();
        expect(Tok::Implies, "after the rule head");
        auto body = literals(false);
        check_arities(body);
        expect(Tok::Dot, "to end the rule");
        s.kind = Statement::Kind::Rule;
        s.rule.label = s.label;
        s.rule.body = to_csf(body);
        s.rule.head = Dsf(std::move(head));
        return;
      }
      case Tok::Dot:
        if (s.label) fail(start, "a bracketed disjunction must be the head of a rule");
        fail(start, "empty statement");
      default: break;
    }
    auto atoms = literals(false);
    check_arities(atoms);
    Token t = lex_.next();
    if (t.kind == Tok::Dot) {
      s.kind = Statement::Kind::Fact;
      s.facts = to_csf(atoms);
      return;
    }
    if (t.kind != Tok::Implies)
      fail(t, std::string("expected ':-' or '.', found ") + describe(t.kind));
    auto body = literals(false);
    check_arities(body);
    expect(Tok::Dot, "to end the rule");
    s.kind = Statement::Kind::Rule;
    s.rule.label = s.label;
    s.rule.body = to_csf(body);
    s.rule.head = Dsf{to_csf(atoms)};
  }

  Lexer lex_;
  ParseResult out_;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, std::size_t> arities_;
};

bool lexically_constant(const std::string& n) {
  if (n.empty()) return false;
  const unsigned char c = n.front();
  if (c == '"') {
    if (n.size() < 2 || n.back() != '"') return false;
    for (std::size_t i = 1; i + 1 < n.size(); ++i) {
      if (n[i] == '\\') {
        if (i + 2 >= n.size()) return false;
        ++i;
      } else if (n[i] == '"') {
        return false;
      }
    }
    return true;
  }
  if (c == '<') {
    if (n.size() < 2 || n.back() != '>') return false;
    return n.find_first_of("> \n", 1) == n.size() - 1;
  }
  if (is_digit(c)) {
    std::size_t i = 0;
    while (i < n.size() && is_digit(n[i])) ++i;
    if (i == n.size()) return true;
    if (n[i] != '.' || i + 1 == n.size()) return false;
    for (++i; i < n.size(); ++i)
      if (!is_digit(n[i])) return false;
    return true;
  }
  if (!is_lower(c)) return false;
  for (unsigned char ch : n)
    if (!is_name_char(ch)) return false;
  return true;
}

std::string quote(const std::string& raw) {
  std::string out = "\"";
  for (char ch : raw) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string term_text(const Term& t) {
  if (t.is_constant()) return lexically_constant(t.name()) ? t.name() : quote(t.name());
  return t.name();
}

std::string atom_text(const Atom& a) {
  std::string out = lexically_constant(a.predicate) && !is_digit(a.predicate.front())
                        ? a.predicate
                        : quote(a.predicate);
  if (a.args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += term_text(a.args[i]);
  }
  return out + ")";
}

std::string conjunction(const Csf& f) {
  std::string out;
  for (const Atom& a : f) {
    if (!out.empty()) out += ", ";
    out += atom_text(a);
  }
  return out;
}

std::string label_text(const std::optional<std::string>& label) {
  return label ? "[" + *label + "] " : "";
}

std::string head_text(const Dsf& head) {
  if (head.size() == 1) return conjunction(head[0]);
  std::string out = "[";
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i) out += ", ";
    out += head[i].size() == 1 ? atom_text(*head[i].begin()) : "(" + conjunction(head[i]) + ")";
  }
  return out + "]";
}

}  // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Term& t) { return term_text(t); }
std::string print(const Atom& a) { return atom_text(a); }

std::string print(const Rule& r) {
  if (r.head.empty()) return label_text(r.label) + "! :- " + conjunction(r.body) + ".";
  return label_text(r.label) + head_text(r.head) + " :- " + conjunction(r.body) + ".";
}

std::string print(const ConjunctiveQueryNeg& q) {
  std::string out = label_text(q.label) + "?";
  if (!q.answer_vars.empty()) {
    out += "(";
    for (std::size_t i = 0; i < q.answer_vars.size(); ++i) {
      if (i) out += ", ";
      out += q.answer_vars[i];
    }
    out += ")";
  }
  out += " :- " + conjunction(q.positives);
  for (const Atom& a : q.negatives) out += ", -" + atom_text(a);
  return out + ".";
}

std::string print_cq(const Csf& atoms, const std::vector<std::string>& answer_vars,
                     const std::optional<std::string>& label) {
  ConjunctiveQueryNeg q;
  q.label = label;
  q.positives = atoms;
  q.answer_vars = answer_vars;
  return print(q);
}

std::string print(const Ucq& ucq) {
  std::string out;
  for (const auto& q : ucq.cqs) out += print(q) + "\n";
  return out;
}

std::string print(const std::vector<Rule>& rules) {
  std::string out;
  for (const auto& r : rules) out += print(r) + "\n";
  return out;
}

std::string print(const Document& doc) {
  std::string out;
  if (doc.base) out += "@base " + *doc.base + "\n";
  for (const auto& [prefix, iri] : doc.prefixes) out += "@prefix " + prefix + ": " + iri + "\n";
  if (doc.una) out += "@una\n";
  for (const auto& s : doc.statements) {
    switch (s.kind) {
      case Statement::Kind::Fact:
        out += label_text(s.label) + conjunction(s.facts) + ".\n";
        break;
      case Statement::Kind::Rule:
      case Statement::Kind::Constraint: out += print(s.rule) + "\n"; break;
      case Statement::Kind::Query: out += print(s.query) + "\n"; break;
    }
  }
  return out;
}

}  // namespace ucqrew::dlgp
