#include "dynpol/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dynpol {

namespace {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= src_.size()) {
      current_ = {Token::Kind::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      current_ = {Token::Kind::Ident, id, current_.line, current_.column};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        num += src_[pos_];
        bump();
      }
      current_ = {Token::Kind::Number, num, current_.line, current_.column};
      return;
    }
    // multi-char symbols: -> := ..
    static const char* two_char[] = {"->", ":=", ".."};
    for (const char* s : two_char) {
      if (src_.compare(pos_, 2, s) == 0) {
        current_ = {Token::Kind::Symbol, s, current_.line, current_.column};
        bump();
        bump();
        return;
      }
    }
    current_ = {Token::Kind::Symbol, std::string(1, c), current_.line,
                current_.column};
    bump();
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (src_.compare(pos_, 2, "//") == 0 || src_.compare(pos_, 1, "#") == 0) {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"labels", "locks",  "vars",   "domain",
                             "flows",  "attacker", "plabel", "caps",
                             "allow",  "revoke", "open",   "close",
                             "skip",   "if",     "else",   "while",
                             "declassify", "xor"};
  for (const char* k : kw)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Program parse() {
    parse_header();
    prog_.body = parse_commands();
    if (lex_.peek().kind != Token::Kind::End) fail("trailing input");
    if (!prog_.body) prog_.body = Command::skip();
    return prog_;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw ParseError(msg, t.line, t.column);
  }

  bool at_symbol(const std::string& s) {
    return lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == s;
  }

  bool at_ident(const std::string& s) {
    return lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == s;
  }

  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) fail("expected '" + s + "'");
    lex_.next();
  }

  void expect_ident(const std::string& s) {
    if (!at_ident(s)) fail("expected '" + s + "'");
    lex_.next();
  }

  std::string ident() {
    if (lex_.peek().kind != Token::Kind::Ident) fail("expected identifier");
    return lex_.next().text;
  }

  Value number() {
    if (lex_.peek().kind != Token::Kind::Number) fail("expected number");
    return static_cast<Value>(std::stol(lex_.next().text));
  }

  std::string declared_label() {
    const Token& t = lex_.peek();
    std::string name = ident();
    if (!prog_.has_label(name))
      throw ParseError("undeclared label '" + name + "'", t.line, t.column);
    return name;
  }

  std::string declared_lock() {
    const Token& t = lex_.peek();
    std::string name = ident();
    if (!prog_.has_lock(name))
      throw ParseError("undeclared lock '" + name + "'", t.line, t.column);
    return name;
  }

  std::string declared_var() {
    const Token& t = lex_.peek();
    std::string name = ident();
    if (prog_.var_index(name) < 0)
      throw ParseError("undeclared variable '" + name + "'", t.line, t.column);
    return name;
  }

  void parse_header() {
    for (;;) {
      if (at_ident("labels")) {
        lex_.next();
        do {
          const Token& t = lex_.peek();
          std::string name = ident();
          if (prog_.has_label(name))
            throw ParseError("duplicate label '" + name + "'", t.line,
                             t.column);
          prog_.labels.push_back(name);
        } while (eat_comma());
        expect_symbol(";");
      } else if (at_ident("locks")) {
        lex_.next();
        do {
          const Token& t = lex_.peek();
          std::string name = ident();
          if (prog_.has_lock(name))
            throw ParseError("duplicate lock '" + name + "'", t.line, t.column);
          prog_.locks.push_back(name);
        } while (eat_comma());
        expect_symbol(";");
      } else if (at_ident("vars")) {
        lex_.next();
        do {
          const Token& t = lex_.peek();
          std::string name = ident();
          if (prog_.var_index(name) >= 0)
            throw ParseError("duplicate variable '" + name + "'", t.line,
                             t.column);
          expect_symbol(":");
          std::string label = declared_label();
          prog_.vars.push_back({name, label});
        } while (eat_comma());
        expect_symbol(";");
      } else if (at_ident("domain")) {
        lex_.next();
        Value lo = number();
        expect_symbol("..");
        Value hi = number();
        if (hi < lo) fail("empty domain");
        prog_.domain = {lo, hi};
        expect_symbol(";");
      } else if (at_ident("flows")) {
        lex_.next();
        do {
          std::string from = declared_label();
          expect_symbol("->");
          std::string to = declared_label();
          prog_.initial_policy.flows.insert({from, to});
        } while (eat_comma());
        expect_symbol(";");
      } else if (at_ident("attacker")) {
        lex_.next();
        AttackerSpec spec;
        spec.level = declared_label();
        if (at_ident("caps")) {
          lex_.next();
          expect_symbol("{");
          if (!at_symbol("}")) {
            do {
              spec.caps.insert(declared_lock());
            } while (eat_comma());
          }
          expect_symbol("}");
        }
        prog_.attacker = spec;
        expect_symbol(";");
      } else if (at_ident("plabel")) {
        lex_.next();
        const Token& t = lex_.peek();
        std::string var = declared_var();
        if (prog_.plabels.count(var))
          throw ParseError("duplicate plabel for '" + var + "'", t.line,
                           t.column);
        expect_symbol("=");
        ParalocksLabel label;
        do {
          expect_symbol("{");
          std::string actor = declared_label();
          std::set<std::string> guards;
          if (at_symbol(":")) {
            lex_.next();
            do {
              guards.insert(declared_lock());
            } while (eat_comma());
          }
          expect_symbol("}");
          label.clauses.push_back({actor, guards});
        } while (eat_comma());
        prog_.plabels[var] = label;
        expect_symbol(";");
      } else {
        break;
      }
    }
  }

  bool eat_comma() {
    if (at_symbol(",")) {
      lex_.next();
      return true;
    }
    return false;
  }

  CommandPtr parse_commands() {
    CommandPtr head = parse_command();
    if (at_symbol(";")) {
      lex_.next();
      if (lex_.peek().kind == Token::Kind::End || at_symbol("}"))
        return head;  // trailing separator
      return Command::seq(head, parse_commands());
    }
    return head;
  }

  CommandPtr parse_block() {
    if (at_symbol("{")) {
      lex_.next();
      if (at_symbol("}")) {
        lex_.next();
        return Command::skip();
      }
      CommandPtr c = parse_commands();
      expect_symbol("}");
      return c;
    }
    return parse_command();
  }

  CommandPtr parse_command() {
    if (at_ident("skip")) {
      lex_.next();
      return Command::skip();
    }
    if (at_ident("allow")) {
      lex_.next();
      std::string from = declared_label();
      expect_symbol("->");
      std::string to = declared_label();
      return Command::allow_flow(from, to);
    }
    if (at_ident("revoke")) {
      lex_.next();
      std::string from = declared_label();
      expect_symbol("->");
      std::string to = declared_label();
      return Command::revoke_flow(from, to);
    }
    if (at_ident("open")) {
      lex_.next();
      return Command::open_lock(declared_lock());
    }
    if (at_ident("close")) {
      lex_.next();
      return Command::close_lock(declared_lock());
    }
    if (at_ident("if")) {
      lex_.next();
      ExprPtr cond = parse_expr();
      CommandPtr t = parse_block();
      CommandPtr e;
      if (at_ident("else")) {
        lex_.next();
        e = parse_block();
      }
      return Command::if_then_else(cond, t, e);
    }
    if (at_ident("while")) {
      lex_.next();
      ExprPtr cond = parse_expr();
      CommandPtr body = parse_block();
      return Command::while_loop(cond, body);
    }
    if (lex_.peek().kind == Token::Kind::Ident &&
        !is_keyword(lex_.peek().text)) {
      std::string target = declared_var();
      expect_symbol(":=");
      ExprPtr rhs = parse_expr();
      return Command::assign(target, rhs);
    }
    fail("expected command");
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_add();
    if (at_symbol("=") || at_symbol("<")) {
      std::string op = lex_.next().text;
      ExprPtr rhs = parse_add();
      return Expr::binary(op == "=" ? BinOp::Eq : BinOp::Lt, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    for (;;) {
      BinOp op;
      if (at_symbol("+")) op = BinOp::Add;
      else if (at_symbol("-")) op = BinOp::Sub;
      else if (at_ident("xor")) op = BinOp::Xor;
      else break;
      lex_.next();
      lhs = Expr::binary(op, lhs, parse_mul());
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_atom();
    while (at_symbol("*")) {
      lex_.next();
      lhs = Expr::binary(BinOp::Mul, lhs, parse_atom());
    }
    return lhs;
  }

  ExprPtr parse_atom() {
    if (lex_.peek().kind == Token::Kind::Number)
      return Expr::constant(number());
    if (at_symbol("(")) {
      lex_.next();
      ExprPtr e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (at_ident("flows")) {
      lex_.next();
      expect_symbol("(");
      std::string from = declared_label();
      expect_symbol(",");
      std::string to = declared_label();
      expect_symbol(")");
      return Expr::flows_query(from, to);
    }
    if (at_ident("declassify")) {
      const Token& t = lex_.peek();
      lex_.next();
      expect_symbol("(");
      ExprPtr inner = parse_expr();
      expect_symbol(")");
      if (contains_declassify(*inner))
        throw ParseError("nested declassify", t.line, t.column);
      return Expr::declassify(inner);
    }
    if (lex_.peek().kind == Token::Kind::Ident &&
        !is_keyword(lex_.peek().text))
      return Expr::var(declared_var());
    fail("expected expression");
  }

  Lexer lex_;
  Program prog_;
};

}  // namespace

Program parse_program(const std::string& source) {
  return Parser(source).parse();
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

}  // namespace dynpol
