#include "dynpol/printer.hpp"

#include <sstream>

namespace dynpol {

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Eq:
    case BinOp::Lt:
      return 1;
    case BinOp::Add:
    case BinOp::Sub:
    case BinOp::Xor:
      return 2;
    case BinOp::Mul:
      return 3;
  }
  return 0;
}

// `min_prec`: parenthesise when the node binds looser than the context.
void print_expr_prec(const Expr& e, int min_prec, std::ostream& out) {
  switch (e.kind) {
    case Expr::Kind::Const:
      out << e.value;
      break;
    case Expr::Kind::Var:
      out << e.name;
      break;
    case Expr::Kind::FlowsQuery:
      out << "flows(" << e.from << ", " << e.to << ")";
      break;
    case Expr::Kind::Declassify:
      out << "declassify(";
      print_expr_prec(*e.inner, 0, out);
      out << ")";
      break;
    case Expr::Kind::Binary: {
      int prec = precedence(e.op);
      bool parens = prec < min_prec;
      if (parens) out << "(";
      // comparisons are non-associative; +,-,xor,* associate left
      int lhs_min = (prec == 1) ? prec + 1 : prec;
      print_expr_prec(*e.lhs, lhs_min, out);
      out << " " << binop_name(e.op) << " ";
      print_expr_prec(*e.rhs, prec + 1, out);
      if (parens) out << ")";
      break;
    }
  }
}

void indent_to(std::ostream& out, int n) {
  for (int i = 0; i < n; ++i) out << "  ";
}

void print_command_rec(const Command& c, int indent, std::ostream& out);

void print_block(const Command& c, int indent, std::ostream& out) {
  out << "{\n";
  print_command_rec(c, indent + 1, out);
  out << "\n";
  indent_to(out, indent);
  out << "}";
}

void print_command_rec(const Command& c, int indent, std::ostream& out) {
  switch (c.kind) {
    case Command::Kind::Seq:
      print_command_rec(*c.first, indent, out);
      out << ";\n";
      print_command_rec(*c.second, indent, out);
      return;
    case Command::Kind::Skip:
      indent_to(out, indent);
      out << "skip";
      return;
    case Command::Kind::Assign:
      indent_to(out, indent);
      out << c.target << " := " << print_expr(*c.expr);
      return;
    case Command::Kind::If:
      indent_to(out, indent);
      out << "if " << print_expr(*c.expr) << " ";
      print_block(*c.then_branch, indent, out);
      if (c.else_branch) {
        out << " else ";
        print_block(*c.else_branch, indent, out);
      }
      return;
    case Command::Kind::While:
      indent_to(out, indent);
      out << "while " << print_expr(*c.expr) << " ";
      print_block(*c.body, indent, out);
      return;
    case Command::Kind::AllowFlow:
      indent_to(out, indent);
      out << "allow " << c.from << " -> " << c.to;
      return;
    case Command::Kind::RevokeFlow:
      indent_to(out, indent);
      out << "revoke " << c.from << " -> " << c.to;
      return;
    case Command::Kind::OpenLock:
      indent_to(out, indent);
      out << "open " << c.lock;
      return;
    case Command::Kind::CloseLock:
      indent_to(out, indent);
      out << "close " << c.lock;
      return;
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  print_expr_prec(e, 0, out);
  return out.str();
}

std::string print_command(const Command& c, int indent) {
  std::ostringstream out;
  print_command_rec(c, indent, out);
  return out.str();
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  if (!p.labels.empty()) {
    out << "labels ";
    for (std::size_t i = 0; i < p.labels.size(); ++i)
      out << (i ? ", " : "") << p.labels[i];
    out << ";\n";
  }
  if (!p.locks.empty()) {
    out << "locks ";
    for (std::size_t i = 0; i < p.locks.size(); ++i)
      out << (i ? ", " : "") << p.locks[i];
    out << ";\n";
  }
  if (!p.vars.empty()) {
    out << "vars ";
    for (std::size_t i = 0; i < p.vars.size(); ++i)
      out << (i ? ", " : "") << p.vars[i].name << ":" << p.vars[i].label;
    out << ";\n";
  }
  out << "domain " << p.domain.lo << ".." << p.domain.hi << ";\n";
  for (const auto& [from, to] : p.initial_policy.flows)
    out << "flows " << from << " -> " << to << ";\n";
  if (p.attacker) {
    out << "attacker " << p.attacker->level;
    if (!p.attacker->caps.empty()) {
      out << " caps {";
      bool first = true;
      for (const auto& l : p.attacker->caps) {
        out << (first ? "" : ", ") << l;
        first = false;
      }
      out << "}";
    }
    out << ";\n";
  }
  for (const auto& [var, label] : p.plabels) {
    out << "plabel " << var << " =";
    for (std::size_t i = 0; i < label.clauses.size(); ++i) {
      out << (i ? ", " : " ") << "{" << label.clauses[i].first;
      if (!label.clauses[i].second.empty()) {
        out << ": ";
        bool first = true;
        for (const auto& l : label.clauses[i].second) {
          out << (first ? "" : ", ") << l;
          first = false;
        }
      }
      out << "}";
    }
    out << ";\n";
  }
  out << print_command(*p.body, 0) << "\n";
  return out.str();
}

bool same_expr(const Expr& a, const Expr& b) {
  return print_expr(a) == print_expr(b);
}

bool same_command(const Command& a, const Command& b) {
  return print_command(a) == print_command(b);
}

bool same_program(const Program& a, const Program& b) {
  return print_program(a) == print_program(b);
}

}  // namespace dynpol
