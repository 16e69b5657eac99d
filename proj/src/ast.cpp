#include "dynpol/ast.hpp"

#include <algorithm>

namespace dynpol {

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Lt: return "<";
    case BinOp::Xor: return "xor";
  }
  return "?";
}

ExprPtr Expr::constant(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->value = v;
  return e;
}

ExprPtr Expr::var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr Expr::flows_query(std::string from, std::string to) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::FlowsQuery;
  e->from = std::move(from);
  e->to = std::move(to);
  return e;
}

ExprPtr Expr::declassify(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Declassify;
  e->inner = std::move(inner);
  return e;
}

bool contains_declassify(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Var:
    case Expr::Kind::FlowsQuery:
      return false;
    case Expr::Kind::Binary:
      return contains_declassify(*e.lhs) || contains_declassify(*e.rhs);
    case Expr::Kind::Declassify:
      return true;
  }
  return false;
}

static void collect_vars(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::FlowsQuery:
      break;
    case Expr::Kind::Var:
      if (std::find(out.begin(), out.end(), e.name) == out.end())
        out.push_back(e.name);
      break;
    case Expr::Kind::Binary:
      collect_vars(*e.lhs, out);
      collect_vars(*e.rhs, out);
      break;
    case Expr::Kind::Declassify:
      collect_vars(*e.inner, out);
      break;
  }
}

std::vector<std::string> expr_vars(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

CommandPtr Command::skip() {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Skip;
  return c;
}

CommandPtr Command::assign(std::string target, ExprPtr rhs) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Assign;
  c->target = std::move(target);
  c->expr = std::move(rhs);
  return c;
}

CommandPtr Command::seq(CommandPtr first, CommandPtr second) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Seq;
  c->first = std::move(first);
  c->second = std::move(second);
  return c;
}

CommandPtr Command::if_then_else(ExprPtr cond, CommandPtr t, CommandPtr e) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::If;
  c->expr = std::move(cond);
  c->then_branch = std::move(t);
  c->else_branch = std::move(e);
  return c;
}

CommandPtr Command::while_loop(ExprPtr cond, CommandPtr body) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::While;
  c->expr = std::move(cond);
  c->body = std::move(body);
  return c;
}

CommandPtr Command::allow_flow(std::string from, std::string to) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::AllowFlow;
  c->from = std::move(from);
  c->to = std::move(to);
  return c;
}

CommandPtr Command::revoke_flow(std::string from, std::string to) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::RevokeFlow;
  c->from = std::move(from);
  c->to = std::move(to);
  return c;
}

CommandPtr Command::open_lock(std::string lock) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::OpenLock;
  c->lock = std::move(lock);
  return c;
}

CommandPtr Command::close_lock(std::string lock) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::CloseLock;
  c->lock = std::move(lock);
  return c;
}

int Program::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

bool Program::has_label(const std::string& name) const {
  return std::find(labels.begin(), labels.end(), name) != labels.end();
}

bool Program::has_lock(const std::string& name) const {
  return std::find(locks.begin(), locks.end(), name) != locks.end();
}

ParalocksLabel Program::plabel_of(const std::string& var) const {
  auto it = plabels.find(var);
  if (it != plabels.end()) return it->second;
  int idx = var_index(var);
  ParalocksLabel l;
  l.clauses.push_back({vars[idx].label, {}});
  return l;
}

}  // namespace dynpol
