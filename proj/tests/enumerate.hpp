#pragma once

#include <functional>
#include <vector>

#include "dynpol/ast.hpp"
#include "dynpol/parser.hpp"

namespace dynpol::testing {

// Exhaustive policy-change-free two-level programs over variables l:Low and
// h:High with domain {0,1}: sequences of up to three assignments drawn from a
// fixed expression pool, plus branching forms of up to two statements.
inline void enumerate_static_two_level(
    const std::function<void(const Program&)>& yield) {
  Program base = parse_program("labels Low, High; vars l:Low, h:High; domain 0..1; skip");

  std::vector<ExprPtr> atoms{Expr::constant(0), Expr::constant(1),
                             Expr::var("l"), Expr::var("h")};
  std::vector<ExprPtr> pool = atoms;
  for (BinOp op : {BinOp::Add, BinOp::Xor, BinOp::Eq, BinOp::Lt})
    for (const auto& x : {Expr::var("l"), Expr::var("h")})
      for (const auto& y : {Expr::var("l"), Expr::var("h")})
        pool.push_back(Expr::binary(op, x, y));

  std::vector<CommandPtr> assigns;
  for (const char* target : {"l", "h"})
    for (const auto& rhs : pool) assigns.push_back(Command::assign(target, rhs));

  std::vector<CommandPtr> branches;
  for (const char* guard : {"l", "h"})
    for (const char* target : {"l", "h"})
      for (const auto& t : atoms)
        for (const auto& e : atoms)
          branches.push_back(Command::if_then_else(
              Expr::var(guard), Command::assign(target, t),
              Command::assign(target, e)));

  auto emit = [&](CommandPtr body) {
    Program p = base;
    p.body = std::move(body);
    yield(p);
  };

  for (const auto& s1 : assigns) {
    emit(s1);
    for (const auto& s2 : assigns) {
      emit(Command::seq(s1, s2));
      for (const auto& s3 : assigns) emit(Command::seq(s1, Command::seq(s2, s3)));
    }
  }
  for (const auto& b : branches) {
    emit(b);
    for (const auto& s : assigns) {
      emit(Command::seq(b, s));
      emit(Command::seq(s, b));
    }
  }
}

}  // namespace dynpol::testing
