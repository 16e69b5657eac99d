#include "dynpol/interp.hpp"

#include <stdexcept>

#include "dynpol/policy.hpp"

namespace dynpol {

Value eval_expr(const Program& p, const Expr& e, const Store& s) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return p.domain.wrap(e.value);
    case Expr::Kind::Var:
      return s.values[p.var_index(e.name)];
    case Expr::Kind::FlowsQuery:
      return p.domain.wrap(may_flow(s.policy, e.from, e.to) ? 1 : 0);
    case Expr::Kind::Declassify:
      return eval_expr(p, *e.inner, s);
    case Expr::Kind::Binary: {
      long long l = eval_expr(p, *e.lhs, s);
      long long r = eval_expr(p, *e.rhs, s);
      switch (e.op) {
        case BinOp::Add: return p.domain.wrap(l + r);
        case BinOp::Sub: return p.domain.wrap(l - r);
        case BinOp::Mul: return p.domain.wrap(l * r);
        case BinOp::Eq: return p.domain.wrap(l == r ? 1 : 0);
        case BinOp::Lt: return p.domain.wrap(l < r ? 1 : 0);
        case BinOp::Xor: return p.domain.wrap(l ^ r);
      }
    }
  }
  throw std::logic_error("bad expression");
}

static bool truthy(Value v) { return v != 0; }

StepResult step(const Program& p, const Command& c, const Store& s) {
  switch (c.kind) {
    case Command::Kind::Skip:
      return {nullptr, s, std::nullopt};
    case Command::Kind::Assign: {
      Store next = s;
      int idx = p.var_index(c.target);
      Value v = eval_expr(p, *c.expr, s);
      next.values[idx] = v;
      Event ev{idx, v, s.policy, contains_declassify(*c.expr)};
      return {nullptr, next, ev};
    }
    case Command::Kind::Seq: {
      StepResult r = step(p, *c.first, s);
      CommandPtr next =
          r.next ? Command::seq(r.next, c.second) : c.second;
      return {next, r.store, r.event};
    }
    case Command::Kind::If: {
      bool taken = truthy(eval_expr(p, *c.expr, s));
      CommandPtr branch = taken ? c.then_branch
                                : (c.else_branch ? c.else_branch
                                                 : Command::skip());
      return {branch, s, std::nullopt};
    }
    case Command::Kind::While: {
      if (truthy(eval_expr(p, *c.expr, s))) {
        auto self = std::make_shared<Command>(c);
        return {Command::seq(c.body, self), s, std::nullopt};
      }
      return {nullptr, s, std::nullopt};
    }
    case Command::Kind::AllowFlow: {
      Store next = s;
      next.policy.flows.insert({c.from, c.to});
      return {nullptr, next, std::nullopt};
    }
    case Command::Kind::RevokeFlow: {
      Store next = s;
      next.policy.flows.erase({c.from, c.to});
      return {nullptr, next, std::nullopt};
    }
    case Command::Kind::OpenLock: {
      Store next = s;
      next.policy.open_locks.insert(c.lock);
      return {nullptr, next, std::nullopt};
    }
    case Command::Kind::CloseLock: {
      Store next = s;
      next.policy.open_locks.erase(c.lock);
      return {nullptr, next, std::nullopt};
    }
  }
  throw std::logic_error("bad command");
}

Store initial_store(const Program& p, const std::vector<Value>& values) {
  if (values.size() != p.vars.size())
    throw std::invalid_argument("store arity mismatch");
  return Store{values, p.initial_policy};
}

Trace run(const Program& p, const Store& initial, int budget) {
  Trace t;
  t.states.push_back({initial.values, initial.policy});
  Store store = initial;
  CommandPtr current = p.body;
  int steps = 0;
  while (current) {
    if (steps >= budget) {
      t.truncated = true;
      break;
    }
    StepResult r = step(p, *current, store);
    store = r.store;
    current = r.next;
    ++steps;
    t.states.push_back({store.values, store.policy});
    if (r.event) {
      t.events.push_back(*r.event);
      t.event_state.push_back(steps);
    }
  }
  return t;
}

}  // namespace dynpol
