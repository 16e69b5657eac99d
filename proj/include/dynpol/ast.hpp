#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dynpol {

using Value = int;

// Finite integer domain. Arithmetic wraps modulo the domain size, so
// evaluation is total.
struct Domain {
  Value lo = 0;
  Value hi = 1;

  int size() const { return hi - lo + 1; }

  Value wrap(long long v) const {
    long long m = size();
    long long r = (v - lo) % m;
    if (r < 0) r += m;
    return static_cast<Value>(lo + r);
  }

  bool contains(Value v) const { return v >= lo && v <= hi; }

  std::vector<Value> values() const {
    std::vector<Value> out;
    for (Value v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
};

// Current flow relation (label pairs) plus the set of open locks.
// mayFlow-style queries add the reflexive closure on top of `flows`.
struct PolicyComponent {
  std::set<std::pair<std::string, std::string>> flows;
  std::set<std::string> open_locks;

  bool operator==(const PolicyComponent&) const = default;
  auto operator<=>(const PolicyComponent&) const = default;
};

// Paralocks-style label: a set of clauses (actor, guard locks). An actor may
// observe data under this label when some clause's guards are all available.
// The empty clause set is the most restrictive label.
struct ParalocksLabel {
  std::vector<std::pair<std::string, std::set<std::string>>> clauses;
};

enum class BinOp { Add, Sub, Mul, Eq, Lt, Xor };

const char* binop_name(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Binary, FlowsQuery, Declassify };

  Kind kind;
  Value value = 0;           // Const
  std::string name;          // Var
  BinOp op = BinOp::Add;     // Binary
  ExprPtr lhs, rhs;          // Binary
  std::string from, to;      // FlowsQuery
  ExprPtr inner;             // Declassify

  static ExprPtr constant(Value v);
  static ExprPtr var(std::string name);
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr flows_query(std::string from, std::string to);
  static ExprPtr declassify(ExprPtr inner);
};

// True iff the expression contains a declassify mark anywhere.
bool contains_declassify(const Expr& e);

// Variables read by the expression, in first-occurrence order.
std::vector<std::string> expr_vars(const Expr& e);

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  enum class Kind {
    Skip,
    Assign,
    Seq,
    If,
    While,
    AllowFlow,
    RevokeFlow,
    OpenLock,
    CloseLock
  };

  Kind kind;
  std::string target;          // Assign
  ExprPtr expr;                // Assign rhs, If/While guard
  CommandPtr first, second;    // Seq
  CommandPtr then_branch, else_branch;  // If (else may be null -> skip)
  CommandPtr body;             // While
  std::string from, to;        // AllowFlow / RevokeFlow
  std::string lock;            // OpenLock / CloseLock

  static CommandPtr skip();
  static CommandPtr assign(std::string target, ExprPtr rhs);
  static CommandPtr seq(CommandPtr first, CommandPtr second);
  static CommandPtr if_then_else(ExprPtr cond, CommandPtr t, CommandPtr e);
  static CommandPtr while_loop(ExprPtr cond, CommandPtr body);
  static CommandPtr allow_flow(std::string from, std::string to);
  static CommandPtr revoke_flow(std::string from, std::string to);
  static CommandPtr open_lock(std::string lock);
  static CommandPtr close_lock(std::string lock);
};

struct VarDecl {
  std::string name;
  std::string label;
};

// Attacker description carried in a program header ("attacker A;" or
// "attacker A caps {L1, L2};"). Observation machinery lives in policy.hpp.
struct AttackerSpec {
  std::string level;
  std::set<std::string> caps;
};

struct Program {
  std::vector<std::string> labels;
  std::vector<std::string> locks;
  std::vector<VarDecl> vars;
  Domain domain;
  PolicyComponent initial_policy;  // declared flows; all locks start closed
  std::optional<AttackerSpec> attacker;
  std::map<std::string, ParalocksLabel> plabels;
  CommandPtr body;

  int var_index(const std::string& name) const;   // -1 if undeclared
  const std::string& label_of(int var) const { return vars[var].label; }
  bool has_label(const std::string& name) const;
  bool has_lock(const std::string& name) const;

  // Paralocks label of a variable; defaults to {(own label, {})}.
  ParalocksLabel plabel_of(const std::string& var) const;
};

}  // namespace dynpol
