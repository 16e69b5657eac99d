#include "dynpol/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>

namespace dynpol {

const FlowRelation& PolicyScheme::relation_of(const std::string& state) const {
  auto it = delta.find(state);
  if (it == delta.end())
    throw std::runtime_error("scheme: no relation for state '" + state + "'");
  auto rt = relations.find(it->second);
  if (rt == relations.end())
    throw std::runtime_error("scheme: unknown relation '" + it->second + "'");
  return rt->second;
}

bool PolicyScheme::has_state(const std::string& s) const {
  return std::find(states.begin(), states.end(), s) != states.end();
}

PolicyScheme PolicyScheme::from_json(const Json& j) {
  PolicyScheme s;
  for (const auto& l : j.at("labels")) s.labels.push_back(l.get<std::string>());
  for (const auto& [name, pairs] : j.at("relations").items()) {
    FlowRelation rel;
    for (const auto& pr : pairs)
      rel.insert({pr.at(0).get<std::string>(), pr.at(1).get<std::string>()});
    s.relations[name] = rel;
  }
  for (const auto& st : j.at("states")) s.states.push_back(st.get<std::string>());
  s.initial = j.at("initial").get<std::string>();
  for (const auto& [state, rel] : j.at("delta").items())
    s.delta[state] = rel.get<std::string>();
  const Json& mu = j.at("mu");
  if (mu.is_string() && mu.get<std::string>() == "complete") {
    for (const auto& a : s.states)
      for (const auto& b : s.states) s.mu.insert({a, b});
  } else {
    for (const auto& pr : mu)
      s.mu.insert({pr.at(0).get<std::string>(), pr.at(1).get<std::string>()});
  }
  if (!s.has_state(s.initial))
    throw std::runtime_error("scheme: initial state not declared");
  for (const auto& st : s.states) s.relation_of(st);  // delta must be total
  return s;
}

PolicyScheme PolicyScheme::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j = Json::parse(in);
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Predicate parsing.

namespace {

struct PredParser {
  std::string text;
  std::size_t pos = 0;

  explicit PredParser(std::string t) : text(std::move(t)) {}

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(const std::string& word) {
    skip();
    if (text.compare(pos, word.size(), word) != 0) return false;
    std::size_t end = pos + word.size();
    // keywords must not run into an identifier tail
    if (std::isalpha(static_cast<unsigned char>(word[0])) && end < text.size() &&
        (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
      return false;
    pos = end;
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("invariant syntax: " + msg + " at offset " +
                             std::to_string(pos));
  }

  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected identifier");
    return text.substr(start, pos - start);
  }

  PredPtr make(Pred::Kind k) {
    auto p = std::make_shared<Pred>();
    p->kind = k;
    return p;
  }

  PredPtr parse() {
    PredPtr p = parse_implies();
    skip();
    if (pos != text.size()) fail("trailing input");
    return p;
  }

  PredPtr parse_implies() {
    if (eat("forall")) {
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Forall;
      p->a = ident();
      if (!eat(":")) fail("expected ':' after forall binder");
      p->args.push_back(parse_implies());
      return p;
    }
    PredPtr lhs = parse_or();
    if (eat("implies")) {
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Implies;
      p->args = {lhs, parse_implies()};
      return p;
    }
    return lhs;
  }

  PredPtr parse_or() {
    PredPtr lhs = parse_and();
    while (eat("or")) {
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Or;
      p->args = {lhs, parse_and()};
      lhs = p;
    }
    return lhs;
  }

  PredPtr parse_and() {
    PredPtr lhs = parse_unary();
    while (eat("and")) {
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::And;
      p->args = {lhs, parse_unary()};
      lhs = p;
    }
    return lhs;
  }

  PredPtr parse_unary() {
    if (eat("not")) {
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Not;
      p->args = {parse_unary()};
      return p;
    }
    return parse_atom();
  }

  PredPtr parse_atom() {
    if (eat("true")) return make(Pred::Kind::True);
    if (eat("false")) return make(Pred::Kind::False);
    if (eat("monotone")) return make(Pred::Kind::Monotone);
    if (eat("flows")) {
      if (!eat("(")) fail("expected '(' after flows");
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::Flows;
      p->a = ident();
      if (!eat(",")) fail("expected ','");
      p->b = ident();
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    if (eat("state")) {
      if (!eat("(")) fail("expected '(' after state");
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::State;
      p->a = ident();
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    if (eat("everbefore")) {
      if (!eat("(")) fail("expected '(' after everbefore");
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::EverBefore;
      p->args = {parse_implies()};
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    if (eat("everafter")) {
      if (!eat("(")) fail("expected '(' after everafter");
      auto p = std::make_shared<Pred>();
      p->kind = Pred::Kind::EverAfter;
      p->args = {parse_implies()};
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    if (eat("(")) {
      PredPtr p = parse_implies();
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    fail("expected predicate");
  }
};

}  // namespace

PredPtr parse_predicate(const std::string& text) {
  return PredParser(text).parse();
}

std::string print_predicate(const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::True: return "true";
    case Pred::Kind::False: return "false";
    case Pred::Kind::Monotone: return "monotone";
    case Pred::Kind::Flows: return "flows(" + p.a + ", " + p.b + ")";
    case Pred::Kind::State: return "state(" + p.a + ")";
    case Pred::Kind::Not: return "not (" + print_predicate(*p.args[0]) + ")";
    case Pred::Kind::And:
      return "(" + print_predicate(*p.args[0]) + " and " +
             print_predicate(*p.args[1]) + ")";
    case Pred::Kind::Or:
      return "(" + print_predicate(*p.args[0]) + " or " +
             print_predicate(*p.args[1]) + ")";
    case Pred::Kind::Implies:
      return "(" + print_predicate(*p.args[0]) + " implies " +
             print_predicate(*p.args[1]) + ")";
    case Pred::Kind::EverBefore:
      return "everbefore(" + print_predicate(*p.args[0]) + ")";
    case Pred::Kind::EverAfter:
      return "everafter(" + print_predicate(*p.args[0]) + ")";
    case Pred::Kind::Forall:
      return "forall " + p.a + ": " + print_predicate(*p.args[0]);
  }
  return "?";
}

bool relation_only(const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::State:
    case Pred::Kind::EverBefore:
    case Pred::Kind::EverAfter:
    case Pred::Kind::Monotone:
      return false;
    default:
      for (const auto& a : p.args)
        if (!relation_only(*a)) return false;
      return true;
  }
}

bool state_only(const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::Flows:
    case Pred::Kind::EverBefore:
    case Pred::Kind::EverAfter:
    case Pred::Kind::Monotone:
      return false;
    default:
      for (const auto& a : p.args)
        if (!state_only(*a)) return false;
      return true;
  }
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

using Binding = std::map<std::string, std::string>;

std::string subst(const std::string& name, const Binding& binding) {
  auto it = binding.find(name);
  return it == binding.end() ? name : it->second;
}

// Positional evaluation over a sequence of (state, relation) with temporal
// atoms ranging inside the sequence (both ends inclusive of the position).
struct SeqContext {
  const PolicyScheme& scheme;
  const std::vector<std::string>& path;
  int position;
};

bool eval_at(const Pred& p, const SeqContext& ctx, const Binding& binding);

bool eval_plain(const Pred& p, const PolicyScheme& scheme,
                const std::string& state, const FlowRelation& rel,
                const Binding& binding) {
  switch (p.kind) {
    case Pred::Kind::True: return true;
    case Pred::Kind::False: return false;
    case Pred::Kind::Flows:
      return may_flow(rel, subst(p.a, binding), subst(p.b, binding));
    case Pred::Kind::State: return state == p.a;
    case Pred::Kind::Not:
      return !eval_plain(*p.args[0], scheme, state, rel, binding);
    case Pred::Kind::And:
      return eval_plain(*p.args[0], scheme, state, rel, binding) &&
             eval_plain(*p.args[1], scheme, state, rel, binding);
    case Pred::Kind::Or:
      return eval_plain(*p.args[0], scheme, state, rel, binding) ||
             eval_plain(*p.args[1], scheme, state, rel, binding);
    case Pred::Kind::Implies:
      return !eval_plain(*p.args[0], scheme, state, rel, binding) ||
             eval_plain(*p.args[1], scheme, state, rel, binding);
    case Pred::Kind::Forall: {
      Binding inner = binding;
      for (const auto& l : scheme.labels) {
        inner[p.a] = l;
        if (!eval_plain(*p.args[0], scheme, state, rel, inner)) return false;
      }
      return true;
    }
    default:
      throw std::runtime_error("temporal atom outside a sequence invariant");
  }
}

bool eval_at(const Pred& p, const SeqContext& ctx, const Binding& binding) {
  const std::string& state = ctx.path[ctx.position];
  const FlowRelation& rel = ctx.scheme.relation_of(state);
  switch (p.kind) {
    case Pred::Kind::EverBefore:
      for (int j = 0; j <= ctx.position; ++j) {
        SeqContext at{ctx.scheme, ctx.path, j};
        if (eval_at(*p.args[0], at, binding)) return true;
      }
      return false;
    case Pred::Kind::EverAfter:
      for (int j = ctx.position; j < static_cast<int>(ctx.path.size()); ++j) {
        SeqContext at{ctx.scheme, ctx.path, j};
        if (eval_at(*p.args[0], at, binding)) return true;
      }
      return false;
    case Pred::Kind::Monotone: {
      if (ctx.position == 0) return true;
      const FlowRelation& prev =
          ctx.scheme.relation_of(ctx.path[ctx.position - 1]);
      return std::includes(rel.begin(), rel.end(), prev.begin(), prev.end());
    }
    case Pred::Kind::Not:
      return !eval_at(*p.args[0], ctx, binding);
    case Pred::Kind::And:
      return eval_at(*p.args[0], ctx, binding) && eval_at(*p.args[1], ctx, binding);
    case Pred::Kind::Or:
      return eval_at(*p.args[0], ctx, binding) || eval_at(*p.args[1], ctx, binding);
    case Pred::Kind::Implies:
      return !eval_at(*p.args[0], ctx, binding) || eval_at(*p.args[1], ctx, binding);
    case Pred::Kind::Forall: {
      Binding inner = binding;
      for (const auto& l : ctx.scheme.labels) {
        inner[p.a] = l;
        if (!eval_at(*p.args[0], ctx, inner)) return false;
      }
      return true;
    }
    default:
      return eval_plain(p, ctx.scheme, state, rel, binding);
  }
}

// BFS over discriminator states up to `depth` positions. Returns states with
// their shortest paths and whether the exploration closed before the bound.
struct StateReach {
  std::map<std::string, std::vector<std::string>> path_to;
  std::vector<std::string> order;
  bool saturated = false;
};

StateReach reach_states(const PolicyScheme& scheme, int depth) {
  StateReach r;
  std::deque<std::string> frontier{scheme.initial};
  r.path_to[scheme.initial] = {scheme.initial};
  r.order.push_back(scheme.initial);
  int level = 1;
  while (level < depth) {
    std::deque<std::string> next;
    for (const auto& s : frontier) {
      for (const auto& [from, to] : scheme.mu) {
        if (from != s || r.path_to.count(to)) continue;
        auto path = r.path_to[s];
        path.push_back(to);
        r.path_to[to] = std::move(path);
        r.order.push_back(to);
        next.push_back(to);
      }
    }
    if (next.empty()) {
      r.saturated = true;
      return r;
    }
    frontier = std::move(next);
    ++level;
  }
  // Frontier may still have undiscovered successors past the bound.
  for (const auto& s : frontier)
    for (const auto& [from, to] : scheme.mu)
      if (from == s && !r.path_to.count(to)) return r;
  r.saturated = true;
  return r;
}

}  // namespace

std::vector<std::vector<std::string>> reachable_sequences(
    const PolicyScheme& scheme, int depth, const Limits& limits) {
  std::vector<std::vector<std::string>> out;
  std::deque<std::vector<std::string>> work{{scheme.initial}};
  while (!work.empty()) {
    auto path = work.front();
    work.pop_front();
    out.push_back(path);
    if (out.size() + work.size() > limits.sequence_cap)
      throw CapExceeded("sequence enumeration exceeds cap");
    if (static_cast<int>(path.size()) >= depth) continue;
    for (const auto& [from, to] : scheme.mu) {
      if (from != path.back()) continue;
      auto next = path;
      next.push_back(to);
      work.push_back(std::move(next));
    }
  }
  return out;
}

SchemeCheck check_global_invariant(const PolicyScheme& scheme, const PredPtr& phi,
                                   int depth) {
  if (!relation_only(*phi))
    throw std::invalid_argument("global invariant must be a relation predicate");
  StateReach r = reach_states(scheme, depth);
  SchemeCheck out;
  out.saturated = r.saturated;
  for (const auto& s : r.order) {
    if (!eval_plain(*phi, scheme, s, scheme.relation_of(s), {})) {
      out.holds = false;
      out.counterexample = r.path_to[s];
      out.position = static_cast<int>(out.counterexample.size()) - 1;
      out.failure_reason = "relation at state '" + s + "' violates the invariant";
      return out;
    }
  }
  return out;
}

SchemeCheck check_conditional_invariant(const PolicyScheme& scheme,
                                        const PredPtr& psi, const PredPtr& phi,
                                        int depth) {
  if (!state_only(*psi))
    throw std::invalid_argument("filter must be a state predicate");
  if (!relation_only(*phi))
    throw std::invalid_argument("conditional invariant must be a relation predicate");
  StateReach r = reach_states(scheme, depth);
  SchemeCheck out;
  out.saturated = r.saturated;
  for (const auto& s : r.order) {
    if (!eval_plain(*psi, scheme, s, scheme.relation_of(s), {})) continue;
    if (!eval_plain(*phi, scheme, s, scheme.relation_of(s), {})) {
      out.holds = false;
      out.counterexample = r.path_to[s];
      out.position = static_cast<int>(out.counterexample.size()) - 1;
      out.failure_reason =
          "filtered state '" + s + "' selects a violating relation";
      return out;
    }
  }
  return out;
}

namespace {

// Every ever-before subformula, with forall binders expanded over the
// scheme's labels, so past obligations form a finite fact set.
void collect_everbefore(const Pred& p, const PolicyScheme& scheme,
                        Binding binding, std::vector<std::string>& out) {
  switch (p.kind) {
    case Pred::Kind::EverBefore:
      out.push_back(print_predicate(*p.args[0]));
      return;
    case Pred::Kind::Forall: {
      for (const auto& l : scheme.labels) {
        Binding inner = binding;
        inner[p.a] = l;
        collect_everbefore(*p.args[0], scheme, inner, out);
      }
      return;
    }
    default:
      for (const auto& a : p.args) collect_everbefore(*a, scheme, binding, out);
  }
}

}  // namespace

SchemeCheck check_sequence_invariant(const PolicyScheme& scheme,
                                     const PredPtr& phi, int depth,
                                     const Limits& limits) {
  SchemeCheck out;
  auto sequences = reachable_sequences(scheme, depth, limits);
  for (const auto& path : sequences) {
    for (int i = 0; i < static_cast<int>(path.size()); ++i) {
      SeqContext ctx{scheme, path, i};
      if (!eval_at(*phi, ctx, {})) {
        out.holds = false;
        out.counterexample = path;
        out.position = i;
        out.failure_reason = "sequence violates the invariant at position " +
                             std::to_string(i);
        return out;
      }
    }
  }
  // Saturation: the (state, satisfied-past-facts) space closes well before
  // the bound, so deeper sequences cannot change the verdict. The margin of
  // |S| leaves room for an ever-after witness beyond the closure level.
  std::vector<std::string> facts;
  collect_everbefore(*phi, scheme, {}, facts);
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());

  std::set<std::pair<std::string, std::size_t>> seen;
  auto fact_mask = [&](const std::string& state, std::size_t mask) {
    for (std::size_t i = 0; i < facts.size(); ++i) {
      if (mask & (1u << i)) continue;
      PredPtr f = parse_predicate(facts[i]);
      std::vector<std::string> single{state};
      SeqContext ctx{scheme, single, 0};
      if (eval_at(*f, ctx, {})) mask |= (1u << i);
    }
    return mask;
  };
  std::deque<std::pair<std::string, std::size_t>> frontier;
  auto start = std::make_pair(scheme.initial, fact_mask(scheme.initial, 0));
  seen.insert(start);
  frontier.push_back(start);
  int closure_level = 1;
  while (!frontier.empty()) {
    std::deque<std::pair<std::string, std::size_t>> next;
    for (const auto& [state, mask] : frontier) {
      for (const auto& [from, to] : scheme.mu) {
        if (from != state) continue;
        auto node = std::make_pair(to, fact_mask(to, mask));
        if (seen.insert(node).second) next.push_back(node);
      }
    }
    if (next.empty()) break;
    frontier = std::move(next);
    ++closure_level;
  }
  out.saturated =
      closure_level + static_cast<int>(scheme.states.size()) <= depth;
  return out;
}

SchemeCheck check_embedding(const PolicyScheme& embedded,
                            const PolicyScheme& host, const Embedding& emb,
                            int depth) {
  SchemeCheck out;
  // label map must be injective
  std::set<std::string> image;
  for (const auto& [from, to] : emb.label_map) {
    if (!image.insert(to).second)
      throw std::invalid_argument("label map is not injective");
  }
  auto map_label = [&](const std::string& l) {
    auto it = emb.label_map.find(l);
    if (it == emb.label_map.end())
      throw std::invalid_argument("label map misses '" + l + "'");
    return it->second;
  };
  auto map_state = [&](const std::string& s) {
    auto it = emb.state_map.find(s);
    if (it == emb.state_map.end())
      throw std::invalid_argument("state map misses '" + s + "'");
    return it->second;
  };
  auto map_relation = [&](const FlowRelation& rel) {
    FlowRelation out_rel;
    for (const auto& [from, to] : rel)
      out_rel.insert({map_label(from), map_label(to)});
    return out_rel;
  };
  auto restrict_to_image = [&](const FlowRelation& rel) {
    FlowRelation out_rel;
    for (const auto& [from, to] : rel)
      if (image.count(from) && image.count(to)) out_rel.insert({from, to});
    return out_rel;
  };

  if (map_state(embedded.initial) != host.initial) {
    out.holds = false;
    out.failure_reason = "state map does not send the initial state to the host initial state";
    return out;
  }

  // clause 1: host simulates the embedded transitions
  for (const auto& [s, s2] : embedded.mu) {
    if (!host.mu.count({map_state(s), map_state(s2)})) {
      out.holds = false;
      out.failure_reason = "clause 1: transition (" + s + ", " + s2 +
                           ") has no image in the host";
      out.counterexample = {s, s2};
      return out;
    }
  }

  // clause 2: relations agree on the image labels
  for (const auto& s : embedded.states) {
    FlowRelation host_restricted =
        restrict_to_image(host.relation_of(map_state(s)));
    FlowRelation mapped = map_relation(embedded.relation_of(s));
    if (host_restricted != mapped) {
      out.holds = false;
      out.failure_reason =
          "clause 2: relation at state '" + s + "' disagrees on image labels";
      out.counterexample = {s};
      return out;
    }
  }

  // clause 3: every reachable host relation, restricted to the image, stays
  // within some embedded relation
  StateReach r = reach_states(host, depth);
  out.saturated = r.saturated;
  for (const auto& h : r.order) {
    FlowRelation restricted = restrict_to_image(host.relation_of(h));
    bool contained = false;
    for (const auto& [name, rel] : embedded.relations) {
      FlowRelation mapped = map_relation(rel);
      if (std::includes(mapped.begin(), mapped.end(), restricted.begin(),
                        restricted.end())) {
        contained = true;
        break;
      }
    }
    if (!contained) {
      out.holds = false;
      out.failure_reason = "clause 3: reachable host state '" + h +
                           "' allows flows on image labels beyond every embedded relation";
      out.counterexample = r.path_to[h];
      return out;
    }
  }
  return out;
}

}  // namespace dynpol
