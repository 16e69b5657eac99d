#include "dynpol/facets.hpp"

#include <filesystem>
#include <sstream>

#include "dynpol/parser.hpp"
#include "dynpol/printer.hpp"

namespace dynpol {

namespace fs = std::filesystem;

const char* facet_name(Facet f) {
  switch (f) {
    case Facet::TimeTransitive: return "T";
    case Facet::Replay: return "R";
    case Facet::WeakReplay: return "WR";
    case Facet::DirectRelease: return "D";
    case Facet::Whitelisting: return "W";
  }
  return "?";
}

const char* facet_dir_name(Facet f) {
  switch (f) {
    case Facet::TimeTransitive: return "time_transitive";
    case Facet::Replay: return "replay";
    case Facet::WeakReplay: return "weak_replay";
    case Facet::DirectRelease: return "direct_release";
    case Facet::Whitelisting: return "whitelisting";
  }
  return "?";
}

static const Facet kAllFacets[] = {Facet::TimeTransitive, Facet::Replay,
                                   Facet::WeakReplay, Facet::DirectRelease,
                                   Facet::Whitelisting};

FacetCorpus FacetCorpus::load(const std::string& dir) {
  FacetCorpus corpus;
  corpus.root = dir;
  for (Facet f : kAllFacets) {
    fs::path base = fs::path(dir) / "facets" / facet_dir_name(f);
    FacetEntry entry;
    entry.facet = f;
    entry.canonical = parse_program_file((base / "canonical.dpol").string());
    if (fs::exists(base / "context_secure.dpol"))
      entry.context_secure =
          parse_program_file((base / "context_secure.dpol").string());
    if (fs::exists(base / "context_insecure.dpol"))
      entry.context_insecure =
          parse_program_file((base / "context_insecure.dpol").string());
    for (const char* variant : {"hicks", "paralocks", "gradual", "rx", "forgetful"})
      if (fs::exists(base / (std::string(variant) + ".dpol")))
        entry.variants[variant] =
            parse_program_file((base / (std::string(variant) + ".dpol")).string());
    corpus.entries.emplace(f, std::move(entry));

    fs::path decl = fs::path(dir) / "facets" / "declassify" /
                    (std::string(facet_dir_name(f)) + ".dpol");
    if (fs::exists(decl)) corpus.declassify_forms.emplace(f, parse_program_file(decl.string()));
  }
  corpus.second_value_automaton = std::make_shared<ForgetfulAutomaton>(
      parse_automaton_file((fs::path(dir) / "automata" / "second_value_only.aut").string()));
  return corpus;
}

const Program& FacetCorpus::program_for(const std::string& condition,
                                        Facet f) const {
  const FacetEntry& e = entry(f);
  std::string key = condition;
  if (condition == "flowspecs") key = "gradual";
  if (condition == "balliu" || condition == "askarov-chong" ||
      condition == "nondisclosure" || condition == "flowlocks")
    key = "";
  if (!key.empty()) {
    auto it = e.variants.find(key);
    if (it != e.variants.end()) return it->second;
  }
  return e.canonical;
}

const Program& canonical_program(const FacetCorpus& corpus, Facet f) {
  return corpus.entry(f).canonical;
}

namespace {

Attacker program_attacker(const Program& p) {
  if (!p.attacker)
    throw std::invalid_argument("corpus program declares no attacker");
  Attacker a = Attacker::at_level(p.attacker->level);
  a.caps = p.attacker->caps;
  return a;
}

std::string mark_of(const Verdict& v) {
  switch (v.status) {
    case Status::Secure: return "+";
    case Status::Insecure: return "-";
    case Status::Unknown:
      throw std::runtime_error(
          "classification failure: verdict Unknown, raise the budget");
  }
  return "?";
}

Verdict run_condition(const FacetCorpus& corpus, const std::string& condition,
                      const std::string& variant, Facet f,
                      const Limits& limits) {
  const Program& prog = corpus.program_for(condition, f);
  if (condition == "rx")
    return check_rx(prog, program_attacker(prog), limits);
  if (condition == "hicks")
    return check_fixed_policy_ni(prog, program_attacker(prog), false, limits);
  if (condition == "nondisclosure" || condition == "flowlocks")
    return check_strong_bisimulation(prog, program_attacker(prog), limits);
  if (condition == "gradual" || condition == "flowspecs")
    return check_gradual_release(prog, limits);
  if (condition == "paralocks")
    return check_paralocks(prog, limits);
  if (condition == "balliu") {
    ReleasePolicy rp = ReleasePolicy::EquivalenceNow;
    if (variant == "timetrans") rp = ReleasePolicy::TimeTransitiveAllowing;
    else if (variant == "direct") rp = ReleasePolicy::DirectReleaseAllowing;
    return check_epistemic(prog, program_attacker(prog),
                           ObservationModel::AssignEvents, rp, limits);
  }
  throw std::invalid_argument("unknown condition: " + condition);
}

std::string group_of(const std::string& condition) {
  if (condition == "rx" || condition == "hicks") return "NI";
  if (condition == "nondisclosure" || condition == "flowlocks") return "BI";
  return "Epistemic";
}

}  // namespace

TableRow classify_condition(const FacetCorpus& corpus,
                            const std::string& condition,
                            const std::string& variant, const Limits& limits) {
  TableRow row;
  row.group = group_of(condition);
  row.condition = condition;
  row.variant = variant;
  for (Facet f : {Facet::TimeTransitive, Facet::Replay, Facet::DirectRelease,
                  Facet::Whitelisting}) {
    std::string letter = facet_name(f);
    if ((condition == "gradual" || condition == "flowspecs") &&
        f == Facet::TimeTransitive) {
      // Two security levels cannot express a three-level transitive flow.
      row.marks[letter] = "N/A";
      continue;
    }
    if (condition == "askarov-chong" && f == Facet::Replay) {
      // Parameterised by the attacker set: perfect recall versus the
      // forgetful automaton observer, on the two-valued replay variant.
      const Program& prog = corpus.program_for("forgetful", f);
      Attacker recall = program_attacker(prog);
      Attacker forgetful = recall;
      forgetful.memory = AttackerMemory::Automaton;
      forgetful.automaton = corpus.second_value_automaton;
      std::string m1 = mark_of(check_forgetful(prog, {recall}, limits));
      std::string m2 = mark_of(check_forgetful(prog, {forgetful}, limits));
      row.marks[letter] = (m1 == m2) ? m1 : "+/-";
      continue;
    }
    if (condition == "askarov-chong") {
      const Program& prog = corpus.program_for(condition, f);
      row.marks[letter] = mark_of(
          check_forgetful(prog, {program_attacker(prog)}, limits));
      continue;
    }
    row.marks[letter] = mark_of(run_condition(corpus, condition, variant, f, limits));
  }
  return row;
}

std::vector<TableRow> reproduce_table(const FacetCorpus& corpus,
                                      const Limits& limits,
                                      const std::string& only_group) {
  struct Spec {
    const char* condition;
    const char* variant;
  };
  static const Spec specs[] = {
      {"rx", ""},           {"hicks", ""},
      {"nondisclosure", ""}, {"flowlocks", ""},
      {"gradual", ""},      {"flowspecs", ""},
      {"balliu", "equiv"},  {"balliu", "timetrans"}, {"balliu", "direct"},
      {"askarov-chong", ""}, {"paralocks", ""},
  };
  std::vector<TableRow> rows;
  for (const Spec& s : specs) {
    std::string group = group_of(s.condition);
    if (!only_group.empty() && group != only_group) continue;
    rows.push_back(classify_condition(corpus, s.condition, s.variant, limits));
  }
  return rows;
}

Json table_json(const std::vector<TableRow>& rows) {
  Json out = Json::array();
  for (const TableRow& r : rows) {
    Json row = Json::object();
    row["group"] = r.group;
    row["condition"] = r.condition;
    if (!r.variant.empty()) row["variant"] = r.variant;
    Json marks = Json::object();
    for (const char* f : {"T", "R", "D", "W"}) marks[f] = r.marks.at(f);
    row["marks"] = marks;
    out.push_back(row);
  }
  return out;
}

std::string table_text(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  out << "                                   T     R     D     W\n";
  std::string group;
  for (const TableRow& r : rows) {
    if (r.group != group) {
      group = r.group;
      out << group << "\n";
    }
    std::string name = r.condition;
    if (!r.variant.empty()) name += " (" + r.variant + ")";
    out << "  " << name << std::string(name.size() < 31 ? 31 - name.size() : 1, ' ');
    for (const char* f : {"T", "R", "D", "W"}) {
      std::string m = r.marks.at(f);
      out << m << std::string(m.size() < 6 ? 6 - m.size() : 1, ' ');
    }
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> diff_tables(const Json& got, const Json& expected) {
  std::vector<std::string> diffs;
  auto key = [](const Json& row) {
    std::string k = row.at("condition").get<std::string>();
    if (row.contains("variant")) k += "/" + row.at("variant").get<std::string>();
    return k;
  };
  std::map<std::string, Json> want;
  for (const Json& row : expected) want[key(row)] = row;
  for (const Json& row : got) {
    auto it = want.find(key(row));
    if (it == want.end()) {
      diffs.push_back(key(row) + ": unexpected row");
      continue;
    }
    for (const char* f : {"T", "R", "D", "W"}) {
      std::string g = row.at("marks").at(f).get<std::string>();
      std::string w = it->second.at("marks").at(f).get<std::string>();
      if (g != w)
        diffs.push_back(key(row) + " " + f + ": got " + g + " expected " + w);
    }
    want.erase(it);
  }
  for (const auto& [k, row] : want) diffs.push_back(k + ": missing row");
  return diffs;
}

namespace {

ExprPtr strip_declassify(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Declassify:
      return strip_declassify(*e.inner);
    case Expr::Kind::Binary:
      return Expr::binary(e.op, strip_declassify(*e.lhs),
                          strip_declassify(*e.rhs));
    default:
      return std::make_shared<Expr>(e);
  }
}

CommandPtr transform_command(const Program& p, const Command& c) {
  switch (c.kind) {
    case Command::Kind::Assign: {
      if (!contains_declassify(*c.expr))
        return std::make_shared<Command>(c);
      std::string target_label = p.vars[p.var_index(c.target)].label;
      std::vector<std::pair<std::string, std::string>> weaken;
      for (const auto& v : expr_vars(*c.expr)) {
        std::string from = p.vars[p.var_index(v)].label;
        if (from != target_label &&
            !p.initial_policy.flows.count({from, target_label}))
          weaken.push_back({from, target_label});
      }
      CommandPtr out = Command::assign(c.target, strip_declassify(*c.expr));
      for (auto it = weaken.rbegin(); it != weaken.rend(); ++it)
        out = Command::seq(Command::allow_flow(it->first, it->second), out);
      for (const auto& [from, to] : weaken)
        out = Command::seq(out, Command::revoke_flow(from, to));
      return out;
    }
    case Command::Kind::Seq:
      return Command::seq(transform_command(p, *c.first),
                          transform_command(p, *c.second));
    case Command::Kind::If:
      return Command::if_then_else(
          c.expr, transform_command(p, *c.then_branch),
          c.else_branch ? transform_command(p, *c.else_branch) : nullptr);
    case Command::Kind::While:
      return Command::while_loop(c.expr, transform_command(p, *c.body));
    default:
      return std::make_shared<Command>(c);
  }
}

}  // namespace

Program copying_release_transform(const Program& p) {
  Program out = p;
  out.body = transform_command(p, *p.body);
  return out;
}

std::vector<EventSkeleton> trace_skeleton(const Program& p, const Trace& t) {
  auto label_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < p.labels.size(); ++i)
      if (p.labels[i] == name) return static_cast<int>(i);
    return -1;
  };
  auto lock_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < p.locks.size(); ++i)
      if (p.locks[i] == name) return static_cast<int>(i);
    return -1;
  };
  std::vector<EventSkeleton> out;
  for (const Event& e : t.events) {
    EventSkeleton sk;
    sk.target = e.target;
    sk.value = e.value;
    sk.release = e.release;
    for (const auto& [from, to] : e.policy.flows)
      sk.flows.push_back({label_index(from), label_index(to)});
    std::sort(sk.flows.begin(), sk.flows.end());
    for (const auto& l : e.policy.open_locks) sk.locks.push_back(lock_index(l));
    std::sort(sk.locks.begin(), sk.locks.end());
    out.push_back(std::move(sk));
  }
  return out;
}

bool same_flow_structure(const Program& a, const Program& b,
                         const Limits& limits) {
  if (a.vars.size() != b.vars.size()) return false;
  auto ua = enumerate_universe(a, limits);
  auto ub = enumerate_universe(b, limits);
  if (ua.size() != ub.size()) return false;
  for (std::size_t i = 0; i < ua.size(); ++i) {
    Trace ta = run(a, initial_store(a, ua[i]), limits.budget);
    Trace tb = run(b, initial_store(b, ub[i]), limits.budget);
    if (ta.truncated || tb.truncated) return false;
    if (trace_skeleton(a, ta) != trace_skeleton(b, tb)) return false;
  }
  return true;
}

}  // namespace dynpol
