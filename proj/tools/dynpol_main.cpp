#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "dynpol/facets.hpp"
#include "dynpol/parser.hpp"
#include "dynpol/printer.hpp"
#include "dynpol/report.hpp"
#include "dynpol/scheme.hpp"

namespace {

using namespace dynpol;

constexpr int kUsageError = 64;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

void emit(const Json& report, long long ms, const std::string& json_path) {
  if (json_path.empty()) return;
  Json out;
  out["report"] = report;
  out["timingMs"] = ms;  // excluded from golden comparisons
  std::ofstream f(json_path);
  f << out.dump(2) << "\n";
}

std::string read_arg_or_file(const std::string& arg) {
  std::ifstream in(arg);
  if (!in) return arg;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Attacker resolve_attacker(const Program& p, const std::string& flag_level,
                          const std::string& caps_flag,
                          const std::string& automaton_file) {
  Attacker a;
  if (!flag_level.empty()) {
    a.level = flag_level;
  } else if (p.attacker) {
    a.level = p.attacker->level;
    a.caps = p.attacker->caps;
  } else {
    throw std::invalid_argument(
        "no attacker: pass --attacker or declare one in the program");
  }
  if (!caps_flag.empty()) {
    a.caps.clear();
    std::istringstream ss(caps_flag);
    std::string item;
    while (std::getline(ss, item, ',')) a.caps.insert(item);
  }
  if (!automaton_file.empty()) {
    a.memory = AttackerMemory::Automaton;
    a.automaton = std::make_shared<ForgetfulAutomaton>(
        parse_automaton_file(automaton_file));
  }
  return a;
}

int run_check(const std::string& program_path, const std::string& condition,
              const std::string& attacker_flag, const std::string& caps_flag,
              const std::string& automaton_file,
              const std::string& release_policy, const Limits& limits,
              const std::string& domain_flag, bool all_relations,
              const std::string& json_path) {
  Timer timer;
  Program p = parse_program_file(program_path);
  if (!domain_flag.empty()) {
    auto dots = domain_flag.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("--domain expects LO..HI");
    p.domain = {std::stoi(domain_flag.substr(0, dots)),
                std::stoi(domain_flag.substr(dots + 2))};
  }

  Verdict v;
  if (condition == "gradual" || condition == "flowspecs") {
    v = check_gradual_release(p, limits);
  } else if (condition == "paralocks") {
    v = check_paralocks(p, limits);
  } else if (condition == "rx") {
    v = check_rx(p, resolve_attacker(p, attacker_flag, caps_flag, ""), limits);
  } else if (condition == "hicks") {
    v = check_fixed_policy_ni(p, resolve_attacker(p, attacker_flag, caps_flag, ""),
                              all_relations, limits);
  } else if (condition == "bisim" || condition == "flowlocks" ||
             condition == "nondisclosure") {
    v = check_strong_bisimulation(
        p, resolve_attacker(p, attacker_flag, caps_flag, ""), limits);
  } else if (condition == "balliu") {
    ReleasePolicy rp;
    if (release_policy == "equiv") rp = ReleasePolicy::EquivalenceNow;
    else if (release_policy == "timetrans") rp = ReleasePolicy::TimeTransitiveAllowing;
    else if (release_policy == "direct") rp = ReleasePolicy::DirectReleaseAllowing;
    else throw std::invalid_argument("--release-policy must be equiv|timetrans|direct");
    v = check_epistemic(p, resolve_attacker(p, attacker_flag, caps_flag, ""),
                        ObservationModel::AssignEvents, rp, limits);
  } else if (condition == "askarov-chong" || condition == "forgetful") {
    Attacker a = resolve_attacker(p, attacker_flag, caps_flag, automaton_file);
    v = check_forgetful(p, {a}, limits);
  } else if (condition == "tworun") {
    Attacker a = resolve_attacker(p, attacker_flag, caps_flag, "");
    v = check_two_run_ni(p, a, p.initial_policy.flows, limits);
  } else {
    throw std::invalid_argument("unknown condition '" + condition + "'");
  }

  Json report = verdict_json(condition, program_path, p, v);
  std::cout << condition << " " << program_path << ": " << status_name(v.status);
  if (v.witness) std::cout << " (" << v.witness->note << ")";
  std::cout << "\n";
  emit(report, timer.ms(), json_path);
  return exit_code_for(v.status);
}

int run_table(const std::string& corpus_dir, const std::string& golden_path,
              const std::string& only_group, const Limits& limits,
              const std::string& json_path) {
  Timer timer;
  FacetCorpus corpus = FacetCorpus::load(corpus_dir);
  auto rows = reproduce_table(corpus, limits, only_group);
  std::cout << table_text(rows);
  Json got = table_json(rows);

  Json report;
  report["matrix"] = got;
  int rc = 0;
  if (only_group.empty()) {
    std::string path = golden_path.empty()
                           ? corpus_dir + "/golden/facet_matrix.json"
                           : golden_path;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open golden file " + path);
    Json expected = Json::parse(in);
    auto diffs = diff_tables(got, expected);
    Json jd = Json::array();
    for (const auto& d : diffs) {
      std::cout << "MISMATCH " << d << "\n";
      jd.push_back(d);
    }
    report["diffs"] = jd;
    if (diffs.empty()) std::cout << "matrix matches the expected classification\n";
    rc = diffs.empty() ? 0 : 1;
  }
  emit(report, timer.ms(), json_path);
  return rc;
}

int run_scheme(const std::string& scheme_path, const std::string& global_arg,
               const std::string& filter_arg, const std::string& seq_arg,
               const std::string& embed_path, const std::string& map_arg,
               const std::string& state_map_arg, int depth, const Limits& limits,
               const std::string& json_path) {
  Timer timer;
  PolicyScheme scheme = PolicyScheme::load_file(scheme_path);
  SchemeCheck result;
  std::string operation;

  if (!embed_path.empty()) {
    operation = "embedding";
    PolicyScheme embedded = PolicyScheme::load_file(embed_path);
    Embedding emb;
    std::istringstream ss(map_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--map expects From=To pairs");
      emb.label_map[item.substr(0, eq)] = item.substr(eq + 1);
    }
    if (!state_map_arg.empty()) {
      std::istringstream sm(state_map_arg);
      while (std::getline(sm, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--state-map expects From=To pairs");
        emb.state_map[item.substr(0, eq)] = item.substr(eq + 1);
      }
    } else {
      // infer: each embedded state goes to the host state carrying the image
      // of its relation; ambiguity requires an explicit --state-map
      auto mapped = [&](const FlowRelation& rel) {
        FlowRelation out;
        for (const auto& [from, to] : rel) {
          auto f = emb.label_map.find(from);
          auto t = emb.label_map.find(to);
          if (f == emb.label_map.end() || t == emb.label_map.end())
            throw std::invalid_argument("label map misses a scheme label");
          out.insert({f->second, t->second});
        }
        return out;
      };
      for (const auto& s : embedded.states) {
        FlowRelation want = mapped(embedded.relation_of(s));
        std::vector<std::string> hits;
        for (const auto& h : scheme.states) {
          FlowRelation restricted;
          std::set<std::string> image;
          for (const auto& [k, v] : emb.label_map) image.insert(v);
          for (const auto& [from, to] : scheme.relation_of(h))
            if (image.count(from) && image.count(to))
              restricted.insert({from, to});
          if (restricted == want) hits.push_back(h);
        }
        if (hits.size() != 1)
          throw std::invalid_argument(
              "cannot infer a unique host state for '" + s +
              "'; pass --state-map");
        emb.state_map[s] = hits[0];
      }
    }
    result = check_embedding(embedded, scheme, emb, depth);
  } else if (!seq_arg.empty()) {
    operation = "sequence-invariant";
    PredPtr phi = parse_predicate(read_arg_or_file(seq_arg));
    result = check_sequence_invariant(scheme, phi, depth, limits);
  } else if (!global_arg.empty() && !filter_arg.empty()) {
    operation = "conditional-invariant";
    result = check_conditional_invariant(scheme, parse_predicate(filter_arg),
                                         parse_predicate(read_arg_or_file(global_arg)),
                                         depth);
  } else if (!global_arg.empty()) {
    operation = "global-invariant";
    result = check_global_invariant(
        scheme, parse_predicate(read_arg_or_file(global_arg)), depth);
  } else {
    throw std::invalid_argument(
        "pass one of --global, --seq, or --embed (optionally --filter)");
  }

  std::cout << operation << " on " << scheme_path << ": "
            << (result.holds ? "holds" : "fails");
  if (!result.holds && !result.failure_reason.empty())
    std::cout << " (" << result.failure_reason << ")";
  if (!result.counterexample.empty()) {
    std::cout << "\n  path:";
    for (const auto& s : result.counterexample) std::cout << " " << s;
  }
  std::cout << "\n  " << (result.saturated ? "saturated before depth bound"
                                           : "depth-limited")
            << " (depth " << depth << ")\n";

  Json report;
  report["operation"] = operation;
  report["scheme"] = scheme_path;
  report["holds"] = result.holds;
  report["saturated"] = result.saturated;
  report["counterexample"] = result.counterexample;
  report["failureReason"] = result.failure_reason;
  emit(report, timer.ms(), json_path);
  return result.holds ? 0 : 1;
}

int run_corpus_list(const std::string& corpus_dir) {
  FacetCorpus corpus = FacetCorpus::load(corpus_dir);
  for (const auto& [facet, entry] : corpus.entries) {
    std::cout << facet_name(facet) << " (" << facet_dir_name(facet) << ")\n";
    std::cout << "  canonical";
    for (const auto& [name, prog] : entry.variants) std::cout << " " << name;
    if (entry.context_secure) std::cout << " context_secure";
    if (entry.context_insecure) std::cout << " context_insecure";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for dynamic information-flow policies"};
  app.require_subcommand(1);

  Limits limits;
  std::string json_path;

  auto* check = app.add_subcommand("check", "run one security condition on a program");
  std::string program_path, condition, attacker_flag, caps_flag, automaton_file,
      release_policy = "equiv", domain_flag;
  bool all_relations = false;
  check->add_option("program", program_path, "program file (.dpol)")->required();
  check->add_option("--condition", condition, "condition name")->required();
  check->add_option("--attacker", attacker_flag, "attacker level");
  check->add_option("--caps", caps_flag, "attacker capabilities, comma separated");
  check->add_option("--automaton", automaton_file, "forgetful attacker automaton file");
  check->add_option("--release-policy", release_policy, "equiv|timetrans|direct");
  check->add_option("--budget", limits.budget, "step budget");
  check->add_option("--domain", domain_flag, "value domain override LO..HI");
  check->add_flag("--all-relations", all_relations,
                  "quantify over every relation on the declared labels");
  check->add_option("--json", json_path, "write a JSON report");

  auto* table = app.add_subcommand("table", "facet classification matrix");
  std::string corpus_dir = "corpus/v1", golden_path, only_group;
  table->add_option("--corpus", corpus_dir, "corpus directory");
  table->add_option("--golden", golden_path, "expected matrix to diff against");
  table->add_option("--only", only_group, "row group filter: NI, BI or Epistemic");
  table->add_option("--budget", limits.budget, "step budget");
  table->add_option("--json", json_path, "write a JSON report");

  auto* scheme = app.add_subcommand("scheme", "policy scheme analysis");
  std::string scheme_path, global_arg, filter_arg, seq_arg, embed_path, map_arg,
      state_map_arg;
  int depth = 8;
  scheme->add_option("scheme", scheme_path, "scheme file (.json)")->required();
  scheme->add_option("--global", global_arg, "global invariant (text or file)");
  scheme->add_option("--filter", filter_arg, "state filter, makes the invariant conditional");
  scheme->add_option("--seq", seq_arg, "sequence invariant (text or file)");
  scheme->add_option("--embed", embed_path, "embedded scheme to check against this host");
  scheme->add_option("--map", map_arg, "label map From=To, comma separated");
  scheme->add_option("--state-map", state_map_arg,
                     "state map From=To, comma separated (inferred when omitted)");
  scheme->add_option("--depth", depth, "exploration depth");
  scheme->add_option("--json", json_path, "write a JSON report");

  auto* list = app.add_subcommand("corpus-list", "list the facet corpus");
  list->add_option("--corpus", corpus_dir, "corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (check->parsed())
      return run_check(program_path, condition, attacker_flag, caps_flag,
                       automaton_file, release_policy, limits, domain_flag,
                       all_relations, json_path);
    if (table->parsed())
      return run_table(corpus_dir, golden_path, only_group, limits, json_path);
    if (scheme->parsed())
      return run_scheme(scheme_path, global_arg, filter_arg, seq_arg, embed_path,
                        map_arg, state_map_arg, depth, limits, json_path);
    if (list->parsed()) return run_corpus_list(corpus_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
