#include "remat/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "remat/algorithms.hpp"
#include "remat/automaton_io.hpp"
#include "remat/experiments.hpp"
#include "remat/folk.hpp"
#include "remat/manifest.hpp"
#include "remat/market_io.hpp"
#include "remat/repeated.hpp"

namespace remat {

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("REMAT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw input_error("REMAT_SEED is not a number");
    }
  }
  return 17;
}

std::uint64_t subseed(std::uint64_t master, std::uint64_t idx) {
  return Rng::stream(master, idx).next_u64();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << content;
  if (!out) throw input_error("write to " + path + " failed");
}

std::string join_args(int argc, const char* const* argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += ' ';
    line += argv[i];
  }
  return line;
}

std::string roster_line(const MarketSpec& spec, const Matching& m) {
  std::string line;
  for (int h = 0; h < spec.hospitals(); ++h) {
    if (h) line += " | ";
    line += spec.hospital_names[h] + ":";
    for (int w : m.roster[h]) line += " " + spec.student_names[w];
  }
  return line;
}

TierConfig default_simulate_config() {
  TierConfig cfg;
  cfg.hospital_shares = {1.0};
  cfg.student_shares = {1.0};
  cfg.common_values = {0.0};
  return cfg;
}

// Two seats per desk is the canonical shape for this construction: losing one
// seat to the reduced-quota branch is a real cut, and the markets stay small.
// The report carries the margins either way, so a run that cannot be
// certified says so rather than hiding it.
TierConfig default_capacity_config() {
  TierConfig cfg = default_simulate_config();
  cfg.quota = 2;
  return cfg;
}

MatchingLottery parse_lambda0(const NamedMatchings& ms, const std::string& text) {
  MatchingLottery l;
  std::stringstream ss(text);
  std::string entry;
  std::vector<std::pair<std::string, std::string>> parts;
  while (std::getline(ss, entry, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      parts.emplace_back(entry, "");
    else
      parts.emplace_back(entry.substr(0, colon), entry.substr(colon + 1));
  }
  if (parts.empty()) throw input_error("empty lambda0 spec");
  for (const auto& [name, weight] : parts) {
    double w = 1.0;
    if (!weight.empty())
      w = parse_number(weight, "lambda0 weight for " + name);
    else if (parts.size() > 1)
      throw input_error("lambda0 entries need name:weight when mixing");
    l.outcomes.emplace_back(find_matching(ms, name), w);
  }
  return l;
}

struct CheckArgs {
  std::string market, automaton;
  double delta = -1.0;
  bool bisect = false;
  bool all_subsets = false;
};

struct BuildCommon {
  std::string market, matchings, config, out, market_out;
  std::string target, fallback, lambda0;
  double delta = 0.95, p0 = 0.5, pr = 0.9;
  int n = 0, tier = 1, length = 0, budget = 64, draws = 4, cap = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct SimArgs {
  std::string experiment, config, out;
  int n = 0, tier = 1, length = 0, draws = 4;
  long trials = 1000;
  double eps = 0.5, gamma = 0.1, delta = 0.8, p0 = 0.5, pr = 0.9;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool eps_set = false;
};

int cmd_analyze(const std::string& market_path, const std::string& matchings_path, int cap,
                std::ostream& out) {
  const MarketSpec spec = load_market(market_path);
  out << "market: " << spec.hospitals() << " hospitals, " << spec.students()
      << " students\n";
  const std::vector<Matching> stable = enumerate_stable_matchings(spec, cap);
  out << "stable matchings: " << stable.size() << "\n";
  for (const Matching& m : stable) out << "  " << roster_line(spec, m) << "\n";
  const TopCoalitionSequence seq = top_coalition_sequence(spec);
  out << "top coalition pairs: " << seq.pairs.size() << "\n";
  for (const TopPair& p : seq.pairs) {
    out << "  " << spec.hospital_names[p.hospital] << ":";
    for (int w : p.students) out << " " << spec.student_names[w];
    out << "\n";
  }
  if (spec.hospitals() > 0) {
    const MinmaxResult naive = naive_minmax(spec, cap);
    const MinmaxResult reduced = reduced_minmax(spec, seq, cap);
    out << "minmax naive:";
    for (int f = 0; f < spec.hospitals(); ++f)
      out << " " << spec.hospital_names[f] << " " << format_double(naive.value[f]);
    out << "\nminmax reduced:";
    for (int f = 0; f < spec.hospitals(); ++f)
      out << " " << spec.hospital_names[f] << " " << format_double(reduced.value[f]);
    out << "\n";
  }
  if (!matchings_path.empty()) {
    for (const auto& [name, m] : load_matchings(spec, matchings_path))
      out << name << ": " << (is_stable(spec, m) ? "stable" : "unstable") << "\n";
  }
  return 0;
}

int cmd_check(const CheckArgs& args, std::ostream& out) {
  const MarketSpec spec = load_market(args.market);
  ProcessAutomaton a = load_automaton(spec, args.automaton);
  if (args.delta >= 0.0) {
    if (args.delta >= 1.0) throw input_error("delta must lie in [0, 1)");
    a.discount = args.delta;
  }
  if (args.bisect) {
    auto passes = [&](double d) {
      ProcessAutomaton b = a;
      b.discount = d;
      return check_self_enforcing(spec, b, args.all_subsets).self_enforcing;
    };
    const BisectResult r = min_delta_bisect(passes);
    switch (r.status) {
      case BisectResult::Found:
        out << "delta_star " << format_double(r.delta) << "\n";
        return 0;
      case BisectResult::AlwaysPasses:
        out << "delta_star " << format_double(r.delta) << " (passes at the low end)\n";
        return 0;
      case BisectResult::NeverPasses:
        out << "never passes on [0, 0.999]\n";
        return 1;
    }
    return 1;
  }
  const CheckResult r = check_self_enforcing(spec, a, args.all_subsets);
  if (r.self_enforcing) {
    out << "PASS\n";
    return 0;
  }
  out << "FAIL\n";
  for (const Witness& w : r.witnesses) out << w.describe(spec, a) << "\n";
  return 1;
}

int cmd_build(const std::string& kind, const BuildCommon& args, const RunManifest& manifest,
              std::ostream& out, std::ostream& err) {
  if (kind == "trigger" || kind == "folk") {
    const MarketSpec spec = load_market(args.market);
    const NamedMatchings ms = load_matchings(spec, args.matchings);
    ProcessAutomaton a;
    if (kind == "trigger") {
      const Matching& target = find_matching(ms, args.target);
      const Matching& fallback = find_matching(ms, args.fallback);
      if (!is_stable(spec, fallback))
        throw input_error("fallback matching " + args.fallback + " is not stable");
      a = build_trigger_process(spec, target, fallback, args.delta);
    } else {
      const MatchingLottery base = parse_lambda0(ms, args.lambda0);
      PunishmentScheme scheme =
          find_player_specific_punishments(spec, base, args.budget, args.cap);
      if (args.length > 0) scheme.punishment_length = args.length;
      a = build_folk_automaton(spec, scheme, args.delta);
      out << "{\n  \"punishment_length\": " << scheme.punishment_length
          << ",\n  \"hospitals\": [\n";
      for (size_t i = 0; i < scheme.free_hospitals.size(); ++i) {
        const int f = scheme.free_hospitals[i];
        out << "    {\"name\": \"" << spec.hospital_names[f] << "\", \"base\": "
            << format_double(lottery_utility(spec, f, scheme.base)) << ", \"reentry\": "
            << format_double(lottery_utility(spec, f, scheme.reentry[f]))
            << ", \"floor\": " << format_double(scheme.reduced_minmax[f]) << "}"
            << (i + 1 < scheme.free_hospitals.size() ? "," : "") << "\n";
      }
      out << "  ]\n}\n";
    }
    const std::string text = manifest_comment(manifest) + serialize_automaton(spec, a);
    if (args.out.empty())
      out << text;
    else
      emit_file(args.out, text);
    return 0;
  }
  if (kind == "capacity") {
    if (args.n < 1) throw input_error("build capacity needs --n");
    const TierConfig cfg =
        args.config.empty() ? default_capacity_config() : load_tier_config(args.config);
    const std::uint64_t seed = args.seed_set ? args.seed : default_seed();
    const RealizedMarket mk = generate_market(cfg, args.n, subseed(seed, 0));
    const CapacityProcess cp =
        build_capacity_reduction_process(mk, args.tier, args.p0, args.pr, args.length,
                                         args.delta, args.draws, subseed(seed, 1));
    out << cp.report.text();
    const std::string text =
        manifest_comment(manifest) + serialize_automaton(mk.spec, cp.automaton);
    if (!args.out.empty()) {
      emit_file(args.out, text);
      const std::string market_out =
          args.market_out.empty() ? args.out + ".market" : args.market_out;
      emit_file(market_out, manifest_comment(manifest) + serialize_market(mk.spec));
    }
    if (!cp.report.certified) {
      err << "construction certificate failed: " << cp.report.note << "\n";
      return 1;
    }
    return 0;
  }
  throw input_error("unknown build kind " + kind + " (trigger, folk, capacity)");
}

int cmd_simulate(const SimArgs& args, const RunManifest& manifest, std::ostream& out,
                 std::ostream& err) {
  if (args.n < 1) throw input_error("simulate needs --n");
  const TierConfig cfg =
      args.config.empty() ? default_simulate_config() : load_tier_config(args.config);
  const std::uint64_t seed = args.seed_set ? args.seed : default_seed();
  ExperimentResult res;
  int code = 0;
  std::string extra;
  if (args.experiment == "fill") {
    res = mc_top_fill_probability(cfg, args.n, args.eps, args.trials, seed);
  } else if (args.experiment == "rank") {
    res = mc_rank_distribution(cfg, args.n, args.trials, seed);
  } else if (args.experiment == "gap") {
    res = mc_punishment_gap(cfg, args.n, args.trials, seed);
  } else if (args.experiment == "clustering") {
    res = mc_clustering(cfg, args.n, args.eps, args.gamma, args.trials, seed);
  } else if (args.experiment == "nodev") {
    const NoDevResult r = no_deviation_from_punishment(cfg, args.n, args.trials, seed);
    res = r.stats;
    if (!r.pass) {
      err << r.counterexample << "\n";
      code = 1;
    }
  } else if (args.experiment == "eliteaudit") {
    if (args.config.empty())
      throw input_error("eliteaudit needs --config with at least two hospital tiers");
    const RealizedMarket mk = generate_market(cfg, args.n, subseed(seed, 0));
    const CapacityProcess cp =
        build_capacity_reduction_process(mk, args.tier, args.p0, args.pr, args.length,
                                         args.delta, args.draws, subseed(seed, 1));
    double eps = args.eps;
    if (!args.eps_set) {
      eps = (1.0 - args.delta) / (2.0 * args.delta) * cfg.common_values.front();
      if (!(eps > 0.0))
        throw input_error("the default eps is zero here; pass --eps explicitly");
    }
    const EliteAuditReport rep = elite_deviation_audit(mk, cp.automaton, args.delta, eps);
    extra = rep.text(mk.spec, cp.automaton);
    res = ExperimentResult{"eliteaudit", args.n, (long)rep.rows.size(), {}};
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const double g = rep.rows[i].gain;
      lo = i ? std::min(lo, g) : g;
      hi = i ? std::max(hi, g) : g;
      res.rows.push_back({"gain_" + cp.automaton.states[rep.rows[i].state].name + "_" +
                              mk.spec.hospital_names[rep.rows[i].hospital],
                          g, 0.0});
    }
    res.rows.push_back({"targets", (double)rep.rows.size(), 0.0});
    res.rows.push_back({"min_gain", lo, 0.0});
    res.rows.push_back({"max_gain", hi, 0.0});
  } else {
    throw input_error("unknown experiment " + args.experiment +
                      " (fill, rank, gap, clustering, nodev, eliteaudit)");
  }
  const std::string csv = manifest_comment(manifest) + to_csv(res);
  out << extra << csv;
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    emit_file((std::filesystem::path(args.out) / (args.experiment + ".csv")).string(), csv);
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"repeated matching market toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string market_path, matchings_path;
  int cap = 10;
  CLI::App* analyze = app.add_subcommand("analyze", "stable set, peeling, security levels");
  analyze->add_option("--market", market_path, "market file")->required();
  analyze->add_option("--matchings", matchings_path, "named matchings to classify");
  analyze->add_option("--cap", cap, "enumeration refuses larger student counts");

  CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check", "one-shot deviation audit");
  check_cmd->add_option("--market", check.market, "market file")->required();
  check_cmd->add_option("--automaton", check.automaton, "process file")->required();
  check_cmd->add_option("--delta", check.delta, "discount override");
  check_cmd->add_flag("--bisect", check.bisect, "locate the passing threshold");
  check_cmd->add_flag("--all-subsets", check.all_subsets, "brute-force coalition scan");

  BuildCommon build;
  CLI::App* build_cmd = app.add_subcommand("build", "construct a matching process");
  build_cmd->require_subcommand(1);
  CLI::App* trigger = build_cmd->add_subcommand("trigger", "play target until a deviation");
  trigger->add_option("--market", build.market, "market file")->required();
  trigger->add_option("--matchings", build.matchings, "named matchings file")->required();
  trigger->add_option("--target", build.target, "on-path matching name")->required();
  trigger->add_option("--fallback", build.fallback, "absorbing matching name")->required();
  trigger->add_option("--delta", build.delta, "discount");
  trigger->add_option("--out", build.out, "automaton file to write");
  CLI::App* folk = build_cmd->add_subcommand("folk", "base lottery with tailored spells");
  folk->add_option("--market", build.market, "market file")->required();
  folk->add_option("--matchings", build.matchings, "named matchings file")->required();
  folk->add_option("--lambda0", build.lambda0, "base lottery, name[:weight],...")
      ->required();
  folk->add_option("--delta", build.delta, "discount");
  folk->add_option("--L", build.length, "spell length override (0 = sized automatically)");
  folk->add_option("--budget", build.budget, "search attempts");
  folk->add_option("--cap", build.cap, "enumeration cap on unlocked students");
  folk->add_option("--out", build.out, "automaton file to write");
  CLI::App* capacity = build_cmd->add_subcommand("capacity", "rotating seat reduction");
  capacity->add_option("--config", build.config, "tier config file");
  capacity->add_option("--n", build.n, "hospital count")->required();
  capacity->add_option("--tier", build.tier, "hospital tier to rotate");
  capacity->add_option("--p0", build.p0, "on-path weight of the reduced round");
  capacity->add_option("--pr", build.pr, "re-entry weight of the base draw");
  capacity->add_option("--L", build.length, "spell length (0 = sized automatically)");
  capacity->add_option("--delta", build.delta, "discount");
  capacity->add_option("--draws", build.draws, "seat-lottery draws folded into the state");
  capacity->add_option("--seed", build.seed, "master seed")->each([&](const std::string&) {
    build.seed_set = true;
  });
  capacity->add_option("--out", build.out, "automaton file to write");
  capacity->add_option("--market-out", build.market_out, "generated market file to write");

  SimArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
  simulate->add_option("experiment", sim.experiment,
                       "fill, rank, gap, clustering, nodev, or eliteaudit")
      ->required();
  simulate->add_option("--config", sim.config, "tier config file");
  simulate->add_option("--n", sim.n, "hospital count")->required();
  simulate->add_option("--trials", sim.trials, "trial count");
  simulate->add_option("--seed", sim.seed, "master seed")->each([&](const std::string&) {
    sim.seed_set = true;
  });
  simulate->add_option("--eps", sim.eps, "fit threshold")->each([&](const std::string&) {
    sim.eps_set = true;
  });
  simulate->add_option("--gamma", sim.gamma, "worst-share for clustering");
  simulate->add_option("--delta", sim.delta, "discount for eliteaudit");
  simulate->add_option("--tier", sim.tier, "hospital tier for eliteaudit");
  simulate->add_option("--p0", sim.p0, "eliteaudit process parameter");
  simulate->add_option("--pr", sim.pr, "eliteaudit process parameter");
  simulate->add_option("--L", sim.length, "eliteaudit spell length (0 = auto)");
  simulate->add_option("--draws", sim.draws, "eliteaudit seat-lottery draws");
  simulate->add_option("--out", sim.out, "directory for CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  int code = 2;
  try {
    RunManifest manifest;
    manifest.command_line = join_args(argc, argv);
    for (const std::string& path :
         {market_path, matchings_path, check.market, check.automaton, build.market,
          build.matchings, build.config, sim.config})
      if (!path.empty()) manifest.input_digests.emplace_back(path, fnv1a64(slurp(path)));

    if (analyze->parsed()) {
      code = cmd_analyze(market_path, matchings_path, cap, out);
    } else if (check_cmd->parsed()) {
      code = cmd_check(check, out);
    } else if (build_cmd->parsed()) {
      std::string kind;
      if (trigger->parsed()) kind = "trigger";
      if (folk->parsed()) kind = "folk";
      if (capacity->parsed()) {
        kind = "capacity";
        manifest.seed = build.seed_set ? build.seed : default_seed();
      }
      code = cmd_build(kind, build, manifest, out, err);
    } else if (simulate->parsed()) {
      manifest.seed = sim.seed_set ? sim.seed : default_seed();
      code = cmd_simulate(sim, manifest, out, err);
    }
  } catch (const input_error& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  err << "# wall time: " << format_double(elapsed.count()) << " s\n";
  return code;
}

}  // namespace remat
