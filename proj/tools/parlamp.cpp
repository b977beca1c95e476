#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parlamp/dataset.hpp"
#include "parlamp/engine.hpp"
#include "parlamp/errors.hpp"
#include "parlamp/lamp.hpp"
#include "parlamp/oracle.hpp"
#include "parlamp/synth.hpp"

namespace {

using namespace parlamp;

struct GenOptions {
  std::string kind;  // empty = read files; random|planted|skewed|dense
  int items = 12;
  int transactions = 64;
  double density = 0.3;
  int pattern = 3;
  double strength = 0.9;
};

struct CommonOptions {
  std::string transactions_path;
  std::string labels_path;
  GenOptions gen;
  double alpha = 0.05;
  int workers = 1;
  std::string transport = "sim";
  std::uint64_t seed = 0;
  int lifeline_l = 2;
  int steal_w = 1;
  double probe_ms = 1.0;
  bool naive = false;
  std::string out_path;
};

void add_input_options(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("transactions", c.transactions_path,
                  "transactions file (.csv for the combined format)");
  cmd->add_option("labels", c.labels_path, "labels file (one 0/1 per line)");
  cmd->add_option("--gen", c.gen.kind, "synthesize the input instead of reading files")
      ->check(CLI::IsMember({"random", "planted", "skewed", "dense"}));
  cmd->add_option("--gen-items", c.gen.items, "synthetic item count");
  cmd->add_option("--gen-trans", c.gen.transactions, "synthetic transaction count");
  cmd->add_option("--gen-density", c.gen.density, "synthetic item density");
  cmd->add_option("--gen-pattern", c.gen.pattern, "planted pattern size");
  cmd->add_option("--gen-strength", c.gen.strength, "planted pattern strength");
}

void add_run_options(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--alpha", c.alpha, "family-wise error rate target")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  cmd->add_option("--workers", c.workers, "worker count P")->check(CLI::PositiveNumber);
  cmd->add_option("--transport", c.transport, "sim | threads")
      ->check(CLI::IsMember({"sim", "threads"}));
  cmd->add_option("--seed", c.seed, "run seed (scheduler and synthesis)");
  cmd->add_option("--lifeline-l", c.lifeline_l, "lifeline hypercube side length")
      ->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--steal-w", c.steal_w, "random steal attempts before lifelines")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--probe-ms", c.probe_ms, "target probe interval (threads)");
  cmd->add_flag("--naive", c.naive, "disable work stealing (termination waves still run)");
  cmd->add_option("--out", c.out_path, "write the result table to this path");
}

RawDatabase load_input_raw(const CommonOptions& c, std::uint64_t seed) {
  const GenOptions& g = c.gen;
  if (!g.kind.empty()) {
    if (g.kind == "random") return gen_random(seed, g.items, g.transactions, g.density);
    if (g.kind == "planted")
      return gen_planted(seed, g.items, g.transactions, g.density, g.pattern, g.strength);
    if (g.kind == "skewed") return gen_skewed(seed, g.items, g.transactions);
    return gen_dense(seed, g.items, g.transactions, g.density);
  }
  if (c.transactions_path.empty())
    throw DataError("no input: give a transactions file or --gen");
  if (c.transactions_path.size() >= 4 &&
      c.transactions_path.substr(c.transactions_path.size() - 4) == ".csv")
    return load_raw_csv(c.transactions_path);
  return load_raw(c.transactions_path, c.labels_path);
}

RunParams run_params(const CommonOptions& c) {
  RunParams p;
  p.workers = c.workers;
  p.transport = c.transport == "threads" ? TransportKind::kThreads : TransportKind::kSim;
  p.seed = c.seed;
  p.lifeline_l = c.lifeline_l;
  p.steal_w = c.steal_w;
  p.probe_ms = c.probe_ms;
  p.naive = c.naive;
  return p;
}

void emit(const CommonOptions& c, const std::string& table) {
  if (c.out_path.empty()) {
    std::cout << table;
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw DataError("cannot open file: " + c.out_path);
  out << table;
}

std::string metrics_table(const PassOutcome& phase1, const PassOutcome& phase2) {
  std::string out =
      "worker\tmain_s\tpreprocess_s\tprobe_s\tidle_s\tnodes_expanded\t"
      "steals_attempted\tsteals_succeeded\tmessages_sent\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < phase1.metrics.size(); ++i) {
    const WorkerMetrics& a = phase1.metrics[i];
    const WorkerMetrics& b = phase2.metrics[i];
    out += std::to_string(i) + "\t" + fmt(a.main_s + b.main_s) + "\t" +
           fmt(a.preprocess_s + b.preprocess_s) + "\t" + fmt(a.probe_s + b.probe_s) + "\t" +
           fmt(a.idle_s + b.idle_s) + "\t" +
           std::to_string(a.nodes_expanded + b.nodes_expanded) + "\t" +
           std::to_string(a.steals_attempted + b.steals_attempted) + "\t" +
           std::to_string(a.steals_succeeded + b.steals_succeeded) + "\t" +
           std::to_string(a.messages_sent + b.messages_sent) + "\n";
  }
  out += "# waves\t" + std::to_string(phase1.waves.waves + phase2.waves.waves) +
         "\tretries\t" + std::to_string(phase1.waves.retries + phase2.waves.retries) + "\n";
  return out;
}

int cmd_mine(const CommonOptions& c, int min_support) {
  TransactionDatabase db = TransactionDatabase::from_raw(load_input_raw(c, c.seed));
  std::vector<ClosedSetRecord> records;
  count_closed_sequential(db, min_support, [&](const SearchNode& node) {
    PatternSupport s{node.support,
                     static_cast<int>(node.cover.and_count(db.positive_bitset()))};
    records.push_back({node.itemset, s});
  });
  emit(c, format_closed_table(db, records));
  std::cout << "closed_sets\t" << records.size() << "\n";
  return 0;
}

int cmd_lamp(const CommonOptions& c) {
  TransactionDatabase db = TransactionDatabase::from_raw(load_input_raw(c, c.seed));
  LampRun run = run_lamp_parallel(db, c.alpha, run_params(c));
  emit(c, format_lamp_table(db, run.result));
  return 0;
}

int cmd_sim(const CommonOptions& c, int fuzz, const std::string& trace_path, int max_delay,
            double deliver_bias, bool inject_duplicate_give) {
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw DataError("cannot open file: " + trace_path);
  }
  int runs = std::max(1, fuzz);
  for (int k = 0; k < runs; ++k) {
    std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
    CommonOptions run_opts = c;
    run_opts.seed = seed;
    RunParams params = run_params(run_opts);
    params.transport = TransportKind::kSim;
    params.max_delay = max_delay;
    params.deliver_bias = deliver_bias;
    params.inject_duplicate_give = inject_duplicate_give;
    if (trace_file.is_open()) params.trace = &trace_file;
    TransactionDatabase db = TransactionDatabase::from_raw(load_input_raw(run_opts, seed));
    LampRun run = run_lamp_parallel(db, c.alpha, params);
    std::cout << "seed " << seed << "\tok\tevents "
              << run.phase1.sim_events + run.phase2.sim_events << "\twaves "
              << run.phase1.waves.waves + run.phase2.waves.waves << "\tlambda "
              << run.result.final_lambda << "\tsignificant " << run.result.significant.size()
              << "\n";
  }
  return 0;
}

int cmd_bench(const CommonOptions& c, const std::vector<int>& worker_list) {
  TransactionDatabase db = TransactionDatabase::from_raw(load_input_raw(c, c.seed));
  std::string out;
  out += "# bench\tN " + std::to_string(db.num_transactions()) + "\titems " +
         std::to_string(db.num_items()) + "\talpha ";
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", c.alpha);
    out += buf;
  }
  out += "\n";
  double base_wall = 0;
  for (std::size_t i = 0; i < worker_list.size(); ++i) {
    CommonOptions opts = c;
    opts.workers = worker_list[i];
    opts.transport = "threads";
    RunParams params = run_params(opts);

    auto t0 = std::chrono::steady_clock::now();
    LampRun run = run_lamp_parallel(db, c.alpha, params);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (i == 0) base_wall = wall;

    char buf[128];
    std::snprintf(buf, sizeof buf, "# workers\t%d\twall_s\t%.6f\tspeedup\t%.3f\n",
                  worker_list[i], wall, base_wall / wall);
    out += buf;
    out += metrics_table(run.phase1, run.phase2);

    if (c.naive) {
      RunParams np = params;
      np.naive = true;
      auto n0 = std::chrono::steady_clock::now();
      LampRun nrun = run_lamp_parallel(db, c.alpha, np);
      double nwall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - n0).count();
      std::snprintf(buf, sizeof buf, "# naive-workers\t%d\twall_s\t%.6f\n", worker_list[i],
                    nwall);
      out += buf;
      out += metrics_table(nrun.phase1, nrun.phase2);
      if (nrun.result.final_lambda != run.result.final_lambda)
        throw InvariantViolation("naive run diverged from stealing run");
    }
  }
  emit(c, out);
  return 0;
}

std::string pattern_key(const TransactionDatabase& db, const std::vector<ItemId>& itemset) {
  std::vector<std::string> names;
  for (ItemId id : itemset) names.push_back(db.item_name(id));
  std::sort(names.begin(), names.end());
  std::string key;
  for (const std::string& n : names) key += n + ";";
  return key;
}

bool close_rel(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

int cmd_verify(const CommonOptions& c, int fuzz) {
  int runs = std::max(1, fuzz);
  for (int k = 0; k < runs; ++k) {
    std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
    RawDatabase raw = load_input_raw(c, seed);
    if (static_cast<int>(raw.item_names.size()) > kOracleMaxItems)
      throw DataError("verify guard: " + std::to_string(raw.item_names.size()) +
                      " items exceeds the oracle limit of " +
                      std::to_string(kOracleMaxItems));
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    OracleLamp expect = oracle_lamp(raw, c.alpha);
    LampRun got = run_lamp_parallel(db, c.alpha, run_params(c));

    std::ostringstream diff;
    if (got.result.final_lambda != expect.final_lambda)
      diff << "lambda " << got.result.final_lambda << " != " << expect.final_lambda;
    else if (got.result.min_support != expect.min_support)
      diff << "min_support " << got.result.min_support << " != " << expect.min_support;
    else if (got.result.cs_count != expect.cs_count)
      diff << "CS " << got.result.cs_count << " != " << expect.cs_count;
    else if (!close_rel(got.result.delta, expect.delta, 1e-12))
      diff << "delta " << got.result.delta << " != " << expect.delta;
    else if (got.result.significant.size() != expect.significant.size())
      diff << "significant count " << got.result.significant.size()
           << " != " << expect.significant.size();
    else {
      std::vector<std::pair<std::string, double>> a, b;
      for (const SignificantPattern& p : got.result.significant)
        a.emplace_back(pattern_key(db, p.itemset), p.p_value);
      for (const SignificantPattern& p : expect.significant)
        b.emplace_back(pattern_key(db, p.itemset), p.p_value);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first) {
          diff << "pattern " << a[i].first << " != " << b[i].first;
          break;
        }
        if (!close_rel(a[i].second, b[i].second, 1e-12)) {
          diff << "p(" << a[i].first << ") " << a[i].second << " != " << b[i].second;
          break;
        }
      }
    }
    if (!diff.str().empty())
      throw InvariantViolation("verify mismatch at seed " + std::to_string(seed) + ": " +
                               diff.str());
    std::cout << "seed " << seed << "\tverified\tlambda " << got.result.final_lambda
              << "\tCS " << got.result.cs_count << "\tsignificant "
              << got.result.significant.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parlamp: parallel significant closed-itemset mining"};
  app.require_subcommand(1);

  CommonOptions c;
  int min_support = 1;
  int fuzz = 0;
  std::string trace_path;
  int max_delay = 64;
  double deliver_bias = 1.0;
  bool inject_duplicate_give = false;
  std::vector<int> worker_list{1, 2, 4, 8};

  CLI::App* mine = app.add_subcommand("mine", "enumerate closed itemsets");
  add_input_options(mine, c);
  mine->add_option("--min-support", min_support, "support threshold")
      ->check(CLI::PositiveNumber);
  mine->add_option("--seed", c.seed, "synthesis seed");
  mine->add_option("--out", c.out_path, "write the result table to this path");

  CLI::App* lamp = app.add_subcommand("lamp", "significant pattern mining");
  add_input_options(lamp, c);
  add_run_options(lamp, c);

  CLI::App* sim = app.add_subcommand("sim", "deterministic protocol simulation");
  add_input_options(sim, c);
  add_run_options(sim, c);
  sim->add_option("--fuzz", fuzz, "run this many consecutive seeds");
  sim->add_option("--trace", trace_path, "write the event trace to this path");
  sim->add_option("--max-delay", max_delay, "force delivery after this many events");
  sim->add_option("--deliver-bias", deliver_bias, "relative weight of delivery events");
  sim->add_flag("--inject-duplicate-give", inject_duplicate_give,
                "fault injection: duplicate one GIVE (checker must object)");

  CLI::App* bench = app.add_subcommand("bench", "thread-transport timing runs");
  add_input_options(bench, c);
  add_run_options(bench, c);
  bench->add_option("--workers-list", worker_list, "worker counts to time")
      ->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "diff the engine against the oracle");
  add_input_options(verify, c);
  add_run_options(verify, c);
  verify->add_option("--fuzz", fuzz, "verify this many consecutive seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mine->parsed()) return cmd_mine(c, min_support);
    if (lamp->parsed()) return cmd_lamp(c);
    if (sim->parsed())
      return cmd_sim(c, fuzz, trace_path, max_delay, deliver_bias, inject_duplicate_give);
    if (bench->parsed()) return cmd_bench(c, worker_list);
    if (verify->parsed()) return cmd_verify(c, fuzz);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
