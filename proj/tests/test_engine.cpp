#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "parlamp/engine.hpp"
#include "parlamp/errors.hpp"
#include "parlamp/lamp.hpp"
#include "parlamp/synth.hpp"

using namespace parlamp;

namespace {

TransactionDatabase random_db(std::uint64_t seed, int items = 10, int trans = 30,
                              double density = 0.4) {
  return TransactionDatabase::from_raw(gen_random(seed, items, trans, density));
}

std::string lamp_table(const TransactionDatabase& db, const LampResult& res) {
  return format_lamp_table(db, res);
}

}  // namespace

TEST_CASE("the parallel engine reproduces the sequential result exactly") {
  for (std::uint64_t dbseed = 0; dbseed < 8; ++dbseed) {
    TransactionDatabase db = random_db(100 + dbseed);
    double alpha = (dbseed % 2) ? 0.05 : 0.3;
    LampResult seq = run_lamp_sequential(db, alpha);
    std::string seq_table = lamp_table(db, seq);

    for (int P : {1, 2, 3, 8}) {
      RunParams params;
      params.workers = P;
      params.seed = dbseed * 31 + P;
      LampRun run = run_lamp_parallel(db, alpha, params);
      CHECK(run.result.final_lambda == seq.final_lambda);
      CHECK(run.result.min_support == seq.min_support);
      CHECK(run.result.cs_count == seq.cs_count);
      CHECK(run.result.delta == doctest::Approx(seq.delta).epsilon(1e-15));
      REQUIRE(lamp_table(db, run.result) == seq_table);
    }
  }
}

TEST_CASE("result bytes are identical across schedules and worker counts") {
  TransactionDatabase db = random_db(42, 11, 34, 0.45);
  RunParams base;
  base.workers = 1;
  base.seed = 0;
  std::string reference = lamp_table(db, run_lamp_parallel(db, 0.05, base).result);

  for (int P : {2, 5, 16}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      RunParams params;
      params.workers = P;
      params.seed = seed;
      params.deliver_bias = (seed % 2) ? 0.15 : 5.0;
      params.max_delay = (seed % 3 == 0) ? 4 : 64;
      LampRun run = run_lamp_parallel(db, 0.05, params);
      REQUIRE(lamp_table(db, run.result) == reference);
    }
  }
}

TEST_CASE("the thread transport agrees with the simulator byte for byte") {
  for (std::uint64_t dbseed = 0; dbseed < 3; ++dbseed) {
    TransactionDatabase db = random_db(500 + dbseed, 10, 28, 0.4);
    RunParams sim;
    sim.workers = 4;
    sim.seed = dbseed;
    LampRun sim_run = run_lamp_parallel(db, 0.05, sim);

    RunParams thr = sim;
    thr.transport = TransportKind::kThreads;
    thr.workers = (dbseed == 2) ? 8 : 4;
    LampRun thr_run = run_lamp_parallel(db, 0.05, thr);

    REQUIRE(lamp_table(db, thr_run.result) == lamp_table(db, sim_run.result));
    CHECK(thr_run.phase1.metrics.size() == static_cast<std::size_t>(thr.workers));
    CHECK(thr_run.phase1.waves.waves >= 1);
  }
}

TEST_CASE("run_pass dispatches on the transport kind") {
  TransactionDatabase db = random_db(7);
  PassConfig pass;
  pass.min_support = 1;
  pass.dynamic_lambda = false;
  RunParams params;
  params.workers = 3;
  PassOutcome sim = run_pass(db, 0.05, pass, params);
  params.transport = TransportKind::kThreads;
  PassOutcome thr = run_pass(db, 0.05, pass, params);
  REQUIRE(sim.counters == thr.counters);
}

TEST_CASE("naive mode produces the same mining result") {
  TransactionDatabase db = random_db(77, 10, 30, 0.45);
  LampResult seq = run_lamp_sequential(db, 0.05);
  RunParams params;
  params.workers = 6;
  params.naive = true;
  params.seed = 5;
  LampRun run = run_lamp_parallel(db, 0.05, params);
  REQUIRE(lamp_table(db, run.result) == lamp_table(db, seq));
  // Naive workers never steal; each processes exactly its own partition.
  for (const WorkerMetrics& m : run.phase1.metrics) {
    CHECK(m.steals_attempted == 0);
    CHECK(m.steals_succeeded == 0);
  }
}

TEST_CASE("phase 2 collects every pattern at or above the final threshold") {
  for (std::uint64_t dbseed = 0; dbseed < 4; ++dbseed) {
    TransactionDatabase db = random_db(900 + dbseed);
    RunParams params;
    params.workers = 4;
    params.seed = dbseed;
    LampRun run = run_lamp_parallel(db, 0.05, params);

    std::set<std::vector<ItemId>> dedup;
    for (const ClosedSetRecord& rec : run.phase2.collected) {
      CHECK(rec.support.total >= run.result.min_support);
      CHECK(dedup.insert(rec.itemset).second);  // no duplicates across workers
    }
    // The Tarone correction divides by the number of testable patterns: every
    // collected set, no more and no fewer.
    CHECK(static_cast<long long>(run.phase2.collected.size()) == run.result.cs_count);

    // Every reported significant pattern must appear in the collected pool.
    for (const SignificantPattern& sig : run.result.significant) {
      CHECK(dedup.count(sig.itemset) == 1);
      CHECK(sig.p_value <= run.result.delta);
    }
  }
}

TEST_CASE("duplicate GIVE injection is caught as a conservation violation") {
  TransactionDatabase db = random_db(55, 9, 24, 0.4);
  bool caught = false;
  for (std::uint64_t seed = 0; seed < 60 && !caught; ++seed) {
    RunParams params;
    params.workers = 4;
    params.seed = seed;
    params.inject_duplicate_give = true;
    PassConfig pass;
    pass.min_support = 1;
    pass.dynamic_lambda = false;
    SimEngine eng(db, 0.05, pass, params);
    try {
      eng.run();
    } catch (const InvariantViolation& e) {
      caught = true;
      CHECK(std::string(e.what()).find("work conservation") != std::string::npos);
      CHECK(std::string(e.what()).find("seed") != std::string::npos);
    }
  }
  CHECK(caught);
}

TEST_CASE("the event budget reports the offending seed") {
  TransactionDatabase db = random_db(3);
  RunParams params;
  params.workers = 2;
  params.seed = 123;
  params.budget = 5;
  SimEngine eng(db, 0.05, PassConfig{}, params);
  try {
    eng.run();
    FAIL("expected the budget to trip");
  } catch (const InvariantViolation& e) {
    std::string what = e.what();
    CHECK(what.find("budget") != std::string::npos);
    CHECK(what.find("123") != std::string::npos);
  }
}

TEST_CASE("worker count one short-circuits to plain sequential mining") {
  TransactionDatabase db = random_db(60);
  RunParams params;
  params.workers = 1;
  params.seed = 4;
  LampRun run = run_lamp_parallel(db, 0.3, params);
  LampResult seq = run_lamp_sequential(db, 0.3);
  REQUIRE(lamp_table(db, run.result) == lamp_table(db, seq));
  CHECK(run.phase1.metrics.size() == 1);
  CHECK(run.phase1.metrics[0].steals_attempted == 0);
}

TEST_CASE("generator workloads mine identically under heavy skew") {
  TransactionDatabase db = TransactionDatabase::from_raw(gen_skewed(11, 10, 40));
  LampResult seq = run_lamp_sequential(db, 0.05);
  for (int P : {3, 8}) {
    RunParams params;
    params.workers = P;
    params.seed = P;
    params.deliver_bias = 0.3;
    LampRun run = run_lamp_parallel(db, 0.05, params);
    REQUIRE(lamp_table(db, run.result) == lamp_table(db, seq));
  }
}
