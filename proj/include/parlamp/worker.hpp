#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "parlamp/cim.hpp"
#include "parlamp/dataset.hpp"
#include "parlamp/dtd.hpp"
#include "parlamp/lamp.hpp"
#include "parlamp/message.hpp"
#include "parlamp/stats.hpp"
#include "parlamp/topology.hpp"

namespace parlamp {

enum class WorkerMode : std::uint8_t { kRunning, kStealing, kIdle, kTerminated };

inline const char* mode_name(WorkerMode m) {
  switch (m) {
    case WorkerMode::kRunning: return "RUNNING";
    case WorkerMode::kStealing: return "STEALING";
    case WorkerMode::kIdle: return "IDLE";
    case WorkerMode::kTerminated: return "TERMINATED";
  }
  return "?";
}

struct WorkerMetrics {
  double main_s = 0, preprocess_s = 0, probe_s = 0, idle_s = 0;
  long long nodes_expanded = 0;
  long long nodes_generated = 0;
  long long stale_skips = 0;
  long long steals_attempted = 0;
  long long steals_succeeded = 0;
  long long messages_sent = 0;
};

struct WaveStats {
  long long waves = 0;
  long long retries = 0;
};

// One enumeration pass over the search tree.
struct PassConfig {
  int min_support = 1;
  bool dynamic_lambda = true;  // phase 1: advance the threshold while mining
  bool collect = false;        // phase 2: keep (itemset, support) records
  bool naive = false;          // no stealing; balance waves still run
  int probe_every = 1;         // expansions between probes (sim: every step)
  bool auto_probe = false;     // threads: calibrate probe_every from a warm-up
  double probe_target_ms = 1.0;
  bool timed = false;          // accumulate wall-clock metrics (threads)
};

// Transport hooks the engine hands to the worker on every call. Keeping the
// worker free of transport state keeps it copyable, which the exhaustive
// schedule explorer relies on.
class WorkerIO {
 public:
  virtual ~WorkerIO() = default;
  virtual void send(int dst, Message m) = 0;
  virtual bool poll(Message& out) = 0;
};

// A strictly sequential reactive actor: pops and expands nodes, answers steal
// requests at probe points, steals when empty (random victims first, then
// lifelines), and participates in termination waves. Worker 0 doubles as the
// wave root and the keeper of the globally aggregated counters.
class Worker {
 public:
  Worker(int id, const TransactionDatabase& db, const StatContext& ctx,
         const LifelineTopology& topo, const PassConfig& pass, double alpha,
         std::uint64_t seed);

  // Depth-1 partition: this worker owns the extension items congruent to its
  // id mod P; worker 0 also records the non-empty root closure.
  void preprocess(WorkerIO& io);

  // One scheduler quantum. Returns true if any progress was made.
  bool step(WorkerIO& io);

  // Sim scheduling hint: is there anything this worker could do right now?
  // (inbox contents are known to the engine, not the worker)
  bool ready_without_messages() const;

  int id() const { return id_; }
  WorkerMode mode() const { return mode_; }
  bool terminated() const { return mode_ == WorkerMode::kTerminated; }
  const std::vector<SearchNode>& stack() const { return stack_; }
  std::size_t pending_request_count() const { return pending_requests_.size(); }
  const LampState& lamp() const { return lamp_; }
  int local_lambda() const { return lamp_.lambda; }
  const std::vector<ClosedSetRecord>& collected() const { return collected_; }
  const WorkerMetrics& metrics() const { return metrics_; }
  WorkerMetrics& metrics() { return metrics_; }
  const DtdLocal& dtd() const { return dtd_; }
  const WaveStats& wave_stats() const { return wave_stats_; }

  // Root-only: the merged global state (valid after termination).
  const LampState& aggregate() const { return agg_; }
  int final_lambda() const { return agg_.lambda; }

 private:
  int effective_min_support() const;
  void record_generated(const SearchNode& node);
  void expand_one(WorkerIO& io);
  void probe(WorkerIO& io);
  void service_pending(WorkerIO& io);
  void send_give(WorkerIO& io, int dst);
  void send_basic(WorkerIO& io, int dst, Message m);
  void enter_steal(WorkerIO& io);
  void send_random_request(WorkerIO& io);
  void arm_lifelines(WorkerIO& io);
  void resume_running(WorkerIO& io);
  void on_message(WorkerIO& io, Message& m);
  void on_reply(WorkerIO& io, const Message& m);
  void adopt_lambda(int new_lambda);
  void contribute_if_due(WorkerIO& io);
  void try_complete_subtree(WorkerIO& io);
  void root_wave_duties(WorkerIO& io);
  void root_evaluate(WorkerIO& io);
  void broadcast_finish(WorkerIO& io);
  std::vector<CounterDelta> sweep_deltas();

  // Which kind of steal request we have outstanding toward a destination;
  // replies on the FIFO channel resolve them in order.
  struct PendingSteal {
    int dst;
    int lifeline_index;  // -1 for a random trial
  };

  int id_;
  const TransactionDatabase& db_;
  const StatContext& ctx_;
  const LifelineTopology& topo_;
  PassConfig pass_;
  WorkerMode mode_ = WorkerMode::kRunning;

  std::vector<SearchNode> stack_;
  LampState lamp_;
  LampState agg_;  // root only: all workers' counters merged via waves
  std::vector<long long> delta_counters_;
  long long nodes_delta_ = 0;
  std::vector<ClosedSetRecord> collected_;

  std::deque<int> pending_requests_;
  std::vector<std::uint8_t> lifeline_activated_;
  std::deque<PendingSteal> outstanding_;
  bool in_random_trial_ = false;
  int trials_left_ = 0;
  std::mt19937_64 rng_;

  DtdLocal dtd_;
  // Root wave driver.
  std::uint64_t next_wave_id_ = 1;
  bool wave_open_ = false;
  long long idle_ticks_ = 0;
  long long backoff_ = 1;

  WorkerMetrics metrics_;
  WaveStats wave_stats_;
  int steps_since_probe_ = 0;
  long long expansions_seen_ = 0;  // for probe auto-calibration
  double expand_time_acc_ = 0;
};

}  // namespace parlamp
