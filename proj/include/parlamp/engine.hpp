#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "parlamp/lamp.hpp"
#include "parlamp/worker.hpp"

namespace parlamp {

enum class TransportKind : std::uint8_t { kSim, kThreads };

struct RunParams {
  int workers = 1;
  TransportKind transport = TransportKind::kSim;
  std::uint64_t seed = 0;
  int lifeline_l = 2;
  int steal_w = 1;
  double probe_ms = 1.0;
  bool naive = false;
  // Simulator scheduling shape.
  double deliver_bias = 1.0;   // relative weight of delivering vs stepping
  int max_delay = 64;          // force delivery after this many events in flight
  long long budget = 50000000; // scheduler events before declaring a liveness failure
  bool inject_duplicate_give = false;  // fault injection for the checker self-test
  std::ostream* trace = nullptr;
};

struct PassOutcome {
  int final_lambda = 1;
  std::vector<long long> counters;          // merged over all workers
  std::vector<ClosedSetRecord> collected;   // concatenated (collect passes)
  std::vector<WorkerMetrics> metrics;
  WaveStats waves;
  long long sim_events = 0;
};

// Deterministic single-process transport: every worker step and every message
// delivery is one scheduler event, chosen by a seeded generator. Messages sit
// in per-(source,destination) FIFO channels until a delivery event moves them
// to the receiver's inbox; the receiver processes them at its next probe.
// Invariants (work conservation, message balance, handshake pairing,
// quiescence at FINISH) are checked after every event.
class SimEngine {
 public:
  SimEngine(const TransactionDatabase& db, double alpha, const PassConfig& pass,
            const RunParams& params);

  // One schedulable action: a worker step or one channel's head delivery.
  struct Choice {
    bool deliver = false;
    int worker = -1;  // step choice
    int src = -1, dst = -1;  // delivery choice
  };

  void init();  // runs every worker's preprocess
  std::vector<Choice> choices() const;
  void apply(const Choice& choice);
  bool finished() const;
  long long events() const { return events_; }

  // Seeded random schedule until finished; throws InvariantViolation on any
  // checker failure or on exceeding the event budget.
  void run();

  PassOutcome outcome() const;
  const Worker& worker(int i) const { return workers_[i]; }
  int worker_count() const { return static_cast<int>(workers_.size()); }
  void check_invariants() const;
  std::uint64_t state_hash() const;  // for exhaustive schedule exploration

  // engine-internal, used by the per-call IO adapter
  void enqueue(int src, int dst, Message m);
  bool poll_inbox(int self, Message& out);

 private:
  struct ChannelEntry {
    Message msg;
    long long enqueued_at = 0;
  };

  int channel_index(int src, int dst) const { return src * params_.workers + dst; }
  void trace_event(const std::string& line) const;

  std::shared_ptr<const TransactionDatabase> db_;
  std::shared_ptr<const StatContext> ctx_;
  std::shared_ptr<const LifelineTopology> topo_;
  PassConfig pass_;
  RunParams params_;
  std::vector<Worker> workers_;
  std::vector<std::deque<ChannelEntry>> channels_;
  std::vector<std::deque<Message>> inboxes_;
  std::mt19937_64 rng_;
  long long events_ = 0;
  bool initialized_ = false;
  bool injected_ = false;

  // checker ledgers
  long long in_flight_give_nodes_ = 0;
  long long basic_in_flight_ = 0;
  std::vector<long long> requests_sent_, requests_polled_, replies_sent_;
};

// Shared-memory transport: one thread per worker, one mutex-guarded mailbox
// per worker, condition variables for idle waiting. Used for measurements;
// results are identical to the simulator's by construction.
PassOutcome run_pass_threads(const TransactionDatabase& db, double alpha,
                             const PassConfig& pass, const RunParams& params);

PassOutcome run_pass(const TransactionDatabase& db, double alpha, const PassConfig& pass,
                     const RunParams& params);

struct LampRun {
  LampResult result;
  PassOutcome phase1;
  PassOutcome phase2;
};

// Three phases over the chosen transport: dynamic-threshold pass, fixed
// min-support collection pass, significance extraction.
LampRun run_lamp_parallel(const TransactionDatabase& db, double alpha,
                          const RunParams& params);

}  // namespace parlamp
