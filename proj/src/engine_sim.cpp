#include <algorithm>
#include <string>

#include "parlamp/engine.hpp"
#include "parlamp/errors.hpp"

namespace parlamp {

namespace {

class SimIO final : public WorkerIO {
 public:
  SimIO(SimEngine& eng, int self) : eng_(eng), self_(self) {}
  void send(int dst, Message m) override { eng_.enqueue(self_, dst, std::move(m)); }
  bool poll(Message& out) override { return eng_.poll_inbox(self_, out); }

 private:
  SimEngine& eng_;
  int self_;
};

}  // namespace

SimEngine::SimEngine(const TransactionDatabase& db, double alpha, const PassConfig& pass,
                     const RunParams& params)
    : db_(std::make_shared<TransactionDatabase>(db)),
      ctx_(std::make_shared<StatContext>(
          StatContext::make(db.num_transactions(), db.num_positive()))),
      topo_(std::make_shared<LifelineTopology>(
          build_topology(params.workers, params.lifeline_l, params.steal_w))),
      pass_(pass),
      params_(params),
      rng_(params.seed) {
  pass_.probe_every = 1;  // the simulator probes at every step
  pass_.auto_probe = false;
  pass_.timed = false;
  pass_.naive = params_.naive;  // the run-level switch is authoritative
  int P = params_.workers;
  workers_.reserve(P);
  for (int i = 0; i < P; ++i)
    workers_.emplace_back(i, *db_, *ctx_, *topo_, pass_, alpha, params_.seed);
  channels_.resize(static_cast<std::size_t>(P) * P);
  inboxes_.resize(P);
  requests_sent_.assign(channels_.size(), 0);
  requests_polled_.assign(channels_.size(), 0);
  replies_sent_.assign(channels_.size(), 0);
}

void SimEngine::trace_event(const std::string& line) const {
  if (params_.trace) *params_.trace << "ev " << events_ << "\t" << line << "\n";
}

void SimEngine::init() {
  for (Worker& w : workers_) {
    SimIO io(*this, w.id());
    w.preprocess(io);
  }
  initialized_ = true;
  check_invariants();
}

void SimEngine::enqueue(int src, int dst, Message m) {
  if (src == dst) throw InvariantViolation("self-send from worker " + std::to_string(src));
  trace_event("send " + std::string(kind_name(m.kind)) + " " + std::to_string(src) + "->" +
              std::to_string(dst));
  if (is_basic(m.kind)) {
    ++basic_in_flight_;
    if (m.kind == MsgKind::kRequest) ++requests_sent_[channel_index(src, dst)];
    if (m.kind == MsgKind::kReject || m.kind == MsgKind::kGive)
      ++replies_sent_[channel_index(src, dst)];
  }
  if (m.kind == MsgKind::kGive)
    in_flight_give_nodes_ += static_cast<long long>(m.nodes.size());
  ChannelEntry entry{std::move(m), events_};
  auto& chan = channels_[channel_index(src, dst)];
  chan.push_back(entry);
  if (params_.inject_duplicate_give && !injected_ && entry.msg.kind == MsgKind::kGive) {
    injected_ = true;  // transport-level duplication: the ledgers see one send
    chan.push_back(std::move(entry));
  }
}

bool SimEngine::poll_inbox(int self, Message& out) {
  auto& box = inboxes_[self];
  if (box.empty()) return false;
  out = std::move(box.front());
  box.pop_front();
  if (is_basic(out.kind)) {
    --basic_in_flight_;
    if (out.kind == MsgKind::kRequest) ++requests_polled_[channel_index(out.source, self)];
  }
  if (out.kind == MsgKind::kGive) {
    in_flight_give_nodes_ -= static_cast<long long>(out.nodes.size());
    if (in_flight_give_nodes_ < 0)
      throw InvariantViolation(
          "work conservation violated: GIVE payload consumed twice (in-flight count " +
          std::to_string(in_flight_give_nodes_) + ") at seed " + std::to_string(params_.seed));
  }
  return true;
}

std::vector<SimEngine::Choice> SimEngine::choices() const {
  std::vector<Choice> list;
  for (const Worker& w : workers_) {
    if (w.terminated()) continue;
    if (w.ready_without_messages() || !inboxes_[w.id()].empty()) {
      Choice c;
      c.worker = w.id();
      list.push_back(c);
    }
  }
  int P = params_.workers;
  for (int src = 0; src < P; ++src) {
    for (int dst = 0; dst < P; ++dst) {
      if (!channels_[channel_index(src, dst)].empty()) {
        Choice c;
        c.deliver = true;
        c.src = src;
        c.dst = dst;
        list.push_back(c);
      }
    }
  }
  return list;
}

void SimEngine::apply(const Choice& choice) {
  ++events_;
  if (choice.deliver) {
    auto& chan = channels_[channel_index(choice.src, choice.dst)];
    ChannelEntry entry = std::move(chan.front());
    chan.pop_front();
    trace_event("deliver " + std::string(kind_name(entry.msg.kind)) + " " +
                std::to_string(choice.src) + "->" + std::to_string(choice.dst));
    inboxes_[choice.dst].push_back(std::move(entry.msg));
  } else {
    trace_event("step worker " + std::to_string(choice.worker) + " " +
                mode_name(workers_[choice.worker].mode()));
    SimIO io(*this, choice.worker);
    workers_[choice.worker].step(io);
  }
  check_invariants();
}

bool SimEngine::finished() const {
  for (const Worker& w : workers_)
    if (!w.terminated()) return false;
  for (const auto& chan : channels_)
    if (!chan.empty()) return false;
  for (const auto& box : inboxes_)
    if (!box.empty()) return false;
  return true;
}

void SimEngine::run() {
  if (!initialized_) init();
  while (!finished()) {
    if (events_ >= params_.budget)
      throw InvariantViolation("liveness: event budget " + std::to_string(params_.budget) +
                               " exhausted at seed " + std::to_string(params_.seed));
    std::vector<Choice> list = choices();
    if (list.empty())
      throw InvariantViolation("scheduler stuck: no enabled choice at seed " +
                               std::to_string(params_.seed));

    // Deliveries overdue past max_delay happen first (oldest first), which
    // bounds message latency and so guarantees fairness.
    const Choice* forced = nullptr;
    long long oldest = -1;
    for (const Choice& c : list) {
      if (!c.deliver) continue;
      const auto& chan = channels_[channel_index(c.src, c.dst)];
      long long age = events_ - chan.front().enqueued_at;
      if (age > params_.max_delay && age > oldest) {
        oldest = age;
        forced = &c;
      }
    }
    if (forced) {
      apply(*forced);
      continue;
    }

    double total = 0;
    for (const Choice& c : list) total += c.deliver ? params_.deliver_bias : 1.0;
    double pick = std::uniform_real_distribution<double>(0.0, total)(rng_);
    const Choice* chosen = &list.back();
    for (const Choice& c : list) {
      pick -= c.deliver ? params_.deliver_bias : 1.0;
      if (pick <= 0) {
        chosen = &c;
        break;
      }
    }
    apply(*chosen);
  }
  check_invariants();
}

void SimEngine::check_invariants() const {
  // Work conservation: every pushed node is on a stack, inside an unconsumed
  // GIVE, or has been popped.
  long long generated = 0, consumed = 0, stacked = 0;
  for (const Worker& w : workers_) {
    generated += w.metrics().nodes_generated;
    consumed += w.metrics().nodes_expanded + w.metrics().stale_skips;
    stacked += static_cast<long long>(w.stack().size());
  }
  if (generated != consumed + stacked + in_flight_give_nodes_)
    throw InvariantViolation(
        "work conservation violated: generated=" + std::to_string(generated) +
        " consumed=" + std::to_string(consumed) + " stacked=" + std::to_string(stacked) +
        " in_flight=" + std::to_string(in_flight_give_nodes_) +
        " at seed " + std::to_string(params_.seed));

  // Message balance: the summed counters equal the basic messages in flight.
  long long balance = 0;
  for (const Worker& w : workers_) balance += w.dtd().balance();
  if (balance != basic_in_flight_)
    throw InvariantViolation("message balance " + std::to_string(balance) +
                             " != basic in flight " + std::to_string(basic_in_flight_));

  // Handshakes: replies never exceed the requests actually received.
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    int src = static_cast<int>(i) / params_.workers;
    int dst = static_cast<int>(i) % params_.workers;
    if (replies_sent_[channel_index(dst, src)] > requests_polled_[channel_index(src, dst)])
      throw InvariantViolation("more replies than requests on " + std::to_string(dst) + "->" +
                               std::to_string(src));
  }

  bool all_terminated = true;
  for (const Worker& w : workers_)
    if (!w.terminated()) all_terminated = false;
  if (all_terminated) {
    for (const auto& chan : channels_)
      if (!chan.empty()) throw InvariantViolation("messages in flight after FINISH");
    for (const auto& box : inboxes_)
      if (!box.empty()) throw InvariantViolation("undelivered inbox after FINISH");
    for (const Worker& w : workers_) {
      if (!w.stack().empty())
        throw InvariantViolation("non-empty stack after FINISH at worker " +
                                 std::to_string(w.id()));
      if (w.pending_request_count() != 0)
        throw InvariantViolation("pending request after FINISH at worker " +
                                 std::to_string(w.id()));
    }
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      int src = static_cast<int>(i) / params_.workers;
      int dst = static_cast<int>(i) % params_.workers;
      if (requests_sent_[i] != replies_sent_[channel_index(dst, src)])
        throw InvariantViolation("unanswered REQUEST " + std::to_string(src) + "->" +
                                 std::to_string(dst) + " after FINISH");
    }
  }
}

PassOutcome SimEngine::outcome() const {
  PassOutcome out;
  const Worker& root = workers_[0];
  out.final_lambda = pass_.dynamic_lambda ? root.final_lambda() : pass_.min_support;
  out.counters = root.aggregate().cs_counters;
  out.waves = root.wave_stats();
  out.sim_events = events_;

  // The final wave swept every worker's deltas, so the root's aggregate must
  // equal the sum of the locally recorded counters.
  std::vector<long long> local_sum(out.counters.size(), 0);
  for (const Worker& w : workers_) {
    for (std::size_t s = 0; s < local_sum.size(); ++s)
      local_sum[s] += w.lamp().cs_counters[s];
  }
  if (local_sum != out.counters)
    throw InvariantViolation("aggregated counters diverge from local counters");

  for (const Worker& w : workers_) {
    out.metrics.push_back(w.metrics());
    const auto& c = w.collected();
    out.collected.insert(out.collected.end(), c.begin(), c.end());
  }
  return out;
}

std::uint64_t SimEngine::state_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const Worker& w : workers_) {
    mix(static_cast<std::uint64_t>(w.mode()));
    mix(static_cast<std::uint64_t>(w.local_lambda()));
    mix(static_cast<std::uint64_t>(w.stack().size()));
    for (const SearchNode& n : w.stack()) {
      mix(static_cast<std::uint64_t>(n.core) + 0x51ULL);
      for (ItemId it : n.itemset) mix(static_cast<std::uint64_t>(it) + 1);
    }
    mix(static_cast<std::uint64_t>(w.pending_request_count()));
    mix(static_cast<std::uint64_t>(w.dtd().balance() + (1LL << 32)));
    mix(w.dtd().tainted() ? 7 : 3);
    mix(w.dtd().wave());
    mix(w.dtd().contributed() ? 11 : 5);
    mix(w.dtd().stamp());
    for (long long c : w.lamp().cs_counters) mix(static_cast<std::uint64_t>(c));
  }
  auto mix_msg = [&](const Message& m) {
    mix(static_cast<std::uint64_t>(m.kind) + 0x101);
    mix(static_cast<std::uint64_t>(m.source) + 1);
    mix(m.timestamp);
    mix(m.wave_id);
    mix(static_cast<std::uint64_t>(m.lambda));
    mix(static_cast<std::uint64_t>(m.nodes.size()));
    for (const NodeWire& nw : m.nodes) {
      mix(static_cast<std::uint64_t>(nw.core) + 0x77);
      for (ItemId it : nw.itemset) mix(static_cast<std::uint64_t>(it) + 1);
    }
    mix(static_cast<std::uint64_t>(m.up.balance + (1LL << 32)));
    mix(m.up.tainted ? 13 : 17);
    mix(static_cast<std::uint64_t>(m.up.contributions));
    for (const CounterDelta& d : m.up.deltas) {
      mix(static_cast<std::uint64_t>(d.support) + 29);
      mix(static_cast<std::uint64_t>(d.count));
    }
  };
  for (const auto& chan : channels_) {
    mix(0xABCDULL);
    for (const ChannelEntry& e : chan) mix_msg(e.msg);
  }
  for (const auto& box : inboxes_) {
    mix(0xBEEFULL);
    for (const Message& m : box) mix_msg(m);
  }
  return h;
}

PassOutcome run_pass(const TransactionDatabase& db, double alpha, const PassConfig& pass,
                     const RunParams& params) {
  if (params.transport == TransportKind::kThreads)
    return run_pass_threads(db, alpha, pass, params);
  SimEngine engine(db, alpha, pass, params);
  engine.run();
  return engine.outcome();
}

LampRun run_lamp_parallel(const TransactionDatabase& db, double alpha,
                          const RunParams& params) {
  LampRun run;
  PassConfig phase1;
  phase1.min_support = 1;
  phase1.dynamic_lambda = true;
  phase1.collect = false;
  phase1.naive = params.naive;
  phase1.probe_target_ms = params.probe_ms;
  run.phase1 = run_pass(db, alpha, phase1, params);

  PassConfig phase2;
  phase2.min_support = min_support_from(run.phase1.final_lambda);
  phase2.dynamic_lambda = false;
  phase2.collect = true;
  phase2.naive = params.naive;
  phase2.probe_target_ms = params.probe_ms;
  run.phase2 = run_pass(db, alpha, phase2, params);

  long long counted = 0;
  for (int s = phase2.min_support; s < static_cast<int>(run.phase2.counters.size()); ++s)
    counted += run.phase2.counters[s];
  if (counted != static_cast<long long>(run.phase2.collected.size()))
    throw InvariantViolation("phase 2 collected " +
                             std::to_string(run.phase2.collected.size()) +
                             " closed sets but counted " + std::to_string(counted));

  run.result = extract_significant(db, alpha, run.phase1.final_lambda,
                                   run.phase2.collected);
  return run;
}

}  // namespace parlamp
