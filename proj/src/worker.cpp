#include "parlamp/worker.hpp"

#include <algorithm>
#include <chrono>

#include "parlamp/errors.hpp"

namespace parlamp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Worker::Worker(int id, const TransactionDatabase& db, const StatContext& ctx,
               const LifelineTopology& topo, const PassConfig& pass, double alpha,
               std::uint64_t seed)
    : id_(id),
      db_(db),
      ctx_(ctx),
      topo_(topo),
      pass_(pass),
      lamp_(db.num_transactions(), alpha),
      agg_(db.num_transactions(), alpha),
      delta_counters_(db.num_transactions() + 1, 0),
      lifeline_activated_(topo.lifelines[id].size(), 0),
      rng_(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(id + 1))),
      dtd_(id, topo.worker_count) {
  if (!pass_.dynamic_lambda) {
    lamp_.lambda = pass_.min_support;
    agg_.lambda = pass_.min_support;
  }
}

int Worker::effective_min_support() const {
  return pass_.dynamic_lambda ? std::max(pass_.min_support, lamp_.lambda) : pass_.min_support;
}

void Worker::record_generated(const SearchNode& node) {
  if (pass_.collect) {
    PatternSupport s{node.support,
                     static_cast<int>(node.cover.and_count(db_.positive_bitset()))};
    collected_.push_back({node.itemset, s});
  }
  ++delta_counters_[node.support];
  if (pass_.dynamic_lambda) {
    record_closed_set(lamp_, ctx_, node.support);
  } else {
    ++lamp_.cs_counters[node.support];
    if (node.support >= lamp_.lambda) ++lamp_.cs_at_lambda;
  }
}

void Worker::preprocess(WorkerIO& io) {
  auto t0 = std::chrono::steady_clock::now();
  SearchNode root = make_root(db_);
  if (id_ == 0 && !root.itemset.empty() && root.support >= effective_min_support())
    record_generated(root);
  // Depth-1 nodes for the items this worker owns, in reverse item order so
  // pops proceed in ascending order like the sequential search.
  const int P = topo_.worker_count;
  for (ItemId e = db_.num_items() - 1; e >= 0; --e) {
    if (e % P != id_) continue;
    SearchNode node;
    if (extend_node(db_, root, e, effective_min_support(), node)) {
      record_generated(node);
      ++metrics_.nodes_generated;
      stack_.push_back(std::move(node));
    }
  }
  (void)io;
  if (pass_.timed) metrics_.preprocess_s += seconds_since(t0);
}

void Worker::expand_one(WorkerIO& io) {
  auto t0 = std::chrono::steady_clock::now();
  SearchNode node = std::move(stack_.back());
  stack_.pop_back();
  ++nodes_delta_;
  if (pass_.dynamic_lambda && node.support < lamp_.lambda) {
    ++metrics_.stale_skips;
  } else {
    std::vector<SearchNode> kids = children(db_, node, effective_min_support());
    for (const SearchNode& child : kids) record_generated(child);
    metrics_.nodes_generated += static_cast<long long>(kids.size());
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack_.push_back(std::move(*it));
    ++metrics_.nodes_expanded;
  }
  (void)io;
  if (pass_.timed) {
    double dt = seconds_since(t0);
    metrics_.main_s += dt;
    expand_time_acc_ += dt;
  }
  if (pass_.auto_probe && ++expansions_seen_ >= 128) {
    // Calibrate the probe cadence to the target interval from measured cost.
    double avg_s = expand_time_acc_ / static_cast<double>(expansions_seen_);
    double target_s = pass_.probe_target_ms / 1000.0;
    long long k = avg_s > 0 ? static_cast<long long>(target_s / avg_s) : 1024;
    pass_.probe_every = static_cast<int>(std::clamp<long long>(k, 1, 1 << 20));
    pass_.auto_probe = false;
  }
}

void Worker::send_basic(WorkerIO& io, int dst, Message m) {
  m.source = id_;
  m.timestamp = dtd_.stamp();
  dtd_.on_basic_send();
  ++metrics_.messages_sent;
  io.send(dst, std::move(m));
}

void Worker::send_give(WorkerIO& io, int dst) {
  std::size_t give_count = (stack_.size() + 1) / 2;  // bottom half, rounded up
  Message m;
  m.kind = MsgKind::kGive;
  m.nodes.reserve(give_count);
  for (std::size_t i = 0; i < give_count; ++i)
    m.nodes.push_back({stack_[i].itemset, stack_[i].core});
  stack_.erase(stack_.begin(), stack_.begin() + static_cast<std::ptrdiff_t>(give_count));
  send_basic(io, dst, std::move(m));
}

void Worker::service_pending(WorkerIO& io) {
  while (!pending_requests_.empty()) {
    int requester = pending_requests_.front();
    pending_requests_.pop_front();
    if (stack_.size() >= 2) {
      send_give(io, requester);
    } else {
      Message m;
      m.kind = MsgKind::kReject;
      send_basic(io, requester, std::move(m));
    }
  }
}

void Worker::probe(WorkerIO& io) {
  auto t0 = std::chrono::steady_clock::now();
  Message m;
  while (io.poll(m)) on_message(io, m);
  service_pending(io);
  if (pass_.timed) metrics_.probe_s += seconds_since(t0);
}

void Worker::enter_steal(WorkerIO& io) {
  if (pass_.naive || topo_.worker_count == 1) {
    mode_ = WorkerMode::kIdle;
    return;
  }
  mode_ = WorkerMode::kStealing;
  trials_left_ = topo_.random_steal_trials;
  if (trials_left_ > 0) {
    in_random_trial_ = true;
    send_random_request(io);
  } else {
    arm_lifelines(io);
    mode_ = WorkerMode::kIdle;
  }
}

void Worker::send_random_request(WorkerIO& io) {
  int victim = static_cast<int>(rng_() % static_cast<std::uint64_t>(topo_.worker_count - 1));
  if (victim >= id_) ++victim;
  Message m;
  m.kind = MsgKind::kRequest;
  outstanding_.push_back({victim, -1});
  ++metrics_.steals_attempted;
  send_basic(io, victim, std::move(m));
}

void Worker::arm_lifelines(WorkerIO& io) {
  const std::vector<int>& lifelines = topo_.lifelines[id_];
  for (std::size_t j = 0; j < lifelines.size(); ++j) {
    if (lifeline_activated_[j]) continue;
    lifeline_activated_[j] = 1;
    Message m;
    m.kind = MsgKind::kRequest;
    outstanding_.push_back({lifelines[j], static_cast<int>(j)});
    ++metrics_.steals_attempted;
    send_basic(io, lifelines[j], std::move(m));
  }
}

void Worker::resume_running(WorkerIO& io) {
  (void)io;
  mode_ = WorkerMode::kRunning;
  in_random_trial_ = false;
  trials_left_ = 0;
  steps_since_probe_ = 0;
  if (id_ == 0) {
    backoff_ = 1;
    idle_ticks_ = 0;
  }
}

void Worker::on_reply(WorkerIO& io, const Message& m) {
  // Replies from one victim arrive in the order we sent requests to it.
  auto it = std::find_if(outstanding_.begin(), outstanding_.end(),
                         [&](const PendingSteal& p) { return p.dst == m.source; });
  if (it == outstanding_.end())
    throw InvariantViolation("worker " + std::to_string(id_) + ": unmatched " +
                             kind_name(m.kind) + " from " + std::to_string(m.source));
  PendingSteal resolved = *it;
  outstanding_.erase(it);

  if (m.kind == MsgKind::kGive) {
    // Lifelines deactivate only on GIVE; a rejected lifeline edge stays armed.
    if (resolved.lifeline_index >= 0) lifeline_activated_[resolved.lifeline_index] = 0;
    for (const NodeWire& wire : m.nodes)
      stack_.push_back(make_node(db_, wire.itemset, wire.core));
    ++metrics_.steals_succeeded;
    if (mode_ == WorkerMode::kStealing || mode_ == WorkerMode::kIdle) resume_running(io);
    return;
  }

  // REJECT: a blocked random trial moves to its next target or to lifelines.
  if (mode_ == WorkerMode::kStealing && in_random_trial_ && resolved.lifeline_index < 0) {
    --trials_left_;
    if (trials_left_ > 0 && stack_.empty()) {
      send_random_request(io);
    } else {
      in_random_trial_ = false;
      arm_lifelines(io);
      mode_ = WorkerMode::kIdle;
    }
  }
}

void Worker::adopt_lambda(int new_lambda) {
  if (!pass_.dynamic_lambda) return;
  if (new_lambda > lamp_.lambda) {
    for (int s = lamp_.lambda; s < new_lambda; ++s) lamp_.cs_at_lambda -= lamp_.cs_counters[s];
    lamp_.lambda = new_lambda;
  }
  advance_lambda(lamp_, ctx_);
}

void Worker::on_message(WorkerIO& io, Message& m) {
  if (is_basic(m.kind)) dtd_.on_basic_receive(m.timestamp);
  switch (m.kind) {
    case MsgKind::kRequest:
      pending_requests_.push_back(m.source);
      break;
    case MsgKind::kReject:
    case MsgKind::kGive:
      on_reply(io, m);
      break;
    case MsgKind::kControlDown: {
      adopt_lambda(m.lambda);
      if (dtd_.start_wave(m.wave_id)) {
        Message fwd = m;
        for (int child : tree_children(id_, topo_.worker_count)) {
          fwd.source = id_;
          ++metrics_.messages_sent;
          io.send(child, fwd);
        }
      }
      break;
    }
    case MsgKind::kControlUp:
      if (m.wave_id != dtd_.wave())
        throw InvariantViolation("worker " + std::to_string(id_) + ": CONTROL_UP for wave " +
                                 std::to_string(m.wave_id) + " during wave " +
                                 std::to_string(dtd_.wave()));
      dtd_.fold_child_up(m.up);
      try_complete_subtree(io);
      break;
    case MsgKind::kFinish:
      if (!stack_.empty() || !pending_requests_.empty())
        throw InvariantViolation("worker " + std::to_string(id_) +
                                 ": FINISH arrived with local work outstanding");
      broadcast_finish(io);
      mode_ = WorkerMode::kTerminated;
      break;
  }
}

std::vector<CounterDelta> Worker::sweep_deltas() {
  std::vector<CounterDelta> deltas;
  for (std::size_t s = 0; s < delta_counters_.size(); ++s) {
    if (delta_counters_[s] != 0) {
      deltas.push_back({static_cast<int>(s), delta_counters_[s]});
      delta_counters_[s] = 0;
    }
  }
  return deltas;
}

void Worker::contribute_if_due(WorkerIO& io) {
  if (mode_ != WorkerMode::kIdle || !dtd_.wave_pending()) return;
  if (!pending_requests_.empty()) return;  // drain replies before snapshotting
  long long nodes = nodes_delta_;
  nodes_delta_ = 0;
  dtd_.contribute(sweep_deltas(), nodes);
  try_complete_subtree(io);
}

void Worker::try_complete_subtree(WorkerIO& io) {
  if (!dtd_.subtree_complete()) return;
  if (id_ == 0) {
    if (wave_open_) root_evaluate(io);
    return;
  }
  Message m;
  m.kind = MsgKind::kControlUp;
  m.source = id_;
  m.wave_id = dtd_.wave();
  m.up = dtd_.aggregate();
  ++metrics_.messages_sent;
  io.send(tree_parent(id_), std::move(m));
}

void Worker::root_wave_duties(WorkerIO& io) {
  if (wave_open_ || mode_ != WorkerMode::kIdle) return;
  ++idle_ticks_;
  if (idle_ticks_ < backoff_) return;
  idle_ticks_ = 0;
  wave_open_ = true;
  ++wave_stats_.waves;
  std::uint64_t wave_id = next_wave_id_++;
  dtd_.start_wave(wave_id);
  Message m;
  m.kind = MsgKind::kControlDown;
  m.source = id_;
  m.wave_id = wave_id;
  m.lambda = agg_.lambda;
  for (int child : tree_children(0, topo_.worker_count)) {
    ++metrics_.messages_sent;
    io.send(child, m);
  }
  contribute_if_due(io);
}

void Worker::root_evaluate(WorkerIO& io) {
  const UpAggregate& agg = dtd_.aggregate();
  if (agg.contributions != topo_.worker_count)
    throw InvariantViolation("wave aggregated " + std::to_string(agg.contributions) +
                             " contributions for " + std::to_string(topo_.worker_count) +
                             " workers");
  // Counter deltas are merged even when the wave retries; the threshold only
  // ever moves up, so early aggregation is pure progress.
  for (const CounterDelta& d : agg.deltas) {
    agg_.cs_counters[d.support] += d.count;
    if (d.support >= agg_.lambda) agg_.cs_at_lambda += d.count;
  }
  if (pass_.dynamic_lambda) {
    advance_lambda(agg_, ctx_);
    adopt_lambda(agg_.lambda);
  }
  wave_open_ = false;

  bool quiet = agg.balance == 0 && !agg.tainted && mode_ == WorkerMode::kIdle &&
               stack_.empty() && !dtd_.tainted();
  if (quiet) {
    broadcast_finish(io);
    mode_ = WorkerMode::kTerminated;
  } else {
    ++wave_stats_.retries;
    idle_ticks_ = 0;
    backoff_ = std::min<long long>(backoff_ * 2, 64);
  }
}

void Worker::broadcast_finish(WorkerIO& io) {
  Message m;
  m.kind = MsgKind::kFinish;
  m.source = id_;
  for (int child : tree_children(id_, topo_.worker_count)) {
    ++metrics_.messages_sent;
    io.send(child, m);
  }
}

bool Worker::ready_without_messages() const {
  switch (mode_) {
    case WorkerMode::kRunning:
      return true;
    case WorkerMode::kStealing:
      return false;  // blocked on a reply
    case WorkerMode::kIdle:
      if (dtd_.wave_pending()) return true;
      if (id_ == 0 && !wave_open_) return true;  // ticking toward the next wave
      return false;
    case WorkerMode::kTerminated:
      return false;
  }
  return false;
}

bool Worker::step(WorkerIO& io) {
  switch (mode_) {
    case WorkerMode::kTerminated:
      return false;
    case WorkerMode::kRunning: {
      if (stack_.empty()) {
        probe(io);  // answer stragglers before switching modes
        if (mode_ == WorkerMode::kRunning && stack_.empty()) enter_steal(io);
        if (mode_ == WorkerMode::kIdle) {
          contribute_if_due(io);
          if (id_ == 0) root_wave_duties(io);
        }
        return true;
      }
      expand_one(io);
      if (++steps_since_probe_ >= pass_.probe_every) {
        steps_since_probe_ = 0;
        probe(io);
      }
      return true;
    }
    case WorkerMode::kStealing:
    case WorkerMode::kIdle: {
      auto t0 = std::chrono::steady_clock::now();
      std::uint64_t waves_before = dtd_.wave();
      WorkerMode mode_before = mode_;
      bool had_msg = false;
      // Drain and service exactly like a running probe would.
      {
        Message m;
        while (io.poll(m)) {
          had_msg = true;
          on_message(io, m);
        }
        service_pending(io);
      }
      if (mode_ == WorkerMode::kIdle) {
        contribute_if_due(io);
        if (id_ == 0) root_wave_duties(io);
      }
      if (pass_.timed) metrics_.idle_s += seconds_since(t0);
      return had_msg || mode_ != mode_before || dtd_.wave() != waves_before;
    }
  }
  return false;
}

}  // namespace parlamp
