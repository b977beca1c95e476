#pragma once

#include <cstdint>

#include "parlamp/message.hpp"
#include "parlamp/topology.hpp"

namespace parlamp {

// Per-worker termination-detection state: a bounded logical clock (the epoch
// of the last wave this worker reported into), a cumulative basic-message
// balance, and a taint flag marking that a basic message crossed the current
// wave boundary. Comparisons are epoch-relative so the 32-bit clock may wrap.
class DtdLocal {
 public:
  DtdLocal() = default;
  DtdLocal(int id, int worker_count)
      : id_(id), num_children_(static_cast<int>(tree_children(id, worker_count).size())) {}

  std::uint32_t stamp() const { return epoch_; }
  long long balance() const { return balance_; }
  bool tainted() const { return tainted_; }

  void on_basic_send() { ++balance_; }

  void on_basic_receive(std::uint32_t msg_timestamp) {
    --balance_;
    // A stamp at or past our epoch means the message crossed the boundary of
    // the wave we last reported into; the snapshot cannot be trusted.
    if (static_cast<std::int32_t>(msg_timestamp - epoch_) >= 0) tainted_ = true;
  }

  // A CONTROL_DOWN announced this wave. Returns true when it is new.
  bool start_wave(std::uint64_t wave_id) {
    if (wave_id <= wave_) return false;
    wave_ = wave_id;
    contributed_ = false;
    child_ups_ = 0;
    acc_ = UpAggregate{};
    return true;
  }

  std::uint64_t wave() const { return wave_; }
  bool wave_pending() const { return wave_ != 0 && !contributed_; }
  bool contributed() const { return contributed_; }

  // Fold this worker's own snapshot into the subtree aggregate and move the
  // epoch up to the wave being reported. Deltas are supplied by the caller.
  void contribute(std::vector<CounterDelta> deltas, long long nodes_processed) {
    UpAggregate own;
    own.balance = balance_;
    own.tainted = tainted_;
    own.max_clock = epoch_;
    own.nodes_processed = nodes_processed;
    own.contributions = 1;
    own.deltas = std::move(deltas);
    tainted_ = false;
    epoch_ = static_cast<std::uint32_t>(wave_);
    acc_.merge(own);
    contributed_ = true;
  }

  void fold_child_up(const UpAggregate& up) {
    acc_.merge(up);
    ++child_ups_;
  }

  // The subtree report is complete once we contributed and every child did.
  bool subtree_complete() const { return contributed_ && child_ups_ == num_children_; }

  const UpAggregate& aggregate() const { return acc_; }

 private:
  int id_ = 0;
  int num_children_ = 0;
  std::uint32_t epoch_ = 0;
  long long balance_ = 0;
  bool tainted_ = false;
  std::uint64_t wave_ = 0;
  bool contributed_ = false;
  int child_ups_ = 0;
  UpAggregate acc_;
};

}  // namespace parlamp
