#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "parlamp/dataset.hpp"

namespace parlamp {

// REQUEST, REJECT, and GIVE are "basic" messages: they carry work traffic,
// are counted in the termination-detection balance, and are stamped with the
// sender's epoch. CONTROL_UP, CONTROL_DOWN, and FINISH are control messages
// and are never counted.
enum class MsgKind : std::uint8_t {
  kRequest,
  kReject,
  kGive,
  kControlUp,
  kControlDown,
  kFinish,
};

inline bool is_basic(MsgKind k) {
  return k == MsgKind::kRequest || k == MsgKind::kReject || k == MsgKind::kGive;
}

inline const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::kRequest: return "REQUEST";
    case MsgKind::kReject: return "REJECT";
    case MsgKind::kGive: return "GIVE";
    case MsgKind::kControlUp: return "CONTROL_UP";
    case MsgKind::kControlDown: return "CONTROL_DOWN";
    case MsgKind::kFinish: return "FINISH";
  }
  return "?";
}

// Wire form of a transferred search node: the itemset identifies the node,
// the receiver recomputes the cover.
struct NodeWire {
  std::vector<ItemId> itemset;
  ItemId core = 0;
};

struct CounterDelta {
  int support = 0;
  long long count = 0;
};

// Upward wave payload, aggregated over a spanning-tree subtree.
struct UpAggregate {
  long long balance = 0;
  bool tainted = false;
  std::uint32_t max_clock = 0;
  long long nodes_processed = 0;
  int contributions = 0;
  std::vector<CounterDelta> deltas;

  void merge(const UpAggregate& other) {
    balance += other.balance;
    tainted = tainted || other.tainted;
    max_clock = std::max(max_clock, other.max_clock);
    nodes_processed += other.nodes_processed;
    contributions += other.contributions;
    deltas.insert(deltas.end(), other.deltas.begin(), other.deltas.end());
  }
};

struct Message {
  MsgKind kind = MsgKind::kRequest;
  int source = -1;
  std::uint32_t timestamp = 0;    // sender epoch; meaningful on basic messages
  std::vector<NodeWire> nodes;    // GIVE payload
  std::uint64_t wave_id = 0;      // CONTROL_UP / CONTROL_DOWN
  int lambda = 1;                 // CONTROL_DOWN: current global threshold
  UpAggregate up;                 // CONTROL_UP
};

}  // namespace parlamp
