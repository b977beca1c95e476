#pragma once

#include <vector>

namespace parlamp {

// Lifeline overlay: workers are vertices of a base-l hypercube of the
// smallest dimension z with P <= l^z. Worker j's lifelines are the ids
// obtained by incrementing one base-l digit of j modulo l, skipping ids >= P.
struct LifelineTopology {
  int worker_count = 1;
  int side_length = 2;
  int dimension = 0;
  int random_steal_trials = 1;
  std::vector<std::vector<int>> lifelines;  // per worker
};

LifelineTopology build_topology(int worker_count, int side_length, int random_steal_trials);

// Ternary spanning tree used by termination detection: children of i are
// 3i+1, 3i+2, 3i+3 where < P; parent of i > 0 is (i-1)/3.
inline int tree_parent(int id) { return id == 0 ? -1 : (id - 1) / 3; }

inline std::vector<int> tree_children(int id, int worker_count) {
  std::vector<int> kids;
  for (int k = 1; k <= 3; ++k) {
    int c = 3 * id + k;
    if (c < worker_count) kids.push_back(c);
  }
  return kids;
}

}  // namespace parlamp
