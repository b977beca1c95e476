#include "parlamp/topology.hpp"

#include "parlamp/errors.hpp"

namespace parlamp {

LifelineTopology build_topology(int worker_count, int side_length, int random_steal_trials) {
  if (worker_count < 1) throw DataError("worker count must be >= 1");
  if (side_length < 2) throw DataError("lifeline side length must be >= 2");
  if (random_steal_trials < 0) throw DataError("steal trial count must be >= 0");

  LifelineTopology topo;
  topo.worker_count = worker_count;
  topo.side_length = side_length;
  topo.random_steal_trials = random_steal_trials;

  long long span = 1;
  while (span < worker_count) {
    span *= side_length;
    ++topo.dimension;
  }

  topo.lifelines.resize(worker_count);
  for (int id = 0; id < worker_count; ++id) {
    long long digit_base = 1;
    for (int d = 0; d < topo.dimension; ++d) {
      int digit = static_cast<int>(id / digit_base) % side_length;
      long long neighbor = id + (((digit + 1) % side_length) - digit) * digit_base;
      if (neighbor < worker_count && neighbor != id)
        topo.lifelines[id].push_back(static_cast<int>(neighbor));
      digit_base *= side_length;
    }
  }
  return topo;
}

}  // namespace parlamp
