#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "parlamp/engine.hpp"
#include "parlamp/errors.hpp"

namespace parlamp {

namespace {

struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Message> queue;
};

class ThreadIO final : public WorkerIO {
 public:
  ThreadIO(std::vector<Mailbox>& boxes, int self) : boxes_(boxes), self_(self) {}

  void send(int dst, Message m) override {
    {
      std::lock_guard<std::mutex> lock(boxes_[dst].mu);
      boxes_[dst].queue.push_back(std::move(m));
    }
    boxes_[dst].cv.notify_one();
  }

  bool poll(Message& out) override {
    Mailbox& box = boxes_[self_];
    std::lock_guard<std::mutex> lock(box.mu);
    if (box.queue.empty()) return false;
    out = std::move(box.queue.front());
    box.queue.pop_front();
    return true;
  }

  // Sleep until a message arrives or the probe interval elapses.
  void wait(double seconds) {
    Mailbox& box = boxes_[self_];
    std::unique_lock<std::mutex> lock(box.mu);
    if (!box.queue.empty()) return;
    box.cv.wait_for(lock, std::chrono::duration<double>(seconds));
  }

 private:
  std::vector<Mailbox>& boxes_;
  int self_;
};

}  // namespace

PassOutcome run_pass_threads(const TransactionDatabase& db, double alpha,
                             const PassConfig& pass, const RunParams& params) {
  const int P = params.workers;
  StatContext ctx = StatContext::make(db.num_transactions(), db.num_positive());
  LifelineTopology topo = build_topology(P, params.lifeline_l, params.steal_w);

  PassConfig cfg = pass;
  cfg.timed = true;
  cfg.auto_probe = true;
  cfg.probe_every = 1;
  cfg.probe_target_ms = params.probe_ms;
  cfg.naive = params.naive;  // the run-level switch is authoritative

  std::vector<Mailbox> boxes(static_cast<std::size_t>(P));
  std::vector<Worker> workers;
  workers.reserve(P);
  for (int i = 0; i < P; ++i)
    workers.emplace_back(i, db, ctx, topo, cfg, alpha, params.seed);

  std::atomic<bool> failed{false};
  std::vector<std::string> errors(static_cast<std::size_t>(P));
  std::vector<std::thread> threads;
  threads.reserve(P);
  const double wait_s = params.probe_ms / 1000.0;
  for (int i = 0; i < P; ++i) {
    threads.emplace_back([&, i] {
      ThreadIO io(boxes, i);
      Worker& w = workers[i];
      try {
        w.preprocess(io);
        while (!w.terminated() && !failed.load(std::memory_order_relaxed)) {
          bool progressed = w.step(io);
          if (!progressed && !w.terminated()) {
            auto t0 = std::chrono::steady_clock::now();
            io.wait(wait_s);
            w.metrics().idle_s +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          }
        }
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (std::thread& t : threads) t.join();

  if (failed.load()) {
    for (int i = 0; i < P; ++i)
      if (!errors[i].empty())
        throw InvariantViolation("worker " + std::to_string(i) + ": " + errors[i]);
  }
  for (int i = 0; i < P; ++i) {
    if (!boxes[i].queue.empty())
      throw InvariantViolation("messages left in mailbox " + std::to_string(i) +
                               " after termination");
    if (!workers[i].terminated())
      throw InvariantViolation("worker " + std::to_string(i) + " never terminated");
  }

  PassOutcome out;
  const Worker& root = workers[0];
  out.final_lambda = cfg.dynamic_lambda ? root.final_lambda() : cfg.min_support;
  out.counters = root.aggregate().cs_counters;
  out.waves = root.wave_stats();

  std::vector<long long> local_sum(out.counters.size(), 0);
  for (const Worker& w : workers)
    for (std::size_t s = 0; s < local_sum.size(); ++s) local_sum[s] += w.lamp().cs_counters[s];
  if (local_sum != out.counters)
    throw InvariantViolation("aggregated counters diverge from local counters");

  for (const Worker& w : workers) {
    out.metrics.push_back(w.metrics());
    const auto& c = w.collected();
    out.collected.insert(out.collected.end(), c.begin(), c.end());
  }
  return out;
}

}  // namespace parlamp
