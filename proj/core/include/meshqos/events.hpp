#pragma once

#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace meshqos {

// Min-heap of timestamped events. Ties on time pop in insertion order, so
// a run's event sequence is a pure function of what was pushed.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    std::int64_t time_us = 0;
    std::uint64_t order = 0;  // insertion counter, breaks time ties
    Payload payload;
  };

  void push(std::int64_t time_us, Payload payload) {
    heap_.push(Entry{time_us, next_order_++, std::move(payload)});
  }

  Entry pop() {
    Entry top = heap_.top();
    heap_.pop();
    return top;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time_us != b.time_us) return a.time_us > b.time_us;
      return a.order > b.order;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_order_ = 0;
};

}  // namespace meshqos
