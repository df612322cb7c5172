#pragma once

#include <cstddef>
#include <vector>

namespace nxtbdi::sim {

/// Ring of the last n raw samples; the emitted value is their median.
/// With an even number of samples the lower middle one is used.
class MedianWindow {
 public:
  explicit MedianWindow(std::size_t capacity = 5);

  void push(long long sample);
  long long median() const;

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return ring_.size(); }
  bool empty() const { return count_ == 0; }
  void clear() { count_ = head_ = 0; }

 private:
  std::vector<long long> ring_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

}  // namespace nxtbdi::sim
