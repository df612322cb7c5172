#include "nxtbdi/sim/median.hpp"

#include <algorithm>
#include <stdexcept>

namespace nxtbdi::sim {

MedianWindow::MedianWindow(std::size_t capacity) : ring_(capacity) {
  if (capacity == 0) throw std::invalid_argument("median window needs n >= 1");
}

void MedianWindow::push(long long sample) {
  ring_[head_] = sample;
  head_ = (head_ + 1) % ring_.size();
  count_ = std::min(count_ + 1, ring_.size());
}

long long MedianWindow::median() const {
  if (count_ == 0) throw std::logic_error("median of an empty window");
  long long scratch[64];
  std::vector<long long> heap;
  long long* first = scratch;
  if (count_ > std::size(scratch)) {
    heap.resize(count_);
    first = heap.data();
  }
  std::copy_n(ring_.begin(), count_, first);
  long long* mid = first + (count_ - 1) / 2;
  std::nth_element(first, mid, first + count_);
  return *mid;
}

}  // namespace nxtbdi::sim
