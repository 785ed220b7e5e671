#pragma once
// Worker pool plumbing. Results never depend on the worker count: every
// parallel loop writes to fixed slots and reductions happen afterwards in
// index order.
#include <cstddef>
#include <stdexcept>
#include <utility>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "jsvd/lanes.hpp"

namespace jsvd {

class Workers {
 public:
  explicit Workers(unsigned n) : n_(n == 0 ? 1 : n) {
    if (n_ > 1) arena_.initialize(static_cast<int>(n_));
  }
  unsigned count() const { return n_; }

  // Run f inside the arena so nested for_n calls use at most count() threads.
  template <class F>
  void run(F&& f) {
    if (n_ > 1)
      arena_.execute(std::forward<F>(f));
    else
      f();
  }

  // f(i) for i in [0, n); must be called from within run().
  template <class F>
  void for_n(std::size_t n, F&& f) const {
    if (n_ <= 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) f(i);
      return;
    }
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
    });
  }

 private:
  unsigned n_;
  tbb::task_arena arena_;
};

// Calls f with a default-constructed backend tag of width s.
template <class F>
decltype(auto) with_backend(std::size_t s, F&& f) {
  switch (s) {
    case 2: return f(lanes::Emu<2>{});
    case 4: return f(lanes::Emu<4>{});
    case 8: return f(lanes::Native{});
    case 16: return f(lanes::Emu<16>{});
    default: throw std::invalid_argument("unsupported lane count (use 2, 4, 8 or 16)");
  }
}

}  // namespace jsvd
