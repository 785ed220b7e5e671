#pragma once
#include <cstddef>
#include <new>
#include <vector>

namespace jsvd {

// 64-byte aligned storage so every column of a padded matrix starts on a
// vector boundary.
template <class T, std::size_t Align = 64>
struct AlignedAllocator {
  using value_type = T;
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(Align)));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t(Align)); }

  template <class U>
  bool operator==(const AlignedAllocator<U, Align>&) const noexcept { return true; }
};

using AlignedVec = std::vector<double, AlignedAllocator<double>>;

}  // namespace jsvd
