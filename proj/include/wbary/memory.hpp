#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <new>
#include <vector>

namespace wbary {

// Process-wide accounting of bytes held by tracked containers. Every
// structure whose size depends on the number of combinations or on the
// number of generated columns is allocated through TrackedAllocator, so the
// peak reported here is the solver's working-set size.
class MemoryAccount {
 public:
  static void add(std::size_t bytes) noexcept {
    const auto now = current_.fetch_add(static_cast<std::int64_t>(bytes)) +
                     static_cast<std::int64_t>(bytes);
    auto seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
  }
  static void release(std::size_t bytes) noexcept {
    current_.fetch_sub(static_cast<std::int64_t>(bytes));
  }
  static std::int64_t current() noexcept { return current_.load(); }
  static std::int64_t peak() noexcept { return peak_.load(); }
  // Restarts peak tracking from the current level.
  static void reset_peak() noexcept { peak_.store(current_.load()); }

 private:
  static inline std::atomic<std::int64_t> current_{0};
  static inline std::atomic<std::int64_t> peak_{0};
};

template <class T>
struct TrackedAllocator {
  using value_type = T;

  TrackedAllocator() noexcept = default;
  template <class U>
  TrackedAllocator(const TrackedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    MemoryAccount::add(n * sizeof(T));
    return p;
  }
  void deallocate(T* p, std::size_t n) noexcept {
    MemoryAccount::release(n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  template <class U>
  bool operator==(const TrackedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using tracked_vector = std::vector<T, TrackedAllocator<T>>;

template <class K, class V>
using tracked_map =
    std::map<K, V, std::less<K>, TrackedAllocator<std::pair<const K, V>>>;

}  // namespace wbary
