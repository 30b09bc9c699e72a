#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace docforge {

/// Base error for all library failures. `code` is a short stable slug
/// (e.g. "duplicate_id", "stale_cache") suitable for machine-readable output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

/// Warning sink. Defaults to stderr; tests and the CLI may replace it.
inline std::function<void(const std::string&)>& warn_handler() {
  static std::function<void(const std::string&)> handler =
      [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
  return handler;
}

inline void warn(const std::string& msg) { warn_handler()(msg); }

// ---------------------------------------------------------------------------
// Hashing. FNV-1a is used for feature hashing, content addressing and rng
// stream derivation; it must stay stable across platforms and releases
// because fingerprints and cache files depend on it.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (i * 8)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic, platform-independent random stream. Streams are derived
/// from (seed, tags...) so that per-document work is reproducible no matter
/// how it is scheduled across workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Decorrelate trivially related seeds.
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

/// Builds the seed for a named stream: mixes the run seed with string and
/// integer tags (document id, step index, purpose).
class StreamSeed {
 public:
  explicit StreamSeed(std::uint64_t seed) : h_(fnv1a64_u64(seed)) {}

  StreamSeed& with(std::string_view tag) {
    h_ = fnv1a64(tag, h_);
    return *this;
  }
  StreamSeed& with(std::uint64_t v) {
    h_ = fnv1a64_u64(v, h_);
    return *this;
  }

  Rng rng() const { return Rng(h_); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_;
};

// ---------------------------------------------------------------------------
// Deterministic fan-out. Each index gets an independent work item; results
// must be written into per-index slots by the callee so the outcome is
// identical for any worker count.
// ---------------------------------------------------------------------------

inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  unsigned n = std::min<std::size_t>(workers, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace docforge
