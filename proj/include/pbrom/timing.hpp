#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

namespace pbrom {

// Milliseconds elapsed while running f once, on the monotonic clock.
template <class F>
double time_once_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

// Median of `reps` timed runs after one untimed warm-up call.
template <class F>
double median_time_ms(F&& f, int reps = 5) {
  if (reps < 1) reps = 1;
  f();  // warm caches and allocators
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) t.push_back(time_once_ms(f));
  std::sort(t.begin(), t.end());
  const std::size_t m = t.size() / 2;
  if (t.size() % 2 == 1) return t[m];
  return 0.5 * (t[m - 1] + t[m]);
}

// Milliseconds per run over `batch` back-to-back runs, timed as one block.
// Useful when a single run is too fast for the clock's resolution.
template <class F>
double batched_time_ms(F&& f, int batch) {
  if (batch < 1) batch = 1;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < batch; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / batch;
}

}  // namespace pbrom
