#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace csl {

// Compensated accumulator; keeps roundoff near machine epsilon even for
// sums with large internal cancellation.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// splitmix64; used to derive independent per-trajectory seeds from one
// master seed so results do not depend on worker scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Runs fn(block, begin, end) on contiguous index blocks, one per worker.
// Callers that need determinism must reduce per-block results in block order.
inline void parallel_blocks(std::size_t n_items, int workers,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
  if (workers < 1) workers = 1;
  if (static_cast<std::size_t>(workers) > n_items) workers = n_items ? static_cast<int>(n_items) : 1;
  if (workers == 1) {
    fn(0, 0, n_items);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = n_items / workers;
  std::size_t rem = n_items % workers;
  std::size_t begin = 0;
  for (int b = 0; b < workers; ++b) {
    std::size_t end = begin + chunk + (static_cast<std::size_t>(b) < rem ? 1 : 0);
    pool.emplace_back(fn, b, begin, end);
    begin = end;
  }
  for (auto& t : pool) t.join();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares for y = intercept + slope * x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double d = n * sxx - sx * sx;
  LineFit f;
  f.slope = (n * sxy - sx * sy) / d;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace csl
