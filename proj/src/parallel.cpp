#include "jini/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

namespace jini {

int default_thread_count() {
  if (const char* env = std::getenv("JINI_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  return default_thread_count();
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  threads = resolve_threads(threads);
  if (threads > n) threads = n;
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic<int> error_claim{0};

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || failed.load(std::memory_order_relaxed)) break;
      try {
        body(i);
      } catch (...) {
        if (error_claim.fetch_add(1) == 0) {
          first_error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(const double* data, int n) {
  if (n <= 0) return 0.0;
  if (n <= 8) {
    double s = data[0];
    for (int i = 1; i < n; ++i) s += data[i];
    return s;
  }
  const int half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& xs) {
  return pairwise_sum(xs.data(), static_cast<int>(xs.size()));
}

namespace {

Eigen::VectorXd pairwise_sum_rec(const std::vector<Eigen::VectorXd>& xs,
                                 int lo, int hi) {
  if (hi - lo <= 8) {
    Eigen::VectorXd s = xs[lo];
    for (int i = lo + 1; i < hi; ++i) s += xs[i];
    return s;
  }
  const int mid = lo + (hi - lo) / 2;
  return pairwise_sum_rec(xs, lo, mid) + pairwise_sum_rec(xs, mid, hi);
}

}  // namespace

Eigen::VectorXd pairwise_sum(const std::vector<Eigen::VectorXd>& xs) {
  if (xs.empty()) {
    throw std::invalid_argument("pairwise_sum: empty input");
  }
  return pairwise_sum_rec(xs, 0, static_cast<int>(xs.size()));
}

}  // namespace jini
