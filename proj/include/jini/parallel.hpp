#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace jini {

// Worker count: explicit request > JINI_THREADS env var > hardware.
int default_thread_count();
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers.  Work items are
// claimed from an atomic counter; callers must write results into
// index-addressed slots so the outcome is independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// Pairwise (cascade) summation: deterministic and numerically stable
// regardless of how the inputs were produced.
double pairwise_sum(const double* data, int n);
double pairwise_sum(const std::vector<double>& xs);
Eigen::VectorXd pairwise_sum(const std::vector<Eigen::VectorXd>& xs);

}  // namespace jini
