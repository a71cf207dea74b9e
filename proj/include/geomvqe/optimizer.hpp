#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "molecule.hpp"
#include "statevector.hpp"

namespace geomvqe {

struct OptimizerConfig {
  double step_theta = 0.2;  // rad per Ha; full-angle gates, so 4x the curvature of half-angle ones
  double step_x = 0.5;  // Bohr per (Ha/Bohr)
  double grad_tolerance_x = 1e-5;  // Ha/Bohr, on the largest component
  int max_iterations = 500;
  double fd_delta = 0.01;  // Bohr
  double adaptive_grad_threshold = 1e-5;  // Ha
  int threads = 1;

  void validate() const {
    if (!(step_theta > 0 && step_x > 0 && grad_tolerance_x > 0 && max_iterations > 0 &&
          fd_delta > 0 && adaptive_grad_threshold > 0 && threads > 0))
      throw InputError("optimizer settings must all be positive");
  }
};

struct TrajectoryRecord {
  int iteration = 0;
  double energy = 0.0;  // Ha
  std::vector<double> theta;
  std::vector<double> x;  // Bohr
  double max_grad_x = 0.0;  // Ha/Bohr
  double max_grad_theta = 0.0;  // Ha
};

enum class StopReason { converged, max_iterations, scf_failure };

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Circuit circuit;
  std::optional<GeometryParams> final_geometry;
  StopReason stop = StopReason::max_iterations;
  std::string message;

  const TrajectoryRecord& final_record() const { return records.back(); }
  bool converged() const { return stop == StopReason::converged; }
};

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Run f(0..n-1) on up to `threads` workers. Each index must write only its own output slot;
/// the first exception is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace geomvqe
