#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entgap/spectra.hpp"
#include "entgap/tensor.hpp"

namespace entgap {

/// Seed for sample `index` of a batch: the splitmix64 finalizer applied to
/// master + 0x9E3779B97F4A7C15 * (index + 1).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Independent standard complex Gaussians, normalized. Same (shape, seed)
/// gives the same amplitudes.
PureState haar_state(const FactorShape& shape, std::uint64_t seed);

/// Haar-distributed n x n unitary (QR of a complex Ginibre matrix with the
/// phases of diag(R) divided out).
Eigen::MatrixXcd haar_unitary(Index n, std::uint64_t seed);

inline constexpr double kViolationThreshold = -1e-9;
inline constexpr double kScanResidualTolerance = 1e-9;

struct ScanSample {
  Index sample_index = 0;
  std::uint64_t derived_seed = 0;
  double lhs = 0;
  double rhs = 0;
  double gap = 0;
  std::string error;  // nonempty when the sample failed

  bool ok() const { return error.empty(); }
};

struct ScanReport {
  Index n_samples = 0;
  FactorShape shape;
  std::uint64_t master_seed = 0;
  LogBase log_base = LogBase::natural;
  double min_gap = 0;
  double max_gap = 0;
  double mean_gap = 0;
  Index violation_count = 0;
  Index failed_count = 0;
  std::vector<ScanSample> per_sample;  // sorted by sample_index
};

struct ScanOptions {
  LogBase log_base = LogBase::natural;
  double residual_tol = kScanResidualTolerance;
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Evaluates the inequality gap of Haar states with their SVD decomposition.
/// Failed samples are recorded and excluded from the aggregates.
ScanReport scan(Index n_samples, const FactorShape& shape, std::uint64_t master_seed,
                const ScanOptions& options = {});

/// Recomputes min/max/mean/violation/failure counts from per_sample.
void aggregate(ScanReport& report);

}  // namespace entgap
