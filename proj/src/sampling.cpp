#include "entgap/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "entgap/inequality.hpp"
#include "entgap/schmidt.hpp"

namespace entgap {

namespace {

Eigen::VectorXcd complex_gaussians(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd z(n);
  for (Index k = 0; k < n; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(k) = {re, im};
  }
  return z;
}

ScanSample evaluate_sample(Index index, const FactorShape& shape, std::uint64_t master_seed,
                           const ScanOptions& options) {
  ScanSample row;
  row.sample_index = index;
  row.derived_seed = derive_seed(master_seed, static_cast<std::uint64_t>(index));
  try {
    const FourFactorState s(haar_state(shape, row.derived_seed));
    const auto dec = schmidt_decompose(s.state(), additivity_split());
    const auto check = verify_decomposition(s.state(), dec);
    if (!(check.residual <= options.residual_tol) || !(check.orthonormality <= kScanResidualTolerance))
      throw NumericalError("decomposition failed verification (residual " + describe_value(check.residual) + ")");
    const auto report = bn_gap(s, dec, options.log_base, DecompositionSource::svd, {},
                               std::max(options.residual_tol, check.residual));
    row.lhs = report.lhs;
    row.rhs = report.rhs;
    row.gap = report.gap;
  } catch (const NumericalError& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PureState haar_state(const FactorShape& shape, std::uint64_t seed) {
  return PureState::normalized(shape, complex_gaussians(shape.total(), seed));
}

Eigen::MatrixXcd haar_unitary(Index n, std::uint64_t seed) {
  if (n < 1) throw InputError("haar_unitary: n must be >= 1");
  const Eigen::VectorXcd z = complex_gaussians(n * n, seed);
  const Eigen::MatrixXcd g = Eigen::Map<const Eigen::MatrixXcd>(z.data(), n, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

void aggregate(ScanReport& report) {
  std::sort(report.per_sample.begin(), report.per_sample.end(),
            [](const ScanSample& a, const ScanSample& b) { return a.sample_index < b.sample_index; });
  report.n_samples = static_cast<Index>(report.per_sample.size());
  report.violation_count = 0;
  report.failed_count = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  Index ok = 0;
  for (const auto& row : report.per_sample) {
    if (!row.ok()) {
      ++report.failed_count;
      continue;
    }
    ++ok;
    lo = std::min(lo, row.gap);
    hi = std::max(hi, row.gap);
    sum += row.gap;
    if (row.gap < kViolationThreshold) ++report.violation_count;
  }
  if (ok == 0) {
    report.min_gap = report.max_gap = report.mean_gap = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  report.min_gap = lo;
  report.max_gap = hi;
  // clamp guards min <= mean <= max against summation roundoff
  report.mean_gap = std::clamp(sum / static_cast<double>(ok), lo, hi);
}

ScanReport scan(Index n_samples, const FactorShape& shape, std::uint64_t master_seed, const ScanOptions& options) {
  if (n_samples < 1) throw InputError("scan: n_samples must be >= 1");
  if (shape.factor_count() != 4) throw InputError("scan: shape must have 4 factors");

  ScanReport report;
  report.shape = shape;
  report.master_seed = master_seed;
  report.log_base = options.log_base;
  report.per_sample.resize(static_cast<std::size_t>(n_samples));

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<Index>(threads, n_samples));

  auto work = [&](unsigned worker) {
    for (Index i = worker; i < n_samples; i += threads)
      report.per_sample[static_cast<std::size_t>(i)] = evaluate_sample(i, shape, master_seed, options);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  aggregate(report);
  return report;
}

}  // namespace entgap
