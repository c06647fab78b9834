#include "entgap/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "entgap/sampling.hpp"

namespace entgap {

namespace {

// S of the first-factor marginal of a two-factor vector.
double pair_entropy(const Eigen::VectorXcd& column, const FactorShape& shape, LogBase base) {
  const PureState v(shape, column);
  return von_neumann_entropy(partial_trace(v, {0}), base);
}

double term(const SchmidtDecomposition& dec, Index alpha, LogBase base) {
  return pair_entropy(dec.left.col(alpha), dec.left_shape, base) +
         pair_entropy(dec.right.col(alpha), dec.right_shape, base);
}

void check_cap(Index d) {
  if (d < 2) throw InputError("dimension d must be >= 2");
  if (d > 31 || d * d * d * d > kMaxTotalDimension)
    throw InputError("d^4 exceeds the total dimension cap");
}

}  // namespace

const char* to_string(DecompositionSource source) {
  switch (source) {
    case DecompositionSource::svd: return "svd";
    case DecompositionSource::product: return "product";
    case DecompositionSource::entangled: return "entangled";
    case DecompositionSource::deformed: return "deformed";
    case DecompositionSource::rotated: return "rotated";
    case DecompositionSource::custom: return "custom";
  }
  return "custom";
}

double bn_lhs(const FourFactorState& s, LogBase base) {
  return von_neumann_entropy(partial_trace(s.state(), std::span<const Index>(alice_factors())), base);
}

double bn_rhs(const SchmidtDecomposition& dec, LogBase base) {
  if (!(dec.split == additivity_split()))
    throw InputError("bn_rhs: decomposition must be across the {0,1}|{2,3} split");
  double rhs = 0.0;
  for (Index a = 0; a < dec.rank(); ++a) rhs += dec.coefficients(a) * term(dec, a, base);
  return rhs;
}

GapReport bn_gap(const FourFactorState& s, const SchmidtDecomposition& dec, LogBase base,
                 DecompositionSource source, std::string descriptor, double residual_tol) {
  const auto check = verify_decomposition(s.state(), dec);
  if (!(check.residual <= residual_tol))
    throw InputError("bn_gap: decomposition does not represent the state (residual " +
                     describe_value(check.residual) + ")");
  GapReport r;
  r.lhs = bn_lhs(s, base);
  r.rhs = bn_rhs(dec, base);
  r.gap = r.lhs - r.rhs;
  r.log_base = base;
  r.decomposition_source = source;
  r.state_descriptor = std::move(descriptor);
  return r;
}

FourFactorState canonical_counterexample(Index d) {
  check_cap(d);
  const FactorShape shape{d, d, d, d};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(shape.total());
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k) amps(flatten_index({i, k, i, k}, shape)) = 1.0 / static_cast<double>(d);
  return FourFactorState(PureState(shape, std::move(amps)));
}

std::vector<PureState> bell_basis(Index d) {
  if (d < 2) throw InputError("bell_basis: d must be >= 2");
  const FactorShape shape{d, d};
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<PureState> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  for (Index m = 0; m < d; ++m) {
    for (Index n = 0; n < d; ++n) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
      for (Index j = 0; j < d; ++j) {
        // reduce jm mod d first so the phase argument stays exact-ish
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * m) % d) / static_cast<double>(d);
        v(flatten_index({j, (j + n) % d}, shape)) = std::polar(amp, angle);
      }
      basis.emplace_back(shape, std::move(v));
    }
  }
  return basis;
}

SchmidtDecomposition product_decomposition(Index d) {
  const auto s = canonical_counterexample(d);
  const FactorShape shape{d, d};
  std::vector<PureState> basis;
  for (Index j = 0; j < d * d; ++j) basis.push_back(PureState::basis(shape, j));
  return decomposition_from_basis(s.state(), additivity_split(), basis);
}

SchmidtDecomposition entangled_decomposition(Index d) {
  const auto s = canonical_counterexample(d);
  return decomposition_from_basis(s.state(), additivity_split(), bell_basis(d));
}

DeformedCounterexample deformed_counterexample(Index d, double eps) {
  check_cap(d);
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("deformed_counterexample: eps must lie in (0, 1)");
  const Index big_d = d * d;
  const auto basis = bell_basis(d);
  const FactorShape shape{d, d, d, d};

  SchmidtDecomposition dec{additivity_split(), shape, FactorShape{d, d}, FactorShape{d, d}, {}, {}, {}};
  dec.coefficients.resize(big_d);
  dec.left.resize(big_d, big_d);
  dec.right.resize(big_d, big_d);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(shape.total());
  const double dd = static_cast<double>(big_d);
  for (Index alpha = 0; alpha < big_d; ++alpha) {
    const double t = (2.0 * static_cast<double>(alpha) - dd + 1.0) / dd;
    const double lambda = (1.0 + eps * t) / dd;
    const Eigen::VectorXcd& phi = basis[static_cast<std::size_t>(alpha)].amplitudes();
    amps += std::sqrt(lambda) * Eigen::VectorXcd(Eigen::kroneckerProduct(phi, phi.conjugate()));
    // λ increases with α; store descending
    const Index slot = big_d - 1 - alpha;
    dec.coefficients(slot) = lambda;
    dec.left.col(slot) = phi;
    dec.right.col(slot) = phi.conjugate();
  }
  return {FourFactorState(PureState::normalized(shape, std::move(amps))), std::move(dec)};
}

namespace {

struct BlockSearch {
  SchmidtDecomposition& dec;
  LogBase base;
  long evaluations = 0;

  double contribution(Index alpha) {
    ++evaluations;
    return dec.coefficients(alpha) * term(dec, alpha, base);
  }

  double block_value(const std::vector<Index>& block) {
    double v = 0.0;
    for (Index a : block) v += contribution(a);
    return v;
  }

  // Value of the pair (a, b) after the rotation [[c, -e^{-iφ}s], [e^{iφ}s, c]].
  double pair_value(Index a, Index b, double theta, double phi, const Eigen::VectorXcd& la,
                    const Eigen::VectorXcd& lb, const Eigen::VectorXcd& ra, const Eigen::VectorXcd& rb) {
    const double c = std::cos(theta), s = std::sin(theta);
    const std::complex<double> p = std::polar(1.0, phi);
    dec.left.col(a) = c * la + p * s * lb;
    dec.left.col(b) = -std::conj(p) * s * la + c * lb;
    dec.right.col(a) = c * ra + std::conj(p) * s * rb;
    dec.right.col(b) = -p * s * ra + c * rb;
    return contribution(a) + contribution(b);
  }
};

// Grid scan of a periodic 1-D objective followed by golden-section refinement
// around the best grid point. Returns (argmax, max).
template <typename F>
std::pair<double, double> line_search(F&& f, double period, int grid = 12, int refinements = 40) {
  double best_x = 0.0, best_f = f(0.0);
  const double h = period / grid;
  for (int i = 1; i < grid; ++i) {
    const double x = i * h, v = f(x);
    if (v > best_f) best_x = x, best_f = v;
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_x - h, hi = best_x + h;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < refinements; ++it) {
    if (f1 > f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - inv_phi * (hi - lo), f1 = f(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + inv_phi * (hi - lo), f2 = f(x2);
    }
  }
  if (f1 > best_f) best_x = x1, best_f = f1;
  if (f2 > best_f) best_x = x2, best_f = f2;
  return {best_x, best_f};
}

// One greedy pass over all index pairs of the block. Returns the gain.
double sweep_block(BlockSearch& search, const std::vector<Index>& block) {
  double gain = 0.0;
  auto& dec = search.dec;
  for (std::size_t i = 0; i < block.size(); ++i) {
    for (std::size_t j = i + 1; j < block.size(); ++j) {
      const Index a = block[i], b = block[j];
      const Eigen::VectorXcd la = dec.left.col(a), lb = dec.left.col(b);
      const Eigen::VectorXcd ra = dec.right.col(a), rb = dec.right.col(b);
      const double current = search.contribution(a) + search.contribution(b);

      double best_theta = 0.0, best_phi = 0.0, best = current;
      for (double phi : {0.0, std::numbers::pi / 2}) {
        auto [theta, v] = line_search(
            [&](double t) { return search.pair_value(a, b, t, phi, la, lb, ra, rb); }, std::numbers::pi);
        if (v > best) best = v, best_theta = theta, best_phi = phi;
      }
      if (best_theta != 0.0) {
        auto [phi, v] = line_search(
            [&](double p) { return search.pair_value(a, b, best_theta, p, la, lb, ra, rb); },
            2 * std::numbers::pi);
        if (v > best) best = v, best_phi = phi;
      }

      if (best > current) {
        search.pair_value(a, b, best_theta, best_phi, la, lb, ra, rb);
        gain += best - current;
      } else {
        dec.left.col(a) = la, dec.left.col(b) = lb;
        dec.right.col(a) = ra, dec.right.col(b) = rb;
      }
    }
  }
  return gain;
}

}  // namespace

MaximizeResult maximize_rhs(const FourFactorState& s, const MaximizeOptions& options, std::string descriptor) {
  MaximizeResult result{schmidt_decompose(s.state(), additivity_split()), {}, 0.0, {}, 0, 0, 0};
  result.initial_rhs = bn_rhs(result.best, options.log_base);
  result.blocks = degenerate_blocks(result.best.coefficients, options.block_tol);

  bool changed = false;
  for (std::size_t bi = 0; bi < result.blocks.size(); ++bi) {
    const auto& block = result.blocks[bi];
    if (block.size() < 2) continue;

    SchmidtDecomposition& dec = result.best;
    BlockSearch search{dec, options.log_base};
    double best_value = search.block_value(block);

    // (a) Haar restarts from the initial block, keep the best start.
    const std::uint64_t block_seed = derive_seed(options.seed, bi);
    const SchmidtDecomposition origin = dec;
    SchmidtDecomposition best_start = dec;
    for (int r = 0; r < options.restarts; ++r) {
      const auto u = haar_unitary(static_cast<Index>(block.size()), derive_seed(block_seed, static_cast<std::uint64_t>(r)));
      dec = rotate_block(origin, block, u, options.block_tol);
      const double v = search.block_value(block);
      if (v > best_value) best_value = v, best_start = dec, changed = true;
    }
    result.restarts_used = std::max(result.restarts_used, options.restarts);
    dec = best_start;

    // (b) greedy two-index sweeps
    int used = 0;
    for (int sweep = 0; sweep < options.sweeps; ++sweep) {
      ++used;
      const double gain = sweep_block(search, block);
      if (gain > 0.0) changed = true;
      if (gain < 1e-14) break;
    }
    result.sweeps_used = std::max(result.sweeps_used, used);
    result.evaluations += search.evaluations;
  }

  const auto check = verify_decomposition(s.state(), result.best);
  if (!(check.residual <= options.residual_tol))
    throw NumericalError("maximize_rhs: optimized decomposition drifted from the state");

  result.report = bn_gap(s, result.best, options.log_base,
                         changed ? DecompositionSource::rotated : DecompositionSource::svd, std::move(descriptor),
                         options.residual_tol);
  if (result.report.rhs < result.initial_rhs) {
    // roundoff in the incremental search; fall back to the starting point
    result.best = schmidt_decompose(s.state(), additivity_split());
    result.report = bn_gap(s, result.best, options.log_base, DecompositionSource::svd,
                           result.report.state_descriptor, options.residual_tol);
  }
  return result;
}

}  // namespace entgap
