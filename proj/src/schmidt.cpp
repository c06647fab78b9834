#include "entgap/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entgap/spectra.hpp"

namespace entgap {

namespace {

constexpr double kUnitaryTolerance = 1e-10;
constexpr double kBasisTolerance = 1e-10;
constexpr double kMaximallyMixedTolerance = 1e-8;

double family_violation(const Eigen::MatrixXcd& q) {
  if (q.cols() == 0) return 0.0;
  const Eigen::MatrixXcd gram = q.adjoint() * q;
  double worst = 0.0;
  for (Index a = 0; a < gram.rows(); ++a) {
    worst = std::max(worst, std::abs(std::sqrt(gram(a, a).real()) - 1.0));
    for (Index b = 0; b < gram.cols(); ++b)
      if (a != b) worst = std::max(worst, std::abs(gram(a, b)));
  }
  return worst;
}

std::vector<Index> factor_order(const BipartiteSplit& split) {
  std::vector<Index> order = split.left();
  order.insert(order.end(), split.right().begin(), split.right().end());
  return order;
}

}  // namespace

BipartiteSplit::BipartiteSplit(std::vector<Index> left, std::vector<Index> right, Index factor_count) {
  if (left.empty() || right.empty()) throw InputError("BipartiteSplit: both sides must be nonempty");
  left_ = normalized_subset(left, factor_count);
  right_ = normalized_subset(right, factor_count);
  if (complement(left_, factor_count) != right_)
    throw InputError("BipartiteSplit: sides must be disjoint and cover all factors");
}

BipartiteSplit BipartiteSplit::from_left(std::vector<Index> left, Index factor_count) {
  auto sorted = normalized_subset(left, factor_count);
  auto right = complement(sorted, factor_count);
  return BipartiteSplit(std::move(sorted), std::move(right), factor_count);
}

SchmidtDecomposition schmidt_decompose(const PureState& psi, const BipartiteSplit& split, double rank_tol) {
  if (split.factor_count() != psi.factor_count())
    throw InputError("schmidt_decompose: split does not match factor count");

  const Eigen::MatrixXcd m = bipartite_matrix(psi, split.left());
  const auto s = svd(m);

  Index rank = 0;
  while (rank < s.sigma.size() && s.sigma(rank) * s.sigma(rank) > rank_tol) ++rank;

  SchmidtDecomposition dec{split, psi.shape(), psi.shape().select(split.left()),
                           psi.shape().select(split.right()), {}, {}, {}};
  dec.coefficients = s.sigma.head(rank).cwiseAbs2();
  dec.left = s.u.leftCols(rank);
  // M = U Σ V†, so ψ = Σ σ_α u_α (x) conj(v_α).
  dec.right = s.v.leftCols(rank).conjugate();
  return dec;
}

Eigen::VectorXcd reconstruct_amplitudes(const SchmidtDecomposition& dec) {
  const Eigen::MatrixXcd m =
      dec.left * dec.coefficients.cwiseSqrt().cast<std::complex<double>>().asDiagonal() * dec.right.transpose();
  // Row-major flattening of m is the amplitude vector with left factors first.
  Eigen::VectorXcd grouped(m.size());
  Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      grouped.data(), m.rows(), m.cols()) = m;

  const auto order = factor_order(dec.split);
  const auto back = inverse_permutation(order);
  return detail::permute_amplitudes(grouped, concat(dec.left_shape, dec.right_shape), back);
}

DecompositionCheck verify_decomposition(const PureState& psi, const SchmidtDecomposition& dec) {
  if (!(psi.shape() == dec.shape) || dec.left.rows() != dec.left_shape.total() ||
      dec.right.rows() != dec.right_shape.total() || dec.left.cols() != dec.rank() ||
      dec.right.cols() != dec.rank())
    throw InputError("verify_decomposition: decomposition is not shape-compatible with the state");

  DecompositionCheck check;
  check.residual = (psi.amplitudes() - reconstruct_amplitudes(dec)).norm();
  check.orthonormality = std::max(family_violation(dec.left), family_violation(dec.right));
  check.normalization = std::abs(dec.coefficients.sum() - 1.0);
  if (dec.rank() > 0) check.normalization = std::max(check.normalization, -dec.coefficients.minCoeff());
  return check;
}

std::vector<std::vector<Index>> degenerate_blocks(const Eigen::VectorXd& coefficients, double block_tol) {
  std::vector<std::vector<Index>> blocks;
  if (coefficients.size() == 0) return blocks;
  const double scale = block_tol * std::max(1.0, coefficients.maxCoeff());
  blocks.push_back({0});
  for (Index k = 1; k < coefficients.size(); ++k) {
    if (std::abs(coefficients(k - 1) - coefficients(k)) <= scale)
      blocks.back().push_back(k);
    else
      blocks.push_back({k});
  }
  return blocks;
}

SchmidtDecomposition rotate_block(const SchmidtDecomposition& dec, const std::vector<Index>& block,
                                  const Eigen::MatrixXcd& u, double block_tol) {
  const auto k = static_cast<Index>(block.size());
  if (k == 0) throw InputError("rotate_block: empty block");
  const auto sorted = normalized_subset(block, dec.rank());
  if (u.rows() != k || u.cols() != k) throw InputError("rotate_block: unitary size does not match block");
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() > kUnitaryTolerance)
    throw InputError("rotate_block: matrix is not unitary");

  double lo = dec.coefficients(block.front()), hi = lo;
  for (Index a : block) {
    lo = std::min(lo, dec.coefficients(a));
    hi = std::max(hi, dec.coefficients(a));
  }
  if (hi - lo > block_tol * std::max(1.0, dec.coefficients.maxCoeff()))
    throw InputError("rotate_block: block coefficients are not degenerate");

  Eigen::MatrixXcd left_block(dec.left.rows(), k), right_block(dec.right.rows(), k);
  for (Index j = 0; j < k; ++j) {
    left_block.col(j) = dec.left.col(block[static_cast<std::size_t>(j)]);
    right_block.col(j) = dec.right.col(block[static_cast<std::size_t>(j)]);
  }
  const Eigen::MatrixXcd new_left = left_block * u;
  const Eigen::MatrixXcd new_right = right_block * u.conjugate();

  SchmidtDecomposition out = dec;
  for (Index j = 0; j < k; ++j) {
    out.left.col(block[static_cast<std::size_t>(j)]) = new_left.col(j);
    out.right.col(block[static_cast<std::size_t>(j)]) = new_right.col(j);
  }
  return out;
}

SchmidtDecomposition decomposition_from_basis(const PureState& psi, const BipartiteSplit& split,
                                              const std::vector<PureState>& basis) {
  if (split.factor_count() != psi.factor_count())
    throw InputError("decomposition_from_basis: split does not match factor count");
  const FactorShape left_shape = psi.shape().select(split.left());
  const Index dl = left_shape.total();

  const Eigen::MatrixXcd m = bipartite_matrix(psi, split.left());
  const Eigen::MatrixXcd rho = m * m.adjoint();
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(dl, dl) / static_cast<double>(dl);
  if ((rho - mixed).cwiseAbs().maxCoeff() > kMaximallyMixedTolerance)
    throw InputError("decomposition_from_basis: left marginal is not maximally mixed");

  if (static_cast<Index>(basis.size()) != dl)
    throw InputError("decomposition_from_basis: basis has " + std::to_string(basis.size()) +
                     " vectors, left dimension is " + std::to_string(dl));
  Eigen::MatrixXcd b(dl, dl);
  for (Index a = 0; a < dl; ++a) {
    const auto& v = basis[static_cast<std::size_t>(a)];
    if (!(v.shape() == left_shape)) throw InputError("decomposition_from_basis: basis vector has wrong shape");
    b.col(a) = v.amplitudes();
  }
  if ((b.adjoint() * b - Eigen::MatrixXcd::Identity(dl, dl)).cwiseAbs().maxCoeff() > kBasisTolerance)
    throw InputError("decomposition_from_basis: basis is not orthonormal");

  SchmidtDecomposition dec{split, psi.shape(), left_shape, psi.shape().select(split.right()), {}, {}, {}};
  dec.coefficients = Eigen::VectorXd::Constant(dl, 1.0 / static_cast<double>(dl));
  dec.left = b;
  // (<b_α| (x) 1) ψ, rescaled to unit norm.
  dec.right = std::sqrt(static_cast<double>(dl)) * (m.transpose() * b.conjugate());
  return dec;
}

}  // namespace entgap
