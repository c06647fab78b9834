#pragma once

#include <vector>

#include <Eigen/Dense>

#include "entgap/tensor.hpp"

namespace entgap {

/// Two disjoint, nonempty factor groups covering all factors (sorted).
class BipartiteSplit {
 public:
  BipartiteSplit(std::vector<Index> left, std::vector<Index> right, Index factor_count);

  /// `left` plus its complement.
  static BipartiteSplit from_left(std::vector<Index> left, Index factor_count);

  const std::vector<Index>& left() const { return left_; }
  const std::vector<Index>& right() const { return right_; }
  Index factor_count() const { return static_cast<Index>(left_.size() + right_.size()); }

  friend bool operator==(const BipartiteSplit&, const BipartiteSplit&) = default;

 private:
  std::vector<Index> left_;
  std::vector<Index> right_;
};

/// ψ = Σ_α sqrt(λ_α) left_α (x) right_α, with the families stored as matrix
/// columns and the tensor factors reordered back to the source order.
struct SchmidtDecomposition {
  BipartiteSplit split;
  FactorShape shape;        // full source shape
  FactorShape left_shape;   // shape.select(split.left())
  FactorShape right_shape;  // shape.select(split.right())
  Eigen::VectorXd coefficients;  // λ_α, descending
  Eigen::MatrixXcd left;         // left_shape.total() x rank
  Eigen::MatrixXcd right;        // right_shape.total() x rank

  Index rank() const { return coefficients.size(); }
  PureState left_vector(Index alpha) const { return PureState(left_shape, left.col(alpha)); }
  PureState right_vector(Index alpha) const { return PureState(right_shape, right.col(alpha)); }
};

/// Worst-case violations of the decomposition invariants against a state.
struct DecompositionCheck {
  double residual = 0;        // ‖ψ - reconstruction‖
  double orthonormality = 0;  // max |‖v‖ - 1| and |<u_a, u_b>| over both families
  double normalization = 0;   // |Σ λ - 1|, or magnitude of a negative λ

  double worst() const { return std::max({residual, orthonormality, normalization}); }
};

inline constexpr double kRankTolerance = 1e-12;
inline constexpr double kBlockTolerance = 1e-8;

SchmidtDecomposition schmidt_decompose(const PureState& psi, const BipartiteSplit& split,
                                       double rank_tol = kRankTolerance);

/// Σ sqrt(λ_α) left_α (x) right_α in the source factor order (not normalized).
Eigen::VectorXcd reconstruct_amplitudes(const SchmidtDecomposition& dec);

DecompositionCheck verify_decomposition(const PureState& psi, const SchmidtDecomposition& dec);

/// Consecutive runs of coefficients equal within block_tol * max(1, λ_max).
std::vector<std::vector<Index>> degenerate_blocks(const Eigen::VectorXd& coefficients,
                                                  double block_tol = kBlockTolerance);

/// Rotates the vectors of a degenerate index set by U: left_α <- Σ_β U_βα left_β,
/// right_α <- Σ_β conj(U_βα) right_β. The represented state is unchanged.
SchmidtDecomposition rotate_block(const SchmidtDecomposition& dec, const std::vector<Index>& block,
                                  const Eigen::MatrixXcd& u, double block_tol = kBlockTolerance);

/// Decomposition of a state whose left marginal is maximally mixed along an
/// arbitrary orthonormal basis of the left factors.
SchmidtDecomposition decomposition_from_basis(const PureState& psi, const BipartiteSplit& split,
                                              const std::vector<PureState>& basis);

}  // namespace entgap
