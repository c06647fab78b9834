#pragma once

// Multi-factor pure states over C^{d_1} (x) ... (x) C^{d_n}.
//
// Amplitudes are stored row-major with factor 0 most significant, so the
// amplitude of e_{i_0} (x) ... (x) e_{i_{n-1}} lives at
// sum_j i_j * stride_j with stride_{n-1} = 1. Factor positions are 0-based.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "entgap/errors.hpp"

namespace entgap {

using Index = Eigen::Index;

/// Largest total dimension accepted for any state.
inline constexpr Index kMaxTotalDimension = 1'000'000;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Tolerance on |‖ψ‖ - 1| for a state to count as normalized.
template <typename Real>
constexpr Real norm_tolerance() {
  return std::max(Real(1e-12), Real(64) * std::numeric_limits<Real>::epsilon());
}

/// Tolerance on Hermiticity and trace of a density matrix.
template <typename Real>
constexpr Real density_tolerance() {
  return std::max(Real(1e-10), Real(1024) * std::numeric_limits<Real>::epsilon());
}

/// Local dimensions of a tensor product space.
class FactorShape {
 public:
  FactorShape() : dims_{1}, total_{1} {}
  FactorShape(std::initializer_list<Index> dims) : FactorShape(std::vector<Index>(dims)) {}
  explicit FactorShape(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw InputError("FactorShape: at least one factor required");
    total_ = 1;
    for (Index d : dims_) {
      if (d < 1) throw InputError("FactorShape: every dimension must be >= 1");
      if (total_ > kMaxTotalDimension / d)
        throw InputError("FactorShape: total dimension exceeds cap of " +
                         std::to_string(kMaxTotalDimension));
      total_ *= d;
    }
  }

  const std::vector<Index>& dims() const { return dims_; }
  Index factor_count() const { return static_cast<Index>(dims_.size()); }
  Index total() const { return total_; }
  Index operator[](Index j) const { return dims_[static_cast<std::size_t>(j)]; }

  /// Row-major strides, factor 0 most significant.
  std::vector<Index> strides() const {
    std::vector<Index> s(dims_.size(), 1);
    for (std::size_t j = dims_.size() - 1; j > 0; --j) s[j - 1] = s[j] * dims_[j];
    return s;
  }

  /// Shape of the listed factors, in the listed order.
  FactorShape select(std::span<const Index> positions) const {
    std::vector<Index> out;
    out.reserve(positions.size());
    for (Index p : positions) out.push_back(dims_.at(static_cast<std::size_t>(p)));
    return FactorShape(std::move(out));
  }

  /// Concatenation: shape of a (x) b.
  friend FactorShape concat(const FactorShape& a, const FactorShape& b) {
    std::vector<Index> out = a.dims_;
    out.insert(out.end(), b.dims_.begin(), b.dims_.end());
    return FactorShape(std::move(out));
  }

  friend bool operator==(const FactorShape& a, const FactorShape& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<Index> dims_;
  Index total_;
};

inline std::string to_string(const FactorShape& shape) {
  std::string s = "(";
  for (Index j = 0; j < shape.factor_count(); ++j) {
    if (j) s += ",";
    s += std::to_string(shape[j]);
  }
  return s + ")";
}

inline Index flatten_index(std::span<const Index> multi_index, const FactorShape& shape) {
  if (static_cast<Index>(multi_index.size()) != shape.factor_count())
    throw InputError("flatten_index: multi-index length does not match factor count");
  Index linear = 0;
  for (Index j = 0; j < shape.factor_count(); ++j) {
    const Index i = multi_index[static_cast<std::size_t>(j)];
    if (i < 0 || i >= shape[j]) throw InputError("flatten_index: component out of range");
    linear = linear * shape[j] + i;
  }
  return linear;
}

inline Index flatten_index(std::initializer_list<Index> multi_index, const FactorShape& shape) {
  return flatten_index(std::span<const Index>(multi_index.begin(), multi_index.size()), shape);
}

inline std::vector<Index> unflatten_index(Index linear, const FactorShape& shape) {
  if (linear < 0 || linear >= shape.total())
    throw InputError("unflatten_index: linear index out of range");
  std::vector<Index> multi(static_cast<std::size_t>(shape.factor_count()));
  for (Index j = shape.factor_count() - 1; j >= 0; --j) {
    multi[static_cast<std::size_t>(j)] = linear % shape[j];
    linear /= shape[j];
  }
  return multi;
}

/// Throws unless `perm` is a permutation of 0..n-1.
inline void check_permutation(std::span<const Index> perm, Index n) {
  if (static_cast<Index>(perm.size()) != n)
    throw InputError("permutation length does not match factor count");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw InputError("invalid permutation of factor positions");
    seen[static_cast<std::size_t>(p)] = true;
  }
}

inline std::vector<Index> inverse_permutation(std::span<const Index> perm) {
  check_permutation(perm, static_cast<Index>(perm.size()));
  std::vector<Index> inv(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) inv[static_cast<std::size_t>(perm[j])] = static_cast<Index>(j);
  return inv;
}

/// Sorted, validated copy of a factor subset. Empty or duplicate sets throw.
inline std::vector<Index> normalized_subset(std::span<const Index> positions, Index n) {
  if (positions.empty()) throw InputError("factor subset must be nonempty");
  std::vector<Index> out(positions.begin(), positions.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InputError("factor subset contains duplicates");
  if (out.front() < 0 || out.back() >= n) throw InputError("factor position out of range");
  return out;
}

/// Positions of 0..n-1 not in the (sorted) subset.
inline std::vector<Index> complement(std::span<const Index> sorted_subset, Index n) {
  std::vector<Index> out;
  for (Index j = 0; j < n; ++j)
    if (!std::binary_search(sorted_subset.begin(), sorted_subset.end(), j)) out.push_back(j);
  return out;
}

namespace detail {

// out[new_linear] = in[old_linear], where new factor j is old factor perm[j].
template <typename Real>
ComplexVector<Real> permute_amplitudes(const ComplexVector<Real>& in, const FactorShape& shape,
                                       std::span<const Index> perm) {
  const Index n = shape.factor_count();
  const auto old_strides = shape.strides();
  std::vector<Index> dims(static_cast<std::size_t>(n)), strides(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const auto src = static_cast<std::size_t>(perm[static_cast<std::size_t>(j)]);
    dims[static_cast<std::size_t>(j)] = shape.dims()[src];
    strides[static_cast<std::size_t>(j)] = old_strides[src];
  }
  ComplexVector<Real> out(in.size());
  std::vector<Index> counter(static_cast<std::size_t>(n), 0);
  Index source = 0;
  for (Index linear = 0; linear < in.size(); ++linear) {
    out(linear) = in(source);
    // odometer increment over the new multi-index
    for (Index j = n - 1; j >= 0; --j) {
      const auto u = static_cast<std::size_t>(j);
      if (++counter[u] < dims[u]) {
        source += strides[u];
        break;
      }
      source -= (dims[u] - 1) * strides[u];
      counter[u] = 0;
    }
  }
  return out;
}

}  // namespace detail

/// Unit vector in a multi-factor space.
template <typename Real>
class BasicPureState {
 public:
  using Scalar = std::complex<Real>;

  BasicPureState() : amplitudes_(ComplexVector<Real>::Ones(1)) {}

  /// Throws InputError unless the amplitude count matches the shape and the
  /// vector has unit norm within norm_tolerance().
  BasicPureState(FactorShape shape, ComplexVector<Real> amplitudes)
      : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != shape_.total())
      throw InputError("PureState: amplitude count " + std::to_string(amplitudes_.size()) +
                       " does not match shape " + to_string(shape_));
    const Real norm = amplitudes_.norm();
    if (!(std::abs(norm - Real(1)) <= norm_tolerance<Real>()))
      throw InputError("PureState: amplitudes not normalized (norm " + describe_value(double(norm)) + ")");
  }

  /// Rescales to unit norm; zero vectors throw.
  static BasicPureState normalized(FactorShape shape, ComplexVector<Real> amplitudes) {
    const Real norm = amplitudes.norm();
    if (!(norm > Real(0)) || !std::isfinite(double(norm)))
      throw InputError("PureState: cannot normalize a zero or non-finite vector");
    amplitudes /= norm;
    return BasicPureState(std::move(shape), std::move(amplitudes));
  }

  static BasicPureState basis(FactorShape shape, Index linear) {
    if (linear < 0 || linear >= shape.total()) throw InputError("PureState::basis: index out of range");
    ComplexVector<Real> a = ComplexVector<Real>::Zero(shape.total());
    a(linear) = Real(1);
    return BasicPureState(std::move(shape), std::move(a));
  }

  const FactorShape& shape() const { return shape_; }
  const ComplexVector<Real>& amplitudes() const { return amplitudes_; }
  Index factor_count() const { return shape_.factor_count(); }
  Index dimension() const { return shape_.total(); }
  Scalar operator[](Index linear) const { return amplitudes_(linear); }

 private:
  FactorShape shape_;
  ComplexVector<Real> amplitudes_;
};

/// Hermitian, unit-trace operator on the factors it was reduced to.
/// Positivity is checked by the entropy routine, not here.
template <typename Real>
class BasicDensityMatrix {
 public:
  explicit BasicDensityMatrix(const ComplexMatrix<Real>& entries)
      : BasicDensityMatrix(FactorShape{entries.rows()}, entries) {}

  BasicDensityMatrix(FactorShape origin_shape, ComplexMatrix<Real> entries)
      : entries_(std::move(entries)), origin_shape_(std::move(origin_shape)) {
    if (entries_.rows() != entries_.cols()) throw InputError("DensityMatrix: matrix not square");
    if (entries_.rows() != origin_shape_.total())
      throw InputError("DensityMatrix: dimension does not match origin shape");
    const Real asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= density_tolerance<Real>())) throw InputError("DensityMatrix: not Hermitian");
    const Real tr = entries_.trace().real();
    if (!(std::abs(tr - Real(1)) <= density_tolerance<Real>()))
      throw InputError("DensityMatrix: trace " + describe_value(double(tr)) + " != 1");
  }

  Index dim() const { return entries_.rows(); }
  const ComplexMatrix<Real>& entries() const { return entries_; }
  const FactorShape& origin_shape() const { return origin_shape_; }

 private:
  ComplexMatrix<Real> entries_;
  FactorShape origin_shape_;
};

using PureState = BasicPureState<double>;
using DensityMatrix = BasicDensityMatrix<double>;

template <typename Real>
BasicPureState<Real> kron_state(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  ComplexVector<Real> amps = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return BasicPureState<Real>(concat(a.shape(), b.shape()), std::move(amps));
}

/// New factor j is old factor perm[j]; amplitudes are reindexed, never recomputed.
template <typename Real>
BasicPureState<Real> permute_factors(const BasicPureState<Real>& psi, std::span<const Index> perm) {
  check_permutation(perm, psi.factor_count());
  std::vector<Index> dims;
  for (Index p : perm) dims.push_back(psi.shape()[p]);
  return BasicPureState<Real>(FactorShape(std::move(dims)),
                              detail::permute_amplitudes(psi.amplitudes(), psi.shape(), perm));
}

template <typename Real>
BasicPureState<Real> permute_factors(const BasicPureState<Real>& psi, std::initializer_list<Index> perm) {
  return permute_factors(psi, std::span<const Index>(perm.begin(), perm.size()));
}

template <typename Real>
BasicPureState<Real> conjugate_state(const BasicPureState<Real>& psi) {
  return BasicPureState<Real>(psi.shape(), psi.amplitudes().conjugate());
}

/// ψ reshaped as a (dim left) x (dim right) matrix, `left` factors first in
/// ascending order, the remaining factors (ascending) as columns.
template <typename Real>
ComplexMatrix<Real> bipartite_matrix(const BasicPureState<Real>& psi, std::span<const Index> left) {
  const auto rows_sel = normalized_subset(left, psi.factor_count());
  const auto cols_sel = complement(rows_sel, psi.factor_count());
  std::vector<Index> perm(rows_sel);
  perm.insert(perm.end(), cols_sel.begin(), cols_sel.end());
  const Index rows = psi.shape().select(rows_sel).total();
  const Index cols = psi.dimension() / rows;
  const ComplexVector<Real> flat = detail::permute_amplitudes(psi.amplitudes(), psi.shape(), perm);
  return Eigen::Map<const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, cols);
}

/// tr_{complement}(|ψ><ψ|) on the kept factors in their original relative order.
template <typename Real>
BasicDensityMatrix<Real> partial_trace(const BasicPureState<Real>& psi, std::span<const Index> keep) {
  const auto kept = normalized_subset(keep, psi.factor_count());
  const ComplexMatrix<Real> m = bipartite_matrix(psi, kept);
  ComplexMatrix<Real> rho = m * m.adjoint();
  rho = (Real(0.5) * (rho + rho.adjoint())).eval();
  return BasicDensityMatrix<Real>(psi.shape().select(kept), std::move(rho));
}

template <typename Real>
BasicDensityMatrix<Real> partial_trace(const BasicPureState<Real>& psi, std::initializer_list<Index> keep) {
  return partial_trace(psi, std::span<const Index>(keep.begin(), keep.size()));
}

/// Reference partial trace: explicit sum over every (row, column, traced)
/// multi-index triple. Slow; meant as a test oracle.
template <typename Real>
BasicDensityMatrix<Real> partial_trace_naive(const BasicPureState<Real>& psi, std::span<const Index> keep) {
  const Index n = psi.factor_count();
  const auto kept = normalized_subset(keep, n);
  const auto traced = complement(kept, n);
  const FactorShape kept_shape = psi.shape().select(kept);
  const Index traced_total = psi.dimension() / kept_shape.total();
  const FactorShape traced_shape = traced.empty() ? FactorShape{1} : psi.shape().select(traced);

  auto full_index = [&](const std::vector<Index>& a, const std::vector<Index>& c) {
    std::vector<Index> multi(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < kept.size(); ++j) multi[static_cast<std::size_t>(kept[j])] = a[j];
    for (std::size_t j = 0; j < traced.size(); ++j) multi[static_cast<std::size_t>(traced[j])] = c[j];
    return flatten_index(multi, psi.shape());
  };

  const Index dk = kept_shape.total();
  ComplexMatrix<Real> rho = ComplexMatrix<Real>::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r) {
    const auto a = unflatten_index(r, kept_shape);
    for (Index s = 0; s < dk; ++s) {
      const auto b = unflatten_index(s, kept_shape);
      std::complex<Real> acc{0, 0};
      for (Index t = 0; t < traced_total; ++t) {
        std::vector<Index> c;
        if (!traced.empty()) c = unflatten_index(t, traced_shape);
        acc += psi[full_index(a, c)] * std::conj(psi[full_index(b, c)]);
      }
      rho(r, s) = acc;
    }
  }
  return BasicDensityMatrix<Real>(kept_shape, std::move(rho));
}

template <typename Real>
BasicDensityMatrix<Real> partial_trace_naive(const BasicPureState<Real>& psi, std::initializer_list<Index> keep) {
  return partial_trace_naive(psi, std::span<const Index>(keep.begin(), keep.size()));
}

}  // namespace entgap
