#pragma once

// Hermitian eigenproblems, SVD and von Neumann entropy.

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "entgap/errors.hpp"
#include "entgap/tensor.hpp"

namespace entgap {

enum class LogBase { natural, two };

inline const char* to_string(LogBase base) { return base == LogBase::two ? "2" : "e"; }

/// Eigenvalues below -clip tolerance are treated as upstream errors.
inline constexpr double kEntropyClipTolerance = 1e-12;

template <typename Real>
struct Spectrum {
  RealVector<Real> values;  // descending
  Real tolerance{};
};

template <typename Real>
struct HermitianEigen {
  Spectrum<Real> spectrum;
  ComplexMatrix<Real> vectors;  // column k pairs with spectrum.values(k)
};

template <typename Real>
struct SingularValueDecomposition {
  ComplexMatrix<Real> u;
  RealVector<Real> sigma;  // descending, length min(rows, cols)
  ComplexMatrix<Real> v;
};

/// Eigendecomposition of a Hermitian matrix, values sorted descending.
template <typename Derived>
auto hermitian_eigen(const Eigen::MatrixBase<Derived>& m, typename Eigen::NumTraits<typename Derived::Scalar>::Real tol)
    -> HermitianEigen<typename Eigen::NumTraits<typename Derived::Scalar>::Real> {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const ComplexMatrix<Real> a = m.template cast<std::complex<Real>>();
  if (a.rows() != a.cols()) throw InputError("hermitian_eigen: matrix not square");
  if (a.size() > 0 && !((a - a.adjoint()).cwiseAbs().maxCoeff() <= tol))
    throw InputError("hermitian_eigen: matrix not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigen: eigensolver did not converge");

  // Eigen returns ascending order; reverse columns and values.
  HermitianEigen<Real> out;
  out.spectrum.values = solver.eigenvalues().reverse();
  out.spectrum.tolerance = tol;
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

template <typename Derived>
auto svd(const Eigen::MatrixBase<Derived>& m)
    -> SingularValueDecomposition<typename Eigen::NumTraits<typename Derived::Scalar>::Real> {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const ComplexMatrix<Real> a = m.template cast<std::complex<Real>>();
  Eigen::JacobiSVD<ComplexMatrix<Real>> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw NumericalError("svd: did not converge");
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// -Σ p log p over a probability spectrum with 0 log 0 = 0. Values in
/// [-clip_tol, 0) are clipped; anything lower throws NumericalError.
template <typename Derived>
auto spectrum_entropy(const Eigen::MatrixBase<Derived>& p, LogBase base = LogBase::natural,
                      double clip_tol = kEntropyClipTolerance) -> typename Derived::Scalar {
  using Real = typename Derived::Scalar;
  Real s{0};
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const Real v = p(k);
    if (v < -Real(clip_tol))
      throw NumericalError("entropy: eigenvalue " + describe_value(double(v)) + " below clip tolerance");
    if (v > Real(0)) s -= v * std::log(v);
  }
  if (base == LogBase::two) s /= std::log(Real(2));
  return s;
}

template <typename Real>
Real von_neumann_entropy(const BasicDensityMatrix<Real>& rho, LogBase base = LogBase::natural,
                         double clip_tol = kEntropyClipTolerance) {
  const auto eig = hermitian_eigen(rho.entries(), density_tolerance<Real>());
  return spectrum_entropy(eig.spectrum.values, base, clip_tol);
}

inline double log_in_base(double x, LogBase base) {
  return base == LogBase::two ? std::log2(x) : std::log(x);
}

}  // namespace entgap
