#pragma once

// Both sides of the four-party entropy inequality
//
//   S(tr_{24} |Ψ><Ψ|)  >=  Σ_α λ_α [ S(tr_2 |Φ^{12}_α><Φ^{12}_α|) + S(tr_4 |Φ^{34}_α><Φ^{34}_α|) ]
//
// for Ψ in H_1 (x) H_2 (x) H_3 (x) H_4 with Alice holding factors 1,3 and Bob
// holding 2,4, and the Schmidt decomposition taken across 12|34. In code the
// factors are 0-based: Alice = {0, 2}, additivity split = {0, 1} | {2, 3}.
//
// gap = lhs - rhs; a negative gap certifies that the inequality fails for
// that particular decomposition.

#include <cstdint>
#include <string>
#include <vector>

#include "entgap/schmidt.hpp"
#include "entgap/spectra.hpp"

namespace entgap {

inline const std::vector<Index>& alice_factors() {
  static const std::vector<Index> k{0, 2};
  return k;
}

inline BipartiteSplit additivity_split() { return BipartiteSplit({0, 1}, {2, 3}, 4); }

/// A pure state on exactly four tensor factors.
class FourFactorState {
 public:
  explicit FourFactorState(PureState state) : state_(std::move(state)) {
    if (state_.factor_count() != 4)
      throw InputError("FourFactorState: expected 4 factors, got " + std::to_string(state_.factor_count()));
  }
  const PureState& state() const { return state_; }
  const FactorShape& shape() const { return state_.shape(); }

 private:
  PureState state_;
};

enum class DecompositionSource { svd, product, entangled, deformed, rotated, custom };

const char* to_string(DecompositionSource source);

struct GapReport {
  double lhs = 0;
  double rhs = 0;
  double gap = 0;
  LogBase log_base = LogBase::natural;
  DecompositionSource decomposition_source = DecompositionSource::custom;
  std::string state_descriptor;
};

/// Residual above which bn_gap rejects a decomposition.
inline constexpr double kGapResidualTolerance = 1e-8;

double bn_lhs(const FourFactorState& s, LogBase base = LogBase::natural);

/// Requires dec.split == additivity_split().
double bn_rhs(const SchmidtDecomposition& dec, LogBase base = LogBase::natural);

GapReport bn_gap(const FourFactorState& s, const SchmidtDecomposition& dec, LogBase base = LogBase::natural,
                 DecompositionSource source = DecompositionSource::custom, std::string descriptor = {},
                 double residual_tol = kGapResidualTolerance);

/// (1/d) Σ_{i,k} e_i (x) e_k (x) e_i (x) e_k: a maximally entangled pair
/// 1-3 times a maximally entangled pair 2-4.
FourFactorState canonical_counterexample(Index d);

/// Clock-and-shift basis of C^d (x) C^d, ordered by α = m*d + n:
/// Φ_(m,n) = d^{-1/2} Σ_j ω^{jm} e_j (x) e_{(j+n) mod d}, ω = exp(2πi/d).
std::vector<PureState> bell_basis(Index d);

/// The canonical counterexample decomposed along e_i (x) e_k.
SchmidtDecomposition product_decomposition(Index d);

/// The canonical counterexample decomposed as (1/d) Σ_α Φ_α (x) conj(Φ_α)
/// over bell_basis(d).
SchmidtDecomposition entangled_decomposition(Index d);

struct DeformedCounterexample {
  FourFactorState state;
  SchmidtDecomposition decomposition;  // the designated one, coefficients descending
};

/// Σ_α sqrt(λ_α) Φ_α (x) conj(Φ_α) with the flat spectrum tilted linearly:
/// λ_α = (1 + ε t_α) / D, t_α = (2α - D + 1) / D, D = d².
DeformedCounterexample deformed_counterexample(Index d, double eps);

struct MaximizeOptions {
  int restarts = 20;
  int sweeps = 50;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::natural;
  double block_tol = kBlockTolerance;
  double residual_tol = kGapResidualTolerance;
};

struct MaximizeResult {
  SchmidtDecomposition best;
  GapReport report;
  double initial_rhs = 0;
  std::vector<std::vector<Index>> blocks;
  int restarts_used = 0;
  int sweeps_used = 0;
  long evaluations = 0;  // single-index objective terms evaluated
};

/// Searches the unitary freedom inside degenerate Schmidt blocks for the
/// decomposition with the largest rhs. Never returns less than the starting
/// SVD decomposition's rhs.
MaximizeResult maximize_rhs(const FourFactorState& s, const MaximizeOptions& options = {},
                            std::string descriptor = {});

}  // namespace entgap
