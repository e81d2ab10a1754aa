#pragma once

// Dense complex linear algebra for finite-dimensional quantum states.
//
// Subsystem ordering: a state on dims [d0, d1, ..., dn-1] is stored in the
// Kronecker basis, subsystem 0 being the leftmost tensor factor. A basis
// index is the mixed-radix number (i0 i1 ... in-1) with i0 most significant,
// so tensor(a, b) == kroneckerProduct(a.matrix(), b.matrix()) and
// |01> on dims [2,2] is basis index 1.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlact::qcore {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

// Largest total Hilbert-space dimension any state may have.
inline constexpr std::size_t kMaxTotalDim = 4096;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kNorm = 1e-12;
inline constexpr double kProjector = 1e-10;
inline constexpr double kZeroProbability = 1e-12;
inline constexpr double kEntropyCutoff = 1e-14;
}  // namespace tol

// Product of dims; throws SizeError above kMaxTotalDim and ArgumentError on
// empty or non-positive entries.
std::size_t total_dim(std::span<const int> dims);

class PureState {
 public:
  // Throws ValidationError unless |‖amplitudes‖² − 1| ≤ tol::kNorm.
  PureState(Dims dims, ComplexVector amplitudes);

  // Rescales a nonzero vector to unit norm.
  static PureState normalized(Dims dims, ComplexVector amplitudes);
  static PureState basis(Dims dims, std::size_t index);

  const Dims& dims() const noexcept { return dims_; }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Dims dims_;
  ComplexVector amplitudes_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity at the tolerances in
  // qcore::tol. Throws ValidationError on failure.
  DensityMatrix(Dims dims, ComplexMatrix matrix);

  // Re-Hermitizes, clips eigenvalues in [−tol::kPsd, 0) to zero and
  // renormalizes, then validates. Larger negativity is a ValidationError.
  static DensityMatrix sanitized(Dims dims, ComplexMatrix matrix);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Dims dims);

  const Dims& dims() const noexcept { return dims_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  std::size_t num_subsystems() const noexcept { return dims_.size(); }

 private:
  struct Trusted {};
  DensityMatrix(Trusted, Dims dims, ComplexMatrix matrix)
      : dims_(std::move(dims)), matrix_(std::move(matrix)) {}

  // Structure-preserving maps of valid states skip the spectral check.
  friend DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
  friend DensityMatrix permute(const DensityMatrix& rho, std::span<const int> order);

  Dims dims_;
  ComplexMatrix matrix_;
};

struct EigenSystem {
  RealVector values;      // descending
  ComplexMatrix vectors;  // column j belongs to values[j]
};

// Eigenvalues of a Hermitian matrix, descending. Throws ValidationError if
// max |m − m†| exceeds tol::kHermitian.
RealVector eigvalsh(const ComplexMatrix& m);
EigenSystem eigh(const ComplexMatrix& m);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureState tensor(const PureState& a, const PureState& b);

// Reduced state on the subsystems in `keep` (a set; order in the result
// follows the original subsystem order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);

// Reorders subsystems: subsystem j of the result is subsystem order[j] of rho.
DensityMatrix permute(const DensityMatrix& rho, std::span<const int> order);

// Von Neumann entropy in bits; eigenvalues below tol::kEntropyCutoff
// contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

// Shannon entropy in bits of a probability vector with the same cutoff.
double shannon_entropy(std::span<const double> probabilities);

// (I ⊗ op ⊗ I) m, where op acts on `targets` (in the order given; the first
// target is op's leftmost factor) of a system with `dims`. op may be
// rectangular: target j then maps dims[targets[j]] to out_dims[j]. An empty
// out_dims means op is square on the targets.
ComplexMatrix apply_left(const ComplexMatrix& op, std::span<const int> targets,
                         std::span<const int> dims, const ComplexMatrix& m,
                         std::span<const int> out_dims = {});

// Full-space operator I ⊗ op ⊗ I for a square op on `targets`.
ComplexMatrix embed(const ComplexMatrix& op, std::span<const int> targets,
                    std::span<const int> dims);

// Re Tr[ρ O] for O acting on `targets`.
double expectation(const DensityMatrix& rho, const ComplexMatrix& observable,
                   std::span<const int> targets);

struct Conditioned {
  double probability = 0.0;
  // Absent when probability < tol::kZeroProbability.
  std::optional<DensityMatrix> state;
};

// Outcome probability Tr[PρP] and normalized post-measurement state for a
// projector P acting on `targets`. Throws ValidationError if P is not a
// Hermitian idempotent within tol::kProjector.
Conditioned project_and_condition(const DensityMatrix& rho,
                                  const ComplexMatrix& projector,
                                  std::span<const int> targets);

// Same outcome, but returns only the reduced state on `keep`, which must be
// disjoint from `targets`. Uses Tr_rest[(P ⊗ I) ρ (P ⊗ I)] = Tr_rest[(P ⊗ I) ρ],
// so the full post-measurement state is never formed.
Conditioned condition_and_reduce(const DensityMatrix& rho, const ComplexMatrix& projector,
                                 std::span<const int> targets, std::vector<int> keep);

// <ψ|ρ|ψ>; ArgumentError on mismatched dims.
double fidelity_pure(const DensityMatrix& rho, const PureState& psi);

// Identity (i = 0) and the Pauli matrices σ1, σ2, σ3.
ComplexMatrix pauli(int i);

// Weyl (generalized Pauli) operator X^a Z^b on C^d with
// X|j> = |j+1 mod d>, Z|j> = ω^j |j>, ω = exp(2πi/d).
ComplexMatrix weyl(int a, int b, int d);

double max_abs(const ComplexMatrix& m);

}  // namespace nlact::qcore
