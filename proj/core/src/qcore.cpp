#include "nlact/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "nlact/errors.hpp"

namespace nlact::qcore {
namespace {

std::vector<Eigen::Index> strides_of(std::span<const int> dims) {
  std::vector<Eigen::Index> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * dims[i];
  }
  return strides;
}

// Flat offsets of every joint index over `subset`, enumerated mixed-radix
// with subset[0] most significant.
std::vector<Eigen::Index> subset_offsets(std::span<const int> dims,
                                         std::span<const Eigen::Index> strides,
                                         std::span<const int> subset) {
  std::vector<Eigen::Index> offsets{0};
  for (int s : subset) {
    std::vector<Eigen::Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[s]));
    for (Eigen::Index base : offsets) {
      for (int digit = 0; digit < dims[s]; ++digit) {
        next.push_back(base + digit * strides[s]);
      }
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<int> complement(std::size_t n, std::span<const int> subset) {
  std::vector<int> rest;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
      rest.push_back(i);
    }
  }
  return rest;
}

void check_targets(std::span<const int> targets, std::size_t n) {
  if (targets.empty()) {
    throw ArgumentError("target subsystem list is empty");
  }
  std::vector<int> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("duplicate target subsystem");
  }
  if (sorted.front() < 0 || sorted.back() >= static_cast<int>(n)) {
    throw ArgumentError("target subsystem index out of range");
  }
}

double hermitian_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_square_matches(const ComplexMatrix& m, std::span<const int> dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << " but dims give " << d;
    throw ArgumentError(os.str());
  }
}

}  // namespace

std::size_t total_dim(std::span<const int> dims) {
  if (dims.empty()) {
    throw ArgumentError("dims must be nonempty");
  }
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) {
      throw ArgumentError("subsystem dimensions must be positive");
    }
    total *= static_cast<std::size_t>(d);
    if (total > kMaxTotalDim) {
      throw SizeError("total dimension exceeds " + std::to_string(kMaxTotalDim));
    }
  }
  return total;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(Dims dims, ComplexVector amplitudes)
    : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != total_dim(dims_)) {
    throw ArgumentError("amplitude count does not match dims");
  }
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > tol::kNorm) {
    throw ValidationError("pure state is not normalized (norm² = " +
                          std::to_string(n2) + ")");
  }
}

PureState PureState::normalized(Dims dims, ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) {
    throw ValidationError("cannot normalize the zero vector");
  }
  amplitudes /= n;
  return PureState(std::move(dims), std::move(amplitudes));
}

PureState PureState::basis(Dims dims, std::size_t index) {
  const auto d = total_dim(dims);
  if (index >= d) {
    throw ArgumentError("basis index out of range");
  }
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(dims), std::move(v));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Dims dims, ComplexMatrix matrix)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
  check_square_matches(matrix_, dims_);
  const double herm = hermitian_defect(matrix_);
  if (herm > tol::kHermitian) {
    throw ValidationError("density matrix is not Hermitian (defect " +
                          std::to_string(herm) + ")");
  }
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw ValidationError("density matrix trace is " + std::to_string(tr));
  }
  const ComplexMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -tol::kPsd) {
    throw ValidationError("density matrix has eigenvalue " +
                          std::to_string(min_eig));
  }
}

DensityMatrix DensityMatrix::sanitized(Dims dims, ComplexMatrix matrix) {
  check_square_matches(matrix, dims);
  ComplexMatrix h = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> values_only(h, Eigen::EigenvaluesOnly);
  const double min_eig = values_only.eigenvalues().minCoeff();
  if (min_eig < -tol::kPsd) {
    throw ValidationError("state has eigenvalue " + std::to_string(min_eig) +
                          " below the clipping tolerance");
  }
  if (min_eig < 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    const RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
    h = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint();
    h /= h.trace().real();
    h = 0.5 * (h + h.adjoint()).eval();
  }
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw ValidationError("density matrix trace is " + std::to_string(tr));
  }
  return DensityMatrix(Trusted{}, std::move(dims), std::move(h));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(Trusted{}, psi.dims(), psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(Trusted{}, std::move(dims), std::move(m));
}

// ---------------------------------------------------------------------------
// Spectra

EigenSystem eigh(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ValidationError("eigh requires a square matrix");
  }
  const double herm = hermitian_defect(m);
  if (herm > tol::kHermitian) {
    throw ValidationError("matrix is not Hermitian (defect " +
                          std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw ValidationError("Hermitian eigensolver did not converge");
  }
  const Eigen::Index n = m.rows();
  EigenSystem out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  return out;
}

RealVector eigvalsh(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ValidationError("eigvalsh requires a square matrix");
  }
  const double herm = hermitian_defect(m);
  if (herm > tol::kHermitian) {
    throw ValidationError("matrix is not Hermitian (defect " +
                          std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

double shannon_entropy(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p > tol::kEntropyCutoff) {
      s -= p * std::log2(p);
    }
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector values = eigvalsh(rho.matrix());
  return std::max(0.0, shannon_entropy({values.data(),
                                        static_cast<std::size_t>(values.size())}));
}

// ---------------------------------------------------------------------------
// Composition and reduction

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  total_dim(dims);
  // Kronecker products of Hermitian PSD unit-trace factors keep all three
  // properties; the spectrum is the set of pairwise products.
  ComplexMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return DensityMatrix(DensityMatrix::Trusted{}, std::move(dims), std::move(m));
}

PureState tensor(const PureState& a, const PureState& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  total_dim(dims);
  ComplexVector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return PureState::normalized(std::move(dims), std::move(v));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  if (keep.empty()) {
    throw ArgumentError("partial_trace: keep set is empty");
  }
  check_targets(keep, rho.num_subsystems());
  std::sort(keep.begin(), keep.end());

  const Dims& dims = rho.dims();
  const auto strides = strides_of(dims);
  const auto traced = complement(dims.size(), keep);
  const auto kept_off = subset_offsets(dims, strides, keep);
  const auto traced_off = subset_offsets(dims, strides, traced);

  const ComplexMatrix& m = rho.matrix();
  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index t : traced_off) {
        acc += m(kept_off[r] + t, kept_off[c] + t);
      }
      out(r, c) = acc;
    }
  }

  Dims kept_dims;
  for (int k : keep) kept_dims.push_back(dims[k]);
  return DensityMatrix::sanitized(std::move(kept_dims), std::move(out));
}

DensityMatrix permute(const DensityMatrix& rho, std::span<const int> order) {
  const Dims& dims = rho.dims();
  if (order.size() != dims.size()) {
    throw ArgumentError("permute: order must list every subsystem once");
  }
  check_targets(order, dims.size());
  // Offsets of the new basis enumerated in the old layout.
  const auto old_strides = strides_of(dims);
  const auto map = subset_offsets(dims, old_strides, order);
  const auto n = static_cast<Eigen::Index>(map.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, c) = rho.matrix()(map[r], map[c]);
    }
  }
  Dims new_dims;
  for (int o : order) new_dims.push_back(dims[o]);
  return DensityMatrix(DensityMatrix::Trusted{}, std::move(new_dims), std::move(out));
}

ComplexMatrix apply_left(const ComplexMatrix& op, std::span<const int> targets,
                         std::span<const int> dims, const ComplexMatrix& m,
                         std::span<const int> out_dims) {
  check_targets(targets, dims.size());
  Dims dims_out(dims.begin(), dims.end());
  if (!out_dims.empty()) {
    if (out_dims.size() != targets.size()) {
      throw ArgumentError("apply_left: out_dims must match targets");
    }
    for (std::size_t j = 0; j < targets.size(); ++j) {
      dims_out[targets[j]] = out_dims[j];
    }
  }
  const auto d_in = static_cast<Eigen::Index>(total_dim(dims));
  const auto d_out = static_cast<Eigen::Index>(total_dim(dims_out));
  if (m.rows() != d_in) {
    throw ArgumentError("apply_left: operand row count does not match dims");
  }

  const auto strides_in = strides_of(dims);
  const auto strides_out = strides_of(dims_out);
  const auto env = complement(dims.size(), targets);
  const auto env_in = subset_offsets(dims, strides_in, env);
  const auto env_out = subset_offsets(dims_out, strides_out, env);
  const auto tgt_in = subset_offsets(dims, strides_in, targets);
  const auto tgt_out = subset_offsets(dims_out, strides_out, targets);
  if (op.rows() != static_cast<Eigen::Index>(tgt_out.size()) ||
      op.cols() != static_cast<Eigen::Index>(tgt_in.size())) {
    throw ArgumentError("apply_left: operator shape does not match targets");
  }

  ComplexMatrix out = ComplexMatrix::Zero(d_out, m.cols());
  for (std::size_t e = 0; e < env_in.size(); ++e) {
    for (Eigen::Index o = 0; o < op.rows(); ++o) {
      auto row = out.row(env_out[e] + tgt_out[o]);
      for (Eigen::Index i = 0; i < op.cols(); ++i) {
        const Complex w = op(o, i);
        if (w != Complex{0.0, 0.0}) {
          row += w * m.row(env_in[e] + tgt_in[i]);
        }
      }
    }
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, std::span<const int> targets,
                    std::span<const int> dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return apply_left(op, targets, dims, ComplexMatrix::Identity(d, d));
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& observable,
                   std::span<const int> targets) {
  return apply_left(observable, targets, rho.dims(), rho.matrix()).trace().real();
}

Conditioned project_and_condition(const DensityMatrix& rho,
                                  const ComplexMatrix& projector,
                                  std::span<const int> targets) {
  if (projector.rows() != projector.cols()) {
    throw ValidationError("projector must be square");
  }
  if (hermitian_defect(projector) > tol::kProjector ||
      max_abs(projector * projector - projector) > tol::kProjector) {
    throw ValidationError("operator is not a Hermitian idempotent");
  }
  const ComplexMatrix left = apply_left(projector, targets, rho.dims(), rho.matrix());
  const ComplexMatrix both =
      apply_left(projector, targets, rho.dims(), left.adjoint());
  const double probability = std::clamp(both.trace().real(), 0.0, 1.0);
  if (probability < tol::kZeroProbability) {
    return {probability, std::nullopt};
  }
  return {probability, DensityMatrix::sanitized(rho.dims(), both / probability)};
}

Conditioned condition_and_reduce(const DensityMatrix& rho, const ComplexMatrix& projector,
                                 std::span<const int> targets, std::vector<int> keep) {
  if (projector.rows() != projector.cols()) {
    throw ValidationError("projector must be square");
  }
  if (hermitian_defect(projector) > tol::kProjector ||
      max_abs(projector * projector - projector) > tol::kProjector) {
    throw ValidationError("operator is not a Hermitian idempotent");
  }
  if (keep.empty()) {
    throw ArgumentError("condition_and_reduce: keep set is empty");
  }
  check_targets(keep, rho.num_subsystems());
  for (int k : keep) {
    if (std::find(targets.begin(), targets.end(), k) != targets.end()) {
      throw ArgumentError("condition_and_reduce: kept subsystems must not be measured");
    }
  }
  std::sort(keep.begin(), keep.end());

  const Dims& dims = rho.dims();
  const ComplexMatrix left = apply_left(projector, targets, dims, rho.matrix());
  const double probability = std::clamp(left.trace().real(), 0.0, 1.0);
  if (probability < tol::kZeroProbability) {
    return {probability, std::nullopt};
  }

  const auto strides = strides_of(dims);
  const auto traced = complement(dims.size(), keep);
  const auto kept_off = subset_offsets(dims, strides, keep);
  const auto traced_off = subset_offsets(dims, strides, traced);
  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  ComplexMatrix reduced(dk, dk);
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index t : traced_off) {
        acc += left(kept_off[r] + t, kept_off[c] + t);
      }
      reduced(r, c) = acc / probability;
    }
  }
  Dims kept_dims;
  for (int k : keep) kept_dims.push_back(dims[k]);
  return {probability, DensityMatrix::sanitized(std::move(kept_dims), std::move(reduced))};
}

double fidelity_pure(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dims() != psi.dims()) {
    throw ArgumentError("fidelity_pure: dims mismatch");
  }
  const ComplexVector& v = psi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

// ---------------------------------------------------------------------------
// Standard operators

ComplexMatrix pauli(int i) {
  const Complex I{0.0, 1.0};
  ComplexMatrix s(2, 2);
  switch (i) {
    case 0: s << 1.0, 0.0, 0.0, 1.0; break;
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -I, I, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: throw ArgumentError("pauli index must be 0..3");
  }
  return s;
}

ComplexMatrix weyl(int a, int b, int d) {
  if (d < 2) {
    throw ArgumentError("weyl: d must be at least 2");
  }
  a = ((a % d) + d) % d;
  b = ((b % d) + d) % d;
  ComplexMatrix w = ComplexMatrix::Zero(d, d);
  // X^a Z^b |j> = ω^{bj} |j + a>
  for (int j = 0; j < d; ++j) {
    const double phase = 2.0 * std::numbers::pi * b * j / d;
    w((j + a) % d, j) = std::polar(1.0, phase);
  }
  if (d == 2) {
    // Exact ±1 instead of cos(π) rounding.
    w = w.real().array().round().cast<Complex>().matrix();
  }
  return w;
}

}  // namespace nlact::qcore
