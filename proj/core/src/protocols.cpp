#include "nlact/protocols.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "nlact/criteria.hpp"
#include "nlact/errors.hpp"
#include "nlact/states.hpp"

namespace nlact::protocols {

using qcore::ComplexMatrix;
using qcore::ComplexVector;
using qcore::DensityMatrix;
using qcore::PureState;

namespace {

constexpr double kPovmTolerance = 1e-10;

int check_bell_index(BellIndex idx, int d) {
  if (idx.a < 0 || idx.a >= d || idx.b < 0 || idx.b >= d) {
    throw ArgumentError("Bell outcome index out of range for d = " + std::to_string(d));
  }
  return idx.a * d + idx.b;
}

// Qubit Bell vector (I ⊗ X^a Z^b)|Ψ+> placed on the {0,1} levels of two qutrits.
ComplexVector qutrit_embedded_bell(int bell_outcome) {
  const PureState bell = bell_state(2, {bell_outcome / 2, bell_outcome % 2});
  ComplexVector v = ComplexVector::Zero(9);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      v(i * 3 + j) = bell.amplitudes()(i * 2 + j);
    }
  }
  return v;
}

ComplexMatrix filter_projector(int outcome) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  if (outcome == 0) {
    m(0, 0) = m(1, 1) = 1.0;
  } else {
    m(2, 2) = 1.0;
  }
  return m;
}

DensityMatrix erased_pair(double k) {
  const DensityMatrix ab = states::erased(k);
  const int swap[] = {1, 0};
  return qcore::tensor(ab, qcore::permute(ab, swap));  // dims [A, B1, B2, C]
}

double born(const DensityMatrix& rho, const ComplexMatrix& a, const ComplexMatrix& c) {
  const ComplexMatrix ac = Eigen::kroneckerProduct(a, c);
  return (rho.matrix() * ac).trace().real();
}

}  // namespace

PureState bell_state(int d, BellIndex index) {
  check_bell_index(index, d);
  const PureState psi = states::max_entangled(d);
  const int targets[] = {1};
  const int dims[] = {d, d};
  ComplexVector v = qcore::apply_left(qcore::weyl(index.a, index.b, d), targets, dims,
                                      psi.amplitudes());
  return PureState::normalized({d, d}, std::move(v));
}

ProtocolOutcome double_teleport(const PureState& phi, double p,
                                std::pair<BellIndex, BellIndex> outcome,
                                TeleportOptions options) {
  if (phi.dims().size() != 2 || phi.dims()[0] != phi.dims()[1]) {
    throw ArgumentError("double_teleport: phi must live on dims [d, d]");
  }
  const int d = phi.dims()[0];
  if (d < 2 || d > kMaxTeleportDim) {
    throw SizeError("double_teleport: d must lie in [2, " +
                    std::to_string(kMaxTeleportDim) + "]");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("double_teleport: p must lie in [0, 1]");
  }
  const auto [first, second] = outcome;
  check_bell_index(first, d);
  check_bell_index(second, d);

  // Subsystems: 0 A, 1 B1, 2 F1, 3 F2, 4 B2, 5 C.
  const DensityMatrix iso = states::isotropic(p, d);
  const DensityMatrix full =
      qcore::tensor(iso, qcore::tensor(DensityMatrix::from_pure(phi), iso));

  const ComplexMatrix proj1 = bell_state(d, first).projector();   // on (F1, B1)
  const ComplexMatrix proj2 = bell_state(d, second).projector();  // on (F2, B2)
  const ComplexMatrix joint = Eigen::kroneckerProduct(proj1, proj2);
  const int targets[] = {2, 1, 3, 4};
  qcore::Conditioned cond = qcore::condition_and_reduce(full, joint, targets, {0, 5});

  ProtocolOutcome out;
  out.success_probability = cond.probability;
  out.stage_probabilities = {cond.probability};
  out.outcome_labels = {first.a, first.b, second.a, second.b};
  if (!cond.state) {
    return out;
  }
  DensityMatrix ac = std::move(*cond.state);
  if (options.apply_correction) {
    // Outcome (a, b) leaves conj(X^a Z^b) applied to the teleported half.
    const ComplexMatrix u = Eigen::kroneckerProduct(
        qcore::weyl(first.a, first.b, d).conjugate(),
        qcore::weyl(second.a, second.b, d).conjugate());
    ac = DensityMatrix::sanitized(ac.dims(), u.adjoint() * ac.matrix() * u);
  }
  out.conditional_state = std::move(ac);
  return out;
}

DensityMatrix teleport_mixture(const PureState& phi, double p) {
  if (phi.dims().size() != 2 || phi.dims()[0] != phi.dims()[1]) {
    throw ArgumentError("teleport_mixture: phi must live on dims [d, d]");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("teleport_mixture: p must lie in [0, 1]");
  }
  const int d = phi.dims()[0];
  const DensityMatrix rho_phi = DensityMatrix::from_pure(phi);
  const ComplexMatrix sigma_a = qcore::partial_trace(rho_phi, {0}).matrix();
  const ComplexMatrix sigma_c = qcore::partial_trace(rho_phi, {1}).matrix();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  const ComplexMatrix sa_i = Eigen::kroneckerProduct(sigma_a, id);
  const ComplexMatrix i_sc = Eigen::kroneckerProduct(id, sigma_c);
  const ComplexMatrix i_i = Eigen::kroneckerProduct(id, id);
  ComplexMatrix m = p * p * rho_phi.matrix() + p * (1.0 - p) * sa_i +
                    p * (1.0 - p) * i_sc + (1.0 - p) * (1.0 - p) * i_i;
  return DensityMatrix::sanitized(phi.dims(), std::move(m));
}

void validate_povm(const Povm& povm, int d) {
  if (povm.empty()) {
    throw ValidationError("POVM has no elements");
  }
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& e : povm) {
    if (e.rows() != d || e.cols() != d) {
      throw ValidationError("POVM element has the wrong dimension");
    }
    // eigvalsh also rejects non-Hermitian elements.
    if (qcore::eigvalsh(e).minCoeff() < -kPovmTolerance) {
      throw ValidationError("POVM element is not positive semidefinite");
    }
    sum += e;
  }
  if (qcore::max_abs(sum - ComplexMatrix::Identity(d, d)) > kPovmTolerance) {
    throw ValidationError("POVM elements do not sum to the identity");
  }
}

Povm qubit_measurement(const Eigen::Vector3d& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-10) {
    throw ArgumentError("measurement direction must be a unit vector");
  }
  const ComplexMatrix n = direction(0) * qcore::pauli(1) +
                          direction(1) * qcore::pauli(2) +
                          direction(2) * qcore::pauli(3);
  const ComplexMatrix id = qcore::pauli(0);
  return {0.5 * (id + n), 0.5 * (id - n)};
}

TeleportDistribution teleport_distribution(const PureState& phi, double p,
                                           const Povm& alice, const Povm& charlie) {
  const int d = phi.dims().empty() ? 0 : phi.dims()[0];
  validate_povm(alice, d);
  validate_povm(charlie, d);

  const ProtocolOutcome branch = double_teleport(phi, p, {{0, 0}, {0, 0}});
  const DensityMatrix& rho_f = *branch.conditional_state;
  const DensityMatrix rho_phi = DensityMatrix::from_pure(phi);
  const ComplexMatrix sigma_a = qcore::partial_trace(rho_phi, {0}).matrix();
  const ComplexMatrix sigma_c = qcore::partial_trace(rho_phi, {1}).matrix();

  const auto nx = static_cast<Eigen::Index>(alice.size());
  const auto nz = static_cast<Eigen::Index>(charlie.size());
  TeleportDistribution out;
  out.weight = p * p;
  out.joint.resize(nx, nz);
  out.p_phi.resize(nx, nz);
  out.p_loc = Eigen::MatrixXd::Zero(nx, nz);
  Eigen::MatrixXd expected_loc(nx, nz);
  for (Eigen::Index x = 0; x < nx; ++x) {
    const double pa_sigma = (sigma_a * alice[x]).trace().real();
    const double pa_flat = alice[x].trace().real() / d;
    for (Eigen::Index z = 0; z < nz; ++z) {
      const double pc_sigma = (sigma_c * charlie[z]).trace().real();
      const double pc_flat = charlie[z].trace().real() / d;
      out.joint(x, z) = born(rho_f, alice[x], charlie[z]);
      out.p_phi(x, z) = born(rho_phi, alice[x], charlie[z]);
      expected_loc(x, z) = p * (1.0 - p) * pa_sigma * pc_flat +
                           p * (1.0 - p) * pa_flat * pc_sigma +
                           (1.0 - p) * (1.0 - p) * pa_flat * pc_flat;
    }
  }
  if (out.weight < 1.0) {
    out.p_loc = (out.joint - out.weight * out.p_phi) / (1.0 - out.weight);
    expected_loc /= (1.0 - out.weight);
    out.residual = (out.p_loc - expected_loc).cwiseAbs().maxCoeff();
  } else {
    out.residual = (out.joint - out.p_phi).cwiseAbs().maxCoeff();
  }
  return out;
}

double correlator(const Eigen::MatrixXd& table) {
  if (table.rows() != 2 || table.cols() != 2) {
    throw ArgumentError("correlator needs a 2x2 outcome table");
  }
  return table(0, 0) + table(1, 1) - table(0, 1) - table(1, 0);
}

PureState erased_target_state(int bell_outcome) {
  if (bell_outcome < 0 || bell_outcome > 3) {
    throw ArgumentError("Bell outcome must lie in 0..3");
  }
  // Projecting (B1, B2) on (I ⊗ W)|Ψ+> leaves (A, C) in (I ⊗ conj W)|Ψ+>;
  // qubit Paulis X^a Z^b are real.
  return bell_state(2, {bell_outcome / 2, bell_outcome % 2});
}

ProtocolOutcome erased_protocol(double k, int bell_outcome) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw ArgumentError("erased_protocol: k must be a finite real >= 1");
  }
  if (bell_outcome < 0 || bell_outcome > 3) {
    throw ArgumentError("erased_protocol: Bell outcome must lie in 0..3");
  }
  const DensityMatrix pair = erased_pair(k);
  const int bob[] = {1, 2};

  const ComplexMatrix filter = Eigen::kroneckerProduct(filter_projector(0), filter_projector(0));
  const qcore::Conditioned filtered = qcore::project_and_condition(pair, filter, bob);

  ProtocolOutcome out;
  out.outcome_labels = {0, 0, bell_outcome};
  out.stage_probabilities = {filtered.probability};
  if (!filtered.state) {
    return out;
  }
  const ComplexVector bell = qutrit_embedded_bell(bell_outcome);
  const qcore::Conditioned measured =
      qcore::project_and_condition(*filtered.state, bell * bell.adjoint(), bob);
  out.stage_probabilities.push_back(measured.probability);
  out.success_probability = filtered.probability * measured.probability;
  if (measured.state) {
    out.conditional_state = qcore::partial_trace(*measured.state, {0, 3});
  }
  return out;
}

std::vector<ProtocolOutcome> erased_outcome_tree(double k) {
  std::vector<ProtocolOutcome> leaves;
  for (int bell = 0; bell < 4; ++bell) {
    leaves.push_back(erased_protocol(k, bell));
  }
  const DensityMatrix pair = erased_pair(k);
  const int bob[] = {1, 2};
  for (const auto& [m1, m2] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{1, 1}}) {
    const ComplexMatrix filter =
        Eigen::kroneckerProduct(filter_projector(m1), filter_projector(m2));
    const qcore::Conditioned c = qcore::project_and_condition(pair, filter, bob);
    ProtocolOutcome leaf;
    leaf.outcome_labels = {m1, m2, -1};
    leaf.stage_probabilities = {c.probability};
    leaf.success_probability = c.probability;
    if (c.state) {
      leaf.conditional_state = qcore::partial_trace(*c.state, {0, 3});
    }
    leaves.push_back(std::move(leaf));
  }
  return leaves;
}

DensityMatrix build_symmetric_extension(int k) {
  if (k < 2 || k > kMaxExtensionK) {
    throw SizeError("build_symmetric_extension: k must lie in [2, " +
                    std::to_string(kMaxExtensionK) + "]");
  }
  qcore::Dims dims{2};
  dims.insert(dims.end(), static_cast<std::size_t>(k), 3);
  const auto n = static_cast<Eigen::Index>(qcore::total_dim(dims));

  // Index of |a>_A ⊗ |b_1 ... b_k>_B with A most significant.
  const auto index_of = [k](int a, const std::vector<int>& bs) {
    Eigen::Index idx = a;
    for (int j = 0; j < k; ++j) idx = idx * 3 + bs[j];
    return idx;
  };

  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < k; ++i) {
    // Ψ+ on (A, B_i), flag level |2> on every other B_j.
    ComplexVector v = ComplexVector::Zero(n);
    for (int level = 0; level < 2; ++level) {
      std::vector<int> bs(static_cast<std::size_t>(k), 2);
      bs[i] = level;
      v(index_of(level, bs)) = 1.0 / std::sqrt(2.0);
    }
    m += v * v.adjoint() / static_cast<double>(k);
  }
  return DensityMatrix(std::move(dims), std::move(m));
}

bool verify_locality_observation(const DensityMatrix& rho, const ComplexMatrix& projector,
                                 std::span<const int> targets, std::vector<int> keep) {
  const qcore::Conditioned c = qcore::project_and_condition(rho, projector, targets);
  if (!c.state) {
    return false;
  }
  const DensityMatrix reduced = qcore::partial_trace(*c.state, std::move(keep));
  if (reduced.dims() != qcore::Dims{2, 2}) {
    throw UnsupportedCutError("conditional state is not a two-qubit state");
  }
  return criteria::horodecki_m(reduced) > 1.0 + criteria::kTieTolerance;
}

}  // namespace nlact::protocols
