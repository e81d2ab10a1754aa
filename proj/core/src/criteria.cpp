#include "nlact/criteria.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "nlact/errors.hpp"

namespace nlact::criteria {

using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

void require_two_qubits(const DensityMatrix& rho) {
  if (rho.dims() != qcore::Dims{2, 2}) {
    throw ArgumentError("criterion requires a two-qubit state with dims [2, 2]");
  }
}

ComplexMatrix bloch_observable(const Eigen::Vector3d& n) {
  return n(0) * qcore::pauli(1) + n(1) * qcore::pauli(2) + n(2) * qcore::pauli(3);
}

void require_unit(const Eigen::Vector3d& n) {
  if (std::abs(n.norm() - 1.0) > 1e-10) {
    throw ArgumentError("CHSH setting is not a unit vector");
  }
}

}  // namespace

CorrelationMatrix correlation_matrix(const DensityMatrix& rho) {
  require_two_qubits(rho);
  // Tr[ρ (σ_i ⊗ σ_j)] = Σ_{rc} ρ_{cr} (σ_i ⊗ σ_j)_{rc}
  CorrelationMatrix out{Eigen::Matrix3d::Zero()};
  const ComplexMatrix& m = rho.matrix();
  for (int i = 0; i < 3; ++i) {
    const ComplexMatrix si = qcore::pauli(i + 1);
    for (int j = 0; j < 3; ++j) {
      const ComplexMatrix sj = qcore::pauli(j + 1);
      qcore::Complex acc{0.0, 0.0};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          acc += m(c, r) * si(r / 2, c / 2) * sj(r % 2, c % 2);
        }
      }
      out.t(i, j) = acc.real();
    }
  }
  return out;
}

double horodecki_m(const CorrelationMatrix& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.t.transpose() * t.t,
                                                        Eigen::EigenvaluesOnly);
  const Eigen::Vector3d& ev = solver.eigenvalues();  // ascending
  return std::max(0.0, ev(1) + ev(2));
}

double horodecki_m(const DensityMatrix& rho) {
  return horodecki_m(correlation_matrix(rho));
}

double chsh_value(const DensityMatrix& rho, const ChshSettings& s) {
  require_two_qubits(rho);
  for (const auto* n : {&s.a, &s.a_prime, &s.b, &s.b_prime}) {
    require_unit(*n);
  }
  const ComplexMatrix a = bloch_observable(s.a);
  const ComplexMatrix ap = bloch_observable(s.a_prime);
  const ComplexMatrix b = bloch_observable(s.b);
  const ComplexMatrix bp = bloch_observable(s.b_prime);
  const auto correlator = [&rho](const ComplexMatrix& x, const ComplexMatrix& y) {
    const ComplexMatrix xy = Eigen::kroneckerProduct(x, y);
    return (rho.matrix() * xy).trace().real();
  };
  return correlator(a, b) + correlator(a, bp) + correlator(ap, b) -
         correlator(ap, bp);
}

HashingResult hashing_criterion(const DensityMatrix& rho, std::vector<int> part_a) {
  const int n = static_cast<int>(rho.num_subsystems());
  if (part_a.empty()) {
    throw ArgumentError("hashing_criterion: cut has an empty side");
  }
  std::sort(part_a.begin(), part_a.end());
  if (std::adjacent_find(part_a.begin(), part_a.end()) != part_a.end() ||
      part_a.front() < 0 || part_a.back() >= n) {
    throw ArgumentError("hashing_criterion: invalid subsystem in cut");
  }
  std::vector<int> part_b;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(part_a.begin(), part_a.end(), i)) part_b.push_back(i);
  }
  if (part_b.empty()) {
    throw ArgumentError("hashing_criterion: cut has an empty side");
  }
  HashingResult r;
  r.s_a = qcore::von_neumann_entropy(qcore::partial_trace(rho, part_a));
  r.s_b = qcore::von_neumann_entropy(qcore::partial_trace(rho, part_b));
  r.s_ab = qcore::von_neumann_entropy(rho);
  r.distillable = r.margin() > kTieTolerance;
  return r;
}

Classification classify(const DensityMatrix& rho) {
  require_two_qubits(rho);
  Classification c;
  c.m_value = horodecki_m(rho);
  c.chsh_max = 2.0 * std::sqrt(c.m_value);
  const HashingResult h = hashing_criterion(rho, {0});
  c.s_a = h.s_a;
  c.s_b = h.s_b;
  c.s_ab = h.s_ab;
  c.violates_chsh = c.m_value > 1.0 + kTieTolerance;
  c.hashing_distillable = h.distillable;
  c.nonlocal_resource = !c.violates_chsh && c.hashing_distillable;
  return c;
}

}  // namespace nlact::criteria
