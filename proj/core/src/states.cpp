#include "nlact/states.hpp"

#include <cmath>
#include <string>

#include "nlact/errors.hpp"

namespace nlact::states {

using qcore::ComplexMatrix;
using qcore::ComplexVector;
using qcore::DensityMatrix;
using qcore::PureState;

PureState max_entangled(int d) {
  if (d < 2) {
    throw ArgumentError("max_entangled: d must be at least 2, got " +
                        std::to_string(d));
  }
  ComplexVector v = ComplexVector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    v(i * d + i) = amp;
  }
  return PureState({d, d}, std::move(v));
}

DensityMatrix isotropic(double p, int d) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("isotropic: p must lie in [0, 1]");
  }
  const PureState psi = max_entangled(d);
  const int n = d * d;
  ComplexMatrix m = p * psi.projector() +
                    (1.0 - p) / n * ComplexMatrix::Identity(n, n);
  return DensityMatrix({d, d}, std::move(m));
}

DensityMatrix erased(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw ArgumentError("erased: k must be a finite real >= 1");
  }
  // Basis index a * 3 + b for |a>_A |b>_B.
  ComplexVector psi = ComplexVector::Zero(6);
  psi(0) = psi(4) = 1.0 / std::sqrt(2.0);
  ComplexMatrix m = (1.0 / k) * psi * psi.adjoint();
  const double erased_weight = (1.0 - 1.0 / k) / 2.0;
  m(2, 2) += erased_weight;  // |0>|2>
  m(5, 5) += erased_weight;  // |1>|2>
  return DensityMatrix({2, 3}, std::move(m));
}

DensityMatrix random_mixed_hs(const qcore::Dims& dims, RngSeed seed) {
  const auto n = static_cast<Eigen::Index>(qcore::total_dim(dims));
  if (n < 2) {
    throw ArgumentError("random_mixed_hs: total dimension must be at least 2");
  }
  PhiloxEngine rng(seed);
  ComplexMatrix g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      g(r, c) = rng.complex_normal();
    }
  }
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix::sanitized(dims, std::move(m));
}

PureState random_pure_fs(const qcore::Dims& dims, RngSeed seed) {
  const auto n = static_cast<Eigen::Index>(qcore::total_dim(dims));
  if (n < 2) {
    throw ArgumentError("random_pure_fs: total dimension must be at least 2");
  }
  PhiloxEngine rng(seed);
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = rng.complex_normal();
  }
  return PureState::normalized(dims, std::move(v));
}

}  // namespace nlact::states
