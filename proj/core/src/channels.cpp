#include "nlact/channels.hpp"

#include <cmath>
#include <string>

#include "nlact/errors.hpp"

namespace nlact::channels {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

constexpr double kCompleteness = 1e-10;

void require_unit_interval(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ArgumentError(std::string(what) + ": parameter must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::AD: return "AD";
    case ChannelLabel::PD: return "PD";
    case ChannelLabel::D: return "D";
    case ChannelLabel::depolarizing_d: return "depolarizing_d";
    case ChannelLabel::erasure: return "erasure";
    case ChannelLabel::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(DecoherenceKind kind) {
  switch (kind) {
    case DecoherenceKind::AD: return "AD";
    case DecoherenceKind::PD: return "PD";
    case DecoherenceKind::PD_verbatim: return "PD_verbatim";
    case DecoherenceKind::D: return "D";
  }
  return "unknown";
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops, ChannelLabel label,
                           std::optional<double> strength)
    : ops_(std::move(kraus_ops)), label_(label), strength_(strength) {
  if (ops_.empty()) {
    throw ArgumentError("channel needs at least one Kraus operator");
  }
  for (const auto& e : ops_) {
    if (e.rows() != ops_.front().rows() || e.cols() != ops_.front().cols()) {
      throw ArgumentError("Kraus operators must share one shape");
    }
  }
  const double defect = completeness_defect();
  if (defect > kCompleteness) {
    throw ValidationError("Kraus operators violate completeness by " +
                          std::to_string(defect));
  }
}

double KrausChannel::completeness_defect() const {
  const Eigen::Index n = ops_.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& e : ops_) sum += e.adjoint() * e;
  return qcore::max_abs(sum - ComplexMatrix::Identity(n, n));
}

KrausChannel make_ad(double t) {
  require_unit_interval(t, "make_ad");
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - t);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e1(0, 1) = std::sqrt(t);
  return KrausChannel({e0, e1}, ChannelLabel::AD, t);
}

KrausChannel make_pd(double t, PdMode mode) {
  require_unit_interval(t, "make_pd");
  const double keep = mode == PdMode::standard ? 1.0 - t / 2.0 : t;
  return KrausChannel({std::sqrt(keep) * qcore::pauli(0),
                       std::sqrt(1.0 - keep) * qcore::pauli(3)},
                      ChannelLabel::PD, t);
}

KrausChannel make_d(double t) {
  require_unit_interval(t, "make_d");
  std::vector<ComplexMatrix> ops{std::sqrt(1.0 - 3.0 * t / 4.0) * qcore::pauli(0)};
  for (int i = 1; i <= 3; ++i) {
    ops.push_back(std::sqrt(t / 4.0) * qcore::pauli(i));
  }
  return KrausChannel(std::move(ops), ChannelLabel::D, t);
}

KrausChannel make_depolarizing(double p, int d) {
  require_unit_interval(p, "make_depolarizing");
  if (d < 2) {
    throw ArgumentError("make_depolarizing: d must be at least 2");
  }
  // (1/d²) Σ_ab W_ab σ W_ab† = Tr(σ) I/d
  const double d2 = static_cast<double>(d) * d;
  std::vector<ComplexMatrix> ops;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double w = (a == 0 && b == 0) ? p + (1.0 - p) / d2 : (1.0 - p) / d2;
      ops.push_back(std::sqrt(w) * qcore::weyl(a, b, d));
    }
  }
  return KrausChannel(std::move(ops), ChannelLabel::depolarizing_d, p);
}

KrausChannel make_erasure(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw ArgumentError("make_erasure: k must be a finite real >= 1");
  }
  const double erase = 1.0 - 1.0 / k;
  ComplexMatrix keep = ComplexMatrix::Zero(3, 2);
  keep(0, 0) = keep(1, 1) = std::sqrt(1.0 / k);
  ComplexMatrix flag0 = ComplexMatrix::Zero(3, 2);
  flag0(2, 0) = std::sqrt(erase);
  ComplexMatrix flag1 = ComplexMatrix::Zero(3, 2);
  flag1(2, 1) = std::sqrt(erase);
  return KrausChannel({keep, flag0, flag1}, ChannelLabel::erasure, erase);
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho, int subsystem) {
  if (subsystem < 0 || subsystem >= static_cast<int>(rho.num_subsystems())) {
    throw ArgumentError("apply: subsystem index out of range");
  }
  if (ch.dim_in() != rho.dims()[subsystem]) {
    throw ArgumentError("apply: channel input dimension " +
                        std::to_string(ch.dim_in()) + " does not match subsystem " +
                        std::to_string(subsystem));
  }
  const int targets[] = {subsystem};
  const int out_dims[] = {ch.dim_out()};
  qcore::Dims dims_out = rho.dims();
  dims_out[subsystem] = ch.dim_out();
  const auto d_out = static_cast<Eigen::Index>(qcore::total_dim(dims_out));

  ComplexMatrix acc = ComplexMatrix::Zero(d_out, d_out);
  for (const auto& e : ch.kraus_ops()) {
    // E ρ E† = E (E ρ)† for Hermitian ρ
    const ComplexMatrix left = qcore::apply_left(e, targets, rho.dims(), rho.matrix(), out_dims);
    acc += qcore::apply_left(e, targets, rho.dims(), left.adjoint(), out_dims);
  }
  return DensityMatrix::sanitized(std::move(dims_out), std::move(acc));
}

KrausChannel make_decoherence(DecoherenceKind kind, double t) {
  switch (kind) {
    case DecoherenceKind::AD: return make_ad(t);
    case DecoherenceKind::PD: return make_pd(t, PdMode::standard);
    case DecoherenceKind::PD_verbatim: return make_pd(t, PdMode::verbatim);
    case DecoherenceKind::D: return make_d(t);
  }
  throw ArgumentError("unknown decoherence kind");
}

DensityMatrix local_decohere(const qcore::PureState& psi, const KrausChannel& ch) {
  if (psi.dims() != qcore::Dims{2, 2}) {
    throw ArgumentError("local_decohere: input must be a two-qubit pure state");
  }
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  return apply(ch, apply(ch, rho, 0), 1);
}

DensityMatrix local_decohere(const qcore::PureState& psi, DecoherenceKind kind,
                             double t) {
  return local_decohere(psi, make_decoherence(kind, t));
}

}  // namespace nlact::channels
