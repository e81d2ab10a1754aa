#include "nlact/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "nlact/errors.hpp"
#include "nlact/protocols.hpp"
#include "nlact/states.hpp"

namespace nlact::harness {

using criteria::Classification;
using json = nlohmann::json;
using qcore::DensityMatrix;
using qcore::PureState;

namespace {

// Seed offset for the scalar parameters drawn alongside random states in
// verification runs, so they never share a stream with the states.
constexpr std::uint64_t kParameterSeedOffset = 0x9E3779B97F4A7C15ull;

constexpr std::size_t kVerifyTrials = 20;
constexpr double kStructuralTolerance = 1e-10;
constexpr double kChshTolerance = 1e-9;
constexpr double kExtensionTolerance = 1e-12;

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n). Work is claimed in chunks from a shared
// counter; fn must only write to slot i of its output.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + kChunk);
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// JSON numbers carry the same 12 significant digits as CSV.
json num12(double x) { return std::stod(fmt12(x)); }

const char* fmt_bool(bool b) { return b ? "true" : "false"; }

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt12(*x) : std::string{}; }

json classification_json(const Classification& c) {
  return {{"m_value", num12(c.m_value)},
          {"chsh_max", num12(c.chsh_max)},
          {"s_a", num12(c.s_a)},
          {"s_b", num12(c.s_b)},
          {"s_ab", num12(c.s_ab)},
          {"violates_chsh", c.violates_chsh},
          {"hashing_distillable", c.hashing_distillable},
          {"nonlocal_resource", c.nonlocal_resource}};
}

json proportion_json(const Proportion& p) {
  return {{"count", p.count},
          {"trials", p.trials},
          {"value", num12(p.value)},
          {"std_error", num12(p.std_error)}};
}

json summary_json(const CensusSummary& s) {
  return {{"n_states", s.n_states},
          {"frac_no_chsh_violation", proportion_json(s.no_chsh_violation)},
          {"frac_nlr_of_all", proportion_json(s.nlr_of_all)},
          {"frac_nlr_of_nonviolating", proportion_json(s.nlr_of_nonviolating)}};
}

json summary_json(const SweepSummary& s) {
  return {{"channel", channels::to_string(s.channel)},
          {"n_states", s.n_states},
          {"n_time_steps", s.n_time_steps},
          {"activated", proportion_json(s.activated)},
          {"pct_nlr_states", num12(s.pct_nlr_states)},
          {"mean_interval_width", num12(s.mean_interval_width)},
          {"std_interval_width", num12(s.std_interval_width)},
          {"mean_interval_width_all", num12(s.mean_interval_width_all)},
          {"std_interval_width_all", num12(s.std_interval_width_all)},
          {"n_multi_interval", s.n_multi_interval}};
}

// Population mean and standard deviation.
std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

void maybe_write(const ExperimentConfig& cfg,
                 const std::function<void(std::ostream&)>& writer) {
  if (!cfg.output_path.empty()) {
    write_file(cfg.output_path, writer);
  }
}

Eigen::Vector3d unit(double x, double y, double z) {
  return Eigen::Vector3d(x, y, z).normalized();
}

// Settings reaching 2√2 on Ψ+ (T = diag(1, −1, 1)).
criteria::ChshSettings bell_optimal_settings() {
  return {unit(0, 0, 1), unit(1, 0, 0), unit(1, 0, 1), unit(-1, 0, 1)};
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::census: return "census";
    case Experiment::decoherence_sweep: return "decoherence_sweep";
    case Experiment::protocol_verify: return "protocol_verify";
    case Experiment::extension_verify: return "extension_verify";
    case Experiment::iso_curve: return "iso_curve";
  }
  return "unknown";
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_states < 1) {
    throw ArgumentError("n_states must be at least 1");
  }
  if (cfg.experiment == Experiment::decoherence_sweep && cfg.n_time_steps < 2) {
    throw ArgumentError("a sweep needs at least 2 time steps");
  }
  if (cfg.experiment == Experiment::protocol_verify) {
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) {
      throw ArgumentError("p must lie in [0, 1]");
    }
    if (cfg.d != 0 && (cfg.d < 2 || cfg.d > protocols::kMaxTeleportDim)) {
      throw ArgumentError("d must be 2 or 3");
    }
    if (!(cfg.k >= 1.0) || !std::isfinite(cfg.k)) {
      throw ArgumentError("k must be a finite real >= 1");
    }
  }
  if (cfg.experiment == Experiment::extension_verify) {
    if (cfg.k != std::floor(cfg.k) || cfg.k < 2 || cfg.k > protocols::kMaxExtensionK) {
      throw ArgumentError("extension k must be an integer in [2, 4]");
    }
  }
}

Proportion make_proportion(std::size_t count, std::size_t trials) {
  Proportion p{count, trials, 0.0, 0.0};
  if (trials > 0) {
    p.value = static_cast<double>(count) / static_cast<double>(trials);
    p.std_error = std::sqrt(p.value * (1.0 - p.value) / static_cast<double>(trials));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Census

CensusResult run_census(const ExperimentConfig& cfg) {
  validate(cfg);
  CensusResult result;
  result.records.resize(cfg.n_states);
  parallel_for(cfg.n_states, cfg.threads, [&](std::size_t i) {
    const RngSeed seed{cfg.seed, i};
    const DensityMatrix rho = states::random_mixed_hs({2, 2}, seed);
    result.records[i] = {i, seed, criteria::classify(rho)};
  });

  std::size_t nonviolating = 0;
  std::size_t nlr = 0;
  for (const auto& r : result.records) {
    if (!r.classification.violates_chsh) ++nonviolating;
    if (r.classification.nonlocal_resource) ++nlr;
  }
  auto& s = result.summary;
  s.n_states = cfg.n_states;
  s.no_chsh_violation = make_proportion(nonviolating, cfg.n_states);
  s.nlr_of_all = make_proportion(nlr, cfg.n_states);
  s.nlr_of_nonviolating = make_proportion(nlr, nonviolating);

  maybe_write(cfg, [&](std::ostream& os) { write_census(os, result, cfg.output_format); });
  return result;
}

// ---------------------------------------------------------------------------
// Decoherence sweeps

std::vector<double> time_grid(std::size_t n) {
  if (n < 2) {
    throw ArgumentError("time grid needs at least 2 points");
  }
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    grid[j] = static_cast<double>(j) / static_cast<double>(n - 1);
  }
  return grid;
}

std::optional<ActivationInterval> extract_interval(std::span<const double> grid,
                                                   const std::vector<bool>& active) {
  if (grid.size() != active.size() || grid.size() < 2) {
    throw ArgumentError("extract_interval: grid and flags must match, size >= 2");
  }
  const auto first = std::find(active.begin(), active.end(), true);
  if (first == active.end()) {
    return std::nullopt;
  }
  const auto last = std::find(active.rbegin(), active.rend(), true);
  const auto i0 = static_cast<std::size_t>(first - active.begin());
  const auto i1 = active.size() - 1 - static_cast<std::size_t>(last - active.rbegin());
  const double spacing = grid[1] - grid[0];

  ActivationInterval iv;
  iv.t_start = grid[i0];
  iv.t_end = grid[i1];
  iv.width = (iv.t_end - iv.t_start) + spacing;
  iv.active_steps = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  iv.multi_interval = iv.active_steps != i1 - i0 + 1;
  iv.total_measure = static_cast<double>(iv.active_steps) * spacing;
  return iv;
}

SweepResult run_decoherence_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<double> grid = time_grid(cfg.n_time_steps);
  std::vector<channels::KrausChannel> chans;
  chans.reserve(grid.size());
  for (double t : grid) chans.push_back(channels::make_decoherence(cfg.channel, t));

  SweepResult result;
  result.records.resize(cfg.n_states);
  parallel_for(cfg.n_states, cfg.threads, [&](std::size_t i) {
    ExperimentRecord rec;
    rec.state_index = i;
    rec.seed_used = {cfg.seed, i};
    const PureState psi = states::random_pure_fs({2, 2}, rec.seed_used);
    std::vector<bool> active(grid.size());
    if (cfg.keep_steps) rec.per_step.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Classification c = criteria::classify(channels::local_decohere(psi, chans[j]));
      active[j] = c.nonlocal_resource;
      if (c.violates_chsh) rec.last_chsh_violation_t = grid[j];
      if (cfg.keep_steps) rec.per_step.push_back({grid[j], c});
    }
    rec.activation_interval = extract_interval(grid, active);
    result.records[i] = std::move(rec);
  });

  std::vector<double> widths_activated;
  std::vector<double> widths_all;
  std::size_t multi = 0;
  for (const auto& r : result.records) {
    const double w = r.activation_interval ? r.activation_interval->total_measure : 0.0;
    widths_all.push_back(w);
    if (r.activation_interval) {
      widths_activated.push_back(w);
      if (r.activation_interval->multi_interval) ++multi;
    }
  }
  auto& s = result.summary;
  s.channel = cfg.channel;
  s.n_states = cfg.n_states;
  s.n_time_steps = cfg.n_time_steps;
  s.activated = make_proportion(widths_activated.size(), cfg.n_states);
  s.pct_nlr_states = 100.0 * s.activated.value;
  std::tie(s.mean_interval_width, s.std_interval_width) = mean_std(widths_activated);
  std::tie(s.mean_interval_width_all, s.std_interval_width_all) = mean_std(widths_all);
  s.n_multi_interval = multi;

  maybe_write(cfg, [&](std::ostream& os) { write_sweep(os, result, cfg.output_format); });
  return result;
}

// ---------------------------------------------------------------------------
// Verification

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void VerifyReport::add(std::string name, double residual, double tolerance) {
  checks.push_back({std::move(name), residual, tolerance,
                    std::isfinite(residual) && residual <= tolerance});
}

namespace {

void verify_teleportation(const ExperimentConfig& cfg, int d, VerifyReport& report) {
  const std::string tag = "d" + std::to_string(d) + ".";
  const int d2 = d * d;

  // Four-term mixture form on random inputs.
  double worst_mixture = 0.0;
  double worst_corrected = 0.0;
  for (std::size_t i = 0; i < kVerifyTrials; ++i) {
    const PureState phi = states::random_pure_fs({d, d}, {cfg.seed, i});
    PhiloxEngine prng({cfg.seed + kParameterSeedOffset, i});
    const double p = prng.uniform_open();
    const DensityMatrix expected = protocols::teleport_mixture(phi, p);
    const auto out = protocols::double_teleport(phi, p, {{0, 0}, {0, 0}});
    worst_mixture = std::max(
        worst_mixture, qcore::max_abs(out.conditional_state->matrix() - expected.matrix()));
    // A corrected non-trivial outcome reproduces the same mixture.
    const protocols::BellIndex other{1 % d, (d - 1)};
    const auto corrected =
        protocols::double_teleport(phi, p, {other, {0, 1}}, {.apply_correction = true});
    worst_corrected = std::max(
        worst_corrected,
        qcore::max_abs(corrected.conditional_state->matrix() - expected.matrix()));
  }
  report.add(tag + "mixture_form.psi_plus_branch", worst_mixture, kStructuralTolerance);
  report.add(tag + "mixture_form.corrected_branch", worst_corrected, kStructuralTolerance);

  // Outcome completeness and the unconditioned Alice-Charlie marginal.
  const PureState phi = states::random_pure_fs({d, d}, {cfg.seed, kVerifyTrials});
  double total = 0.0;
  qcore::ComplexMatrix average = qcore::ComplexMatrix::Zero(d2, d2);
  for (int a1 = 0; a1 < d; ++a1)
    for (int b1 = 0; b1 < d; ++b1)
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2) {
          const auto out = protocols::double_teleport(phi, cfg.p, {{a1, b1}, {a2, b2}});
          total += out.success_probability;
          if (out.conditional_state) {
            average += out.success_probability * out.conditional_state->matrix();
          }
        }
  report.add(tag + "outcome_probabilities_sum", std::abs(total - 1.0), kStructuralTolerance);
  const qcore::ComplexMatrix flat =
      qcore::ComplexMatrix::Identity(d2, d2) / static_cast<double>(d2);
  report.add(tag + "outcome_average_is_marginal", qcore::max_abs(average - flat),
             kStructuralTolerance);

  // Fidelity of the teleported maximally entangled state at the requested p.
  const PureState target = states::max_entangled(d);
  const auto tele = protocols::double_teleport(target, cfg.p, {{0, 0}, {0, 0}});
  const double fidelity = qcore::fidelity_pure(*tele.conditional_state, target);
  const double expected_fidelity =
      qcore::fidelity_pure(protocols::teleport_mixture(target, cfg.p), target);
  report.add(tag + "teleport_fidelity(p=" + fmt12(cfg.p) + ")=" + fmt12(fidelity),
             std::abs(fidelity - expected_fidelity), kStructuralTolerance);
}

void verify_qubit_activation(const ExperimentConfig& cfg, VerifyReport& report) {
  const PureState bell = states::max_entangled(2);
  double worst = 0.0;
  for (std::size_t i = 0; i <= 10; ++i) {
    const double p = static_cast<double>(i) / 10.0;
    const auto out = protocols::double_teleport(bell, p, {{0, 0}, {0, 0}});
    const double chsh = 2.0 * std::sqrt(criteria::horodecki_m(*out.conditional_state));
    worst = std::max(worst, std::abs(chsh - 2.0 * std::numbers::sqrt2 * p * p));
  }
  report.add("d2.activated_chsh_vs_2sqrt2_p2", worst, kChshTolerance);

  // CHSH of the joint distribution splits linearly over the p² mixture.
  const auto s = bell_optimal_settings();
  const auto alice = std::array{protocols::qubit_measurement(s.a),
                                protocols::qubit_measurement(s.a_prime)};
  const auto charlie = std::array{protocols::qubit_measurement(s.b),
                                  protocols::qubit_measurement(s.b_prime)};
  const double p = cfg.p < 1.0 ? cfg.p : 0.9;
  double chsh_joint = 0.0, chsh_phi = 0.0, chsh_loc = 0.0, residual = 0.0;
  const double sign[2][2] = {{1, 1}, {1, -1}};
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      const auto dist = protocols::teleport_distribution(bell, p, alice[x], charlie[z]);
      chsh_joint += sign[x][z] * protocols::correlator(dist.joint);
      chsh_phi += sign[x][z] * protocols::correlator(dist.p_phi);
      chsh_loc += sign[x][z] * protocols::correlator(dist.p_loc);
      residual = std::max(residual, dist.residual);
    }
  }
  report.add("d2.distribution_local_part_residual", residual, kStructuralTolerance);
  report.add("d2.chsh_linearity",
             std::abs(chsh_joint - (p * p * chsh_phi + (1.0 - p * p) * chsh_loc)),
             kChshTolerance);
}

void verify_erased(double k, VerifyReport& report) {
  const std::string tag = "erased(k=" + fmt12(k) + ").";
  double total = 0.0;
  double worst_filter = 0.0, worst_bell = 0.0, worst_fid = 0.0, worst_chsh = 0.0;
  double worst_fail_m = 0.0;
  for (const auto& leaf : protocols::erased_outcome_tree(k)) {
    total += leaf.success_probability;
    const int bell = leaf.outcome_labels[2];
    if (bell >= 0) {
      worst_filter = std::max(worst_filter, std::abs(leaf.stage_probabilities[0] - 1.0 / (k * k)));
      worst_bell = std::max(worst_bell, std::abs(leaf.stage_probabilities[1] - 0.25));
      const auto target = protocols::erased_target_state(bell);
      worst_fid = std::max(worst_fid,
                           std::abs(1.0 - qcore::fidelity_pure(*leaf.conditional_state, target)));
      const double chsh = 2.0 * std::sqrt(criteria::horodecki_m(*leaf.conditional_state));
      worst_chsh = std::max(worst_chsh, std::abs(chsh - 2.0 * std::numbers::sqrt2));
    } else if (leaf.conditional_state) {
      worst_fail_m = std::max(worst_fail_m, criteria::horodecki_m(*leaf.conditional_state));
    }
  }
  report.add(tag + "filter_probability_1/k^2", worst_filter, 1e-12);
  report.add(tag + "bell_outcome_probability_1/4", worst_bell, kStructuralTolerance);
  report.add(tag + "bell_state_fidelity", worst_fid, kStructuralTolerance);
  report.add(tag + "chsh_2sqrt2", worst_chsh, kChshTolerance);
  report.add(tag + "failure_branches_m_zero", worst_fail_m, kStructuralTolerance);
  report.add(tag + "outcome_tree_sums_to_one", std::abs(total - 1.0), kStructuralTolerance);
}

void verify_extension(int k, VerifyReport& report) {
  const DensityMatrix ext = protocols::build_symmetric_extension(k);
  const DensityMatrix target = states::erased(k);
  double worst = 0.0;
  for (int i = 1; i <= k; ++i) {
    worst = std::max(worst,
                     qcore::max_abs(qcore::partial_trace(ext, {0, i}).matrix() - target.matrix()));
  }
  report.add("extension(k=" + std::to_string(k) + ").marginals_equal_erased", worst,
             kExtensionTolerance);
  // Swapping B_1 and B_2 leaves the state unchanged.
  std::vector<int> order(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) order[j] = j;
  std::swap(order[1], order[2]);
  report.add("extension(k=" + std::to_string(k) + ").bob_permutation_invariance",
             qcore::max_abs(qcore::permute(ext, order).matrix() - ext.matrix()),
             kExtensionTolerance);
}

}  // namespace

VerifyReport run_protocol_verify(const ExperimentConfig& cfg) {
  validate(cfg);
  VerifyReport report;
  const std::vector<int> ds = cfg.d == 0 ? std::vector<int>{2, 3} : std::vector<int>{cfg.d};
  for (int d : ds) verify_teleportation(cfg, d, report);
  verify_qubit_activation(cfg, report);
  verify_erased(cfg.k, report);

  // The erased-state conditional state certifies the parent pair nonlocal.
  {
    const DensityMatrix ab = states::erased(cfg.k);
    const int swap[] = {1, 0};
    const DensityMatrix pair = qcore::tensor(ab, qcore::permute(ab, swap));
    qcore::ComplexVector bell = qcore::ComplexVector::Zero(9);
    bell(0) = bell(4) = 1.0 / std::numbers::sqrt2;
    const int bob[] = {1, 2};
    const bool certified = protocols::verify_locality_observation(
        pair, bell * bell.adjoint(), bob, {0, 3});
    report.add("erased(k=" + fmt12(cfg.k) + ").certified_nonlocal", certified ? 0.0 : 1.0, 0.0);
  }

  const int ext_k = static_cast<int>(std::floor(cfg.k));
  if (ext_k >= 2 && ext_k <= protocols::kMaxExtensionK) {
    verify_extension(ext_k, report);
  }
  maybe_write(cfg, [&](std::ostream& os) { write_report(os, report, cfg.output_format); });
  return report;
}

VerifyReport run_extension_verify(const ExperimentConfig& cfg) {
  validate(cfg);
  VerifyReport report;
  verify_extension(static_cast<int>(cfg.k), report);
  maybe_write(cfg, [&](std::ostream& os) { write_report(os, report, cfg.output_format); });
  return report;
}

// ---------------------------------------------------------------------------
// Isotropic curves

std::vector<IsoCurveRow> run_iso_curve(const ExperimentConfig& cfg) {
  const PureState bell = states::max_entangled(2);
  std::vector<IsoCurveRow> rows(kIsoCurvePoints);
  parallel_for(kIsoCurvePoints, cfg.threads, [&](std::size_t i) {
    IsoCurveRow row;
    row.p = static_cast<double>(i) / static_cast<double>(kIsoCurvePoints - 1);
    const DensityMatrix iso = states::isotropic(row.p, 2);
    row.m_value = criteria::horodecki_m(iso);
    row.chsh_max = 2.0 * std::sqrt(row.m_value);
    row.hashing_margin = criteria::hashing_criterion(iso, {0}).margin();
    const auto out = protocols::double_teleport(bell, row.p, {{0, 0}, {0, 0}});
    row.activated_chsh = 2.0 * std::sqrt(criteria::horodecki_m(*out.conditional_state));
    rows[i] = row;
  });
  maybe_write(cfg, [&](std::ostream& os) { write_iso_curve(os, rows, cfg.output_format); });
  return rows;
}

// ---------------------------------------------------------------------------
// Output

void write_census(std::ostream& os, const CensusResult& result, OutputFormat format) {
  if (format == OutputFormat::csv) {
    os << "state_index,seed,stream_index,m_value,chsh_max,s_a,s_b,s_ab,"
          "violates_chsh,hashing_distillable,nonlocal_resource\n";
    for (const auto& r : result.records) {
      const auto& c = r.classification;
      os << r.state_index << ',' << r.seed_used.seed << ',' << r.seed_used.stream_index << ','
         << fmt12(c.m_value) << ',' << fmt12(c.chsh_max) << ',' << fmt12(c.s_a) << ','
         << fmt12(c.s_b) << ',' << fmt12(c.s_ab) << ',' << fmt_bool(c.violates_chsh) << ','
         << fmt_bool(c.hashing_distillable) << ',' << fmt_bool(c.nonlocal_resource) << '\n';
    }
    return;
  }
  json records = json::array();
  for (const auto& r : result.records) {
    json rec = {{"state_index", r.state_index},
                {"seed", r.seed_used.seed},
                {"stream_index", r.seed_used.stream_index}};
    rec.update(classification_json(r.classification));
    records.push_back(std::move(rec));
  }
  os << json{{"experiment", "census"}, {"records", records},
             {"summary", summary_json(result.summary)}}
            .dump(2)
     << '\n';
}

void write_sweep(std::ostream& os, const SweepResult& result, OutputFormat format) {
  const std::string channel(channels::to_string(result.summary.channel));
  if (format == OutputFormat::csv) {
    os << "state_index,seed,stream_index,channel,activated,t_start,t_end,width,"
          "multi_interval,total_measure,active_steps,last_chsh_violation_t\n";
    for (const auto& r : result.records) {
      const auto& iv = r.activation_interval;
      os << r.state_index << ',' << r.seed_used.seed << ',' << r.seed_used.stream_index << ','
         << channel << ',' << fmt_bool(iv.has_value()) << ','
         << (iv ? fmt12(iv->t_start) : "") << ',' << (iv ? fmt12(iv->t_end) : "") << ','
         << (iv ? fmt12(iv->width) : "") << ',' << (iv ? fmt_bool(iv->multi_interval) : "")
         << ',' << (iv ? fmt12(iv->total_measure) : "") << ','
         << (iv ? std::to_string(iv->active_steps) : "0") << ','
         << fmt_opt(r.last_chsh_violation_t) << '\n';
    }
    return;
  }
  json records = json::array();
  for (const auto& r : result.records) {
    const auto& iv = r.activation_interval;
    json rec = {{"state_index", r.state_index},
                {"seed", r.seed_used.seed},
                {"stream_index", r.seed_used.stream_index},
                {"channel", channel},
                {"activated", iv.has_value()},
                {"t_start", iv ? num12(iv->t_start) : json(nullptr)},
                {"t_end", iv ? num12(iv->t_end) : json(nullptr)},
                {"width", iv ? num12(iv->width) : json(nullptr)},
                {"multi_interval", iv ? json(iv->multi_interval) : json(nullptr)},
                {"total_measure", iv ? num12(iv->total_measure) : json(nullptr)},
                {"active_steps", iv ? iv->active_steps : 0},
                {"last_chsh_violation_t",
                 r.last_chsh_violation_t ? num12(*r.last_chsh_violation_t) : json(nullptr)}};
    records.push_back(std::move(rec));
  }
  os << json{{"experiment", "decoherence_sweep"}, {"records", records},
             {"summary", summary_json(result.summary)}}
            .dump(2)
     << '\n';
}

void write_iso_curve(std::ostream& os, std::span<const IsoCurveRow> rows,
                     OutputFormat format) {
  if (format == OutputFormat::csv) {
    os << "p,m_value,chsh_max,hashing_margin,activated_chsh\n";
    for (const auto& r : rows) {
      os << fmt12(r.p) << ',' << fmt12(r.m_value) << ',' << fmt12(r.chsh_max) << ','
         << fmt12(r.hashing_margin) << ',' << fmt12(r.activated_chsh) << '\n';
    }
    return;
  }
  json records = json::array();
  for (const auto& r : rows) {
    records.push_back({{"p", num12(r.p)},
                       {"m_value", num12(r.m_value)},
                       {"chsh_max", num12(r.chsh_max)},
                       {"hashing_margin", num12(r.hashing_margin)},
                       {"activated_chsh", num12(r.activated_chsh)}});
  }
  os << json{{"experiment", "iso_curve"}, {"records", records}}.dump(2) << '\n';
}

void write_report(std::ostream& os, const VerifyReport& report, OutputFormat format) {
  if (format == OutputFormat::csv) {
    os << "check,residual,tolerance,passed\n";
    for (const auto& c : report.checks) {
      os << c.name << ',' << fmt12(c.residual) << ',' << fmt12(c.tolerance) << ','
         << fmt_bool(c.passed) << '\n';
    }
    return;
  }
  json records = json::array();
  for (const auto& c : report.checks) {
    records.push_back({{"check", c.name},
                       {"residual", num12(c.residual)},
                       {"tolerance", num12(c.tolerance)},
                       {"passed", c.passed}});
  }
  os << json{{"records", records}, {"summary", {{"all_passed", report.all_passed()}}}}.dump(2)
     << '\n';
}

void write_summary(std::ostream& os, const CensusSummary& s) {
  const auto line = [&os](const char* key, const Proportion& p) {
    os << key << '=' << fmt12(p.value) << " ± " << fmt12(p.std_error) << " (" << p.count
       << '/' << p.trials << ")\n";
  };
  os << "n_states=" << s.n_states << '\n';
  line("frac_no_chsh_violation", s.no_chsh_violation);
  line("frac_nlr_of_all", s.nlr_of_all);
  line("frac_nlr_of_nonviolating", s.nlr_of_nonviolating);
}

void write_summary(std::ostream& os, const SweepSummary& s) {
  os << "channel=" << channels::to_string(s.channel) << '\n'
     << "n_states=" << s.n_states << '\n'
     << "n_time_steps=" << s.n_time_steps << '\n'
     << "pct_nlr_states=" << fmt12(s.pct_nlr_states) << " ± "
     << fmt12(100.0 * s.activated.std_error) << '\n'
     << "interval_width_activated=" << fmt12(s.mean_interval_width) << " ± "
     << fmt12(s.std_interval_width) << '\n'
     << "interval_width_all_states=" << fmt12(s.mean_interval_width_all) << " ± "
     << fmt12(s.std_interval_width_all) << '\n'
     << "n_multi_interval=" << s.n_multi_interval << '\n';
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  const auto fail = [&](const std::string& cause) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw IoError(path, cause);
  };
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(std::strerror(errno));
    }
    try {
      writer(out);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    out.flush();
    if (!out) {
      fail("write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fail(ec.message());
  }
}

}  // namespace nlact::harness
