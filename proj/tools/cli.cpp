#include "cli.hpp"

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "nlact/errors.hpp"
#include "nlact/harness.hpp"

namespace nlact::cli {
namespace {

using harness::Experiment;
using harness::ExperimentConfig;
using harness::OutputFormat;

void print_report(std::ostream& out, const harness::VerifyReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " residual=" << c.residual
        << " tol=" << c.tolerance << '\n';
  }
  out << (report.all_passed() ? "all checks passed" : "verification FAILED") << '\n';
}

int execute(const ExperimentConfig& cfg, std::ostream& out) {
  switch (cfg.experiment) {
    case Experiment::census: {
      const auto result = harness::run_census(cfg);
      harness::write_summary(out, result.summary);
      return kSuccess;
    }
    case Experiment::decoherence_sweep: {
      const auto result = harness::run_decoherence_sweep(cfg);
      harness::write_summary(out, result.summary);
      return kSuccess;
    }
    case Experiment::iso_curve: {
      const auto rows = harness::run_iso_curve(cfg);
      if (cfg.output_path.empty()) {
        harness::write_iso_curve(out, rows, cfg.output_format);
      }
      return kSuccess;
    }
    case Experiment::protocol_verify:
    case Experiment::extension_verify: {
      const auto report = cfg.experiment == Experiment::protocol_verify
                              ? harness::run_protocol_verify(cfg)
                              : harness::run_extension_verify(cfg);
      print_report(out, report);
      return exit_code_for(report);
    }
  }
  return kBadArguments;
}

}  // namespace

int exit_code_for(const harness::VerifyReport& report) {
  return report.all_passed() ? kSuccess : kVerificationFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tripartite nonlocality-activation toolkit and Monte Carlo harness", "nlact"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value file mirroring the long flags");

  ExperimentConfig cfg;
  bool n_states_given = false;
  std::size_t n_states = 0;
  std::size_t steps = 200;
  std::string channel = "ad";
  std::string format = "csv";
  const std::map<std::string, channels::DecoherenceKind> channel_map{
      {"ad", channels::DecoherenceKind::AD},
      {"pd", channels::DecoherenceKind::PD},
      {"pd-verbatim", channels::DecoherenceKind::PD_verbatim},
      {"d", channels::DecoherenceKind::D}};

  auto* n_opt = app.add_option("--n-states", n_states, "Number of random states")
                    ->check(CLI::PositiveNumber);
  app.add_option("--steps", steps, "Number of equally spaced t values in [0, 1]")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  app.add_option("--channel", channel, "Decoherence process")
      ->check(CLI::IsMember({"ad", "pd", "pd-verbatim", "d"}));
  app.add_option("--seed", cfg.seed, "Base seed; state i uses stream i");
  app.add_option("--out", cfg.output_path, "Record file (CSV or JSON)");
  app.add_option("--format", format, "Record file format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--k", cfg.k, "Erasure parameter k");
  app.add_option("--p", cfg.p, "Isotropic mixing parameter p")->check(CLI::Range(0.0, 1.0));
  app.add_option("--d", cfg.d, "Local dimension for teleportation checks (2 or 3)");

  auto* census = app.add_subcommand("census", "Classify Hilbert-Schmidt random two-qubit states");
  auto* sweep = app.add_subcommand("sweep", "Local decoherence sweeps of random pure states");
  auto* verify = app.add_subcommand("verify", "Structural checks of the activation protocols");
  auto* iso = app.add_subcommand("iso-curve", "Isotropic-state curves for d = 2");
  auto* extension = app.add_subcommand("extension", "Symmetric-extension certificate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "nlact: " << e.what() << '\n';
    return kBadArguments;
  }
  n_states_given = n_opt->count() > 0;

  if (census->parsed()) {
    cfg.experiment = Experiment::census;
    cfg.n_states = n_states_given ? n_states : 100000;
  } else if (sweep->parsed()) {
    cfg.experiment = Experiment::decoherence_sweep;
    cfg.n_states = n_states_given ? n_states : 2000;
    cfg.keep_steps = false;
  } else if (verify->parsed()) {
    cfg.experiment = Experiment::protocol_verify;
  } else if (iso->parsed()) {
    cfg.experiment = Experiment::iso_curve;
  } else if (extension->parsed()) {
    cfg.experiment = Experiment::extension_verify;
  }
  cfg.n_time_steps = steps;
  cfg.channel = channel_map.at(channel);
  cfg.output_format = format == "json" ? OutputFormat::json : OutputFormat::csv;

  try {
    return execute(cfg, out);
  } catch (const IoError& e) {
    err << "nlact: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const ArgumentError& e) {
    err << "nlact: " << e.what() << '\n';
    return kBadArguments;
  } catch (const SizeError& e) {
    err << "nlact: " << e.what() << '\n';
    return kBadArguments;
  }
}

}  // namespace nlact::cli
