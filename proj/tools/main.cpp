#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mimolink/baseline.hpp"
#include "mimolink/errors.hpp"
#include "mimolink/experiment.hpp"
#include "mimolink/metrics.hpp"
#include "mimolink/plot.hpp"
#include "mimolink/validation.hpp"

namespace {

using namespace mimolink;

// Exit codes: 0 success, 1 validation/invariant failure, 2 config error,
// 3 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct GridArgs {
  int nt = 2;
  int nr = 1;
  std::vector<double> snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
  long trials = 100000;
  std::uint64_t seed = 1;
  double power = 1.0;
  std::string out_csv;
};

void add_grid_options(CLI::App* cmd, GridArgs& args) {
  cmd->add_option("--nt", args.nt, "Transmit antennas");
  cmd->add_option("--nr", args.nr, "Receive antennas");
  cmd->add_option("--snr-db", args.snr_db, "SNR grid in dB")->expected(-1);
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per grid point");
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_option("--power", args.power, "Per-antenna symbol power P");
  cmd->add_option("--out-csv", args.out_csv, "CSV output path (default: stdout)");
}

void check_grid(const GridArgs& args) {
  if (args.snr_db.empty()) throw ConfigError("--snr-db must be nonempty");
  for (std::size_t i = 1; i < args.snr_db.size(); ++i) {
    if (!(args.snr_db[i] > args.snr_db[i - 1])) {
      throw ConfigError("--snr-db must be strictly increasing");
    }
  }
  if (args.trials < 1) throw ConfigError("--trials must be >= 1");
}

void deliver(const SweepResult& result, const std::string& out_csv) {
  if (out_csv.empty()) {
    std::cout << csv_to_string(result);
  } else {
    write_csv(result, out_csv);
    std::cerr << "wrote " << result.rows.size() << " rows to " << out_csv << "\n";
  }
}

SweepRow make_row(const std::string& scheme, const GridArgs& args, double snr,
                  const std::string& metric, double value, double ci,
                  long trials) {
  SweepRow r;
  r.scheme = scheme;
  r.nt = args.nt;
  r.nr = args.nr;
  r.snr_db = snr;
  r.rho = Rational{0, 1};  // not applicable for pure channel metrics
  r.metric = metric;
  r.value = value;
  r.ci95 = ci;
  r.trials = trials;
  r.seed = args.seed;
  return r;
}

int cmd_sweep(const std::string& config_path, bool seed_set, std::uint64_t seed,
              int workers, const std::string& out_csv_flag) {
  SweepConfig config = SweepConfig::from_json_file(config_path);
  if (seed_set) config.master_seed = seed;
  if (!out_csv_flag.empty()) config.out_csv = out_csv_flag;
  config.validate();

  for (const std::string& name : config.schemes) {
    const StmScheme scheme = StmScheme::from_name(name, config.nt);
    std::cerr << "scheme " << name << ": rate " << scheme.code_rate()
              << ", frame power rescale " << frame_power_scale(scheme.kind) << "\n";
  }
  const SweepResult result = run_sweep(config, workers);
  deliver(result, config.out_csv);
  if (!config.out_svg.empty()) {
    plot_svg(result, config.svg_metric, config.out_svg);
    std::cerr << "wrote plot to " << config.out_svg << "\n";
  }
  return kExitOk;
}

int cmd_sinr(const GridArgs& args, const std::vector<std::string>& schemes) {
  check_grid(args);
  SweepResult result;
  for (const std::string& name : schemes) {
    const StmScheme scheme = StmScheme::from_name(name, args.nt);
    for (double snr : args.snr_db) {
      const ChannelParams params{args.nt, args.nr, args.power,
                                 noise_var_for_snr(snr, args.nt, args.power)};
      double acc = 0.0;
      for (long t = 0; t < args.trials; ++t) {
        const Seed s{args.seed, derive_stream(kStreamChannel,
                                              static_cast<std::uint64_t>(args.nr),
                                              static_cast<std::uint64_t>(t))};
        const ChannelState state = sample_channel(params, s);
        if (scheme.is_ostbc()) {
          acc += sinr_diversity(state, params, scheme);
        } else {
          const std::vector<double> streams = sinr_mmse_all_streams(state, params);
          double sum = 0.0;
          for (double v : streams) sum += v;
          acc += sum / streams.size();
        }
      }
      const double mean = acc / static_cast<double>(args.trials);
      result.rows.push_back(make_row(name, args, snr, "sinr_db",
                                     10.0 * std::log10(mean), 0.0, args.trials));
    }
  }
  deliver(result, args.out_csv);
  return kExitOk;
}

int cmd_capacity(const GridArgs& args) {
  check_grid(args);
  SweepResult result;
  for (double snr : args.snr_db) {
    const ChannelParams params{args.nt, args.nr, args.power,
                               noise_var_for_snr(snr, args.nt, args.power)};
    const CapacityReport report =
        ergodic_capacity(params, args.trials, Seed{args.seed, 0});
    const double ci = args.trials > 1 ? 1.959963984540054 * report.ergodic_std /
                                            std::sqrt(static_cast<double>(args.trials))
                                      : 0.0;
    result.rows.push_back(make_row("capacity", args, snr, "capacity_bpcu",
                                   report.ergodic_mean, ci, args.trials));
  }
  deliver(result, args.out_csv);
  return kExitOk;
}

int cmd_outage(const GridArgs& args, const std::string& scheme_name,
               double threshold_db) {
  check_grid(args);
  const StmScheme scheme = StmScheme::from_name(scheme_name, args.nt);
  const OutageCurve curve = outage_curve(scheme, args.nr, args.power, args.snr_db,
                                         threshold_db, args.trials, Seed{args.seed, 0});
  SweepResult result;
  for (std::size_t i = 0; i < curve.prob.size(); ++i) {
    const double p = curve.prob[i];
    const double ci = 1.959963984540054 *
                      std::sqrt(std::max(p * (1.0 - p), 0.0) /
                                static_cast<double>(args.trials));
    result.rows.push_back(make_row(scheme_name, args, curve.snr_grid_db[i],
                                   "outage_prob", p, ci, args.trials));
  }
  // Slope between the last two grid points with estimable probabilities.
  for (std::size_t hi = curve.prob.size(); hi-- > 1;) {
    const std::size_t lo = hi - 1;
    if (curve.prob[lo] > 0.0 && curve.prob[lo] < 1.0 && curve.prob[hi] > 0.0 &&
        curve.prob[hi] < 1.0) {
      const double d = diversity_order_estimate(curve, lo, hi);
      result.rows.push_back(make_row(scheme_name, args, curve.snr_grid_db[hi],
                                     "diversity_order", d, 0.0, args.trials));
      std::cerr << "diversity order between " << curve.snr_grid_db[lo] << " and "
                << curve.snr_grid_db[hi] << " dB: " << d << "\n";
      break;
    }
  }
  deliver(result, args.out_csv);
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& metric,
             const std::string& out_path) {
  const SweepResult result = read_csv(csv_path);
  plot_svg(result, metric, out_path);
  std::cerr << "wrote plot to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mimolink: link-level Monte Carlo simulator for analog "
               "transmission over MIMO Rayleigh fading channels"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a sweep described by a JSON config");
  std::string config_path, sweep_out_csv;
  std::uint64_t sweep_seed = 0;
  int workers = 1;
  sweep->add_option("--config", config_path, "JSON sweep config")->required();
  auto* seed_opt = sweep->add_option("--seed", sweep_seed, "Override master_seed");
  sweep->add_option("--workers", workers, "Worker threads over trial indices");
  sweep->add_option("--out-csv", sweep_out_csv, "Override the CSV output path");

  // sinr
  auto* sinr = app.add_subcommand("sinr", "Mean post-detection SINR over an SNR grid");
  GridArgs sinr_args;
  std::vector<std::string> sinr_schemes = {"alamouti", "mux"};
  add_grid_options(sinr, sinr_args);
  sinr->add_option("--schemes", sinr_schemes, "Schemes to evaluate")->expected(-1);

  // capacity
  auto* capacity = app.add_subcommand("capacity", "Ergodic MIMO capacity over an SNR grid");
  GridArgs capacity_args;
  add_grid_options(capacity, capacity_args);

  // outage
  auto* outage = app.add_subcommand("outage", "Outage probability and diversity order");
  GridArgs outage_args;
  std::string outage_scheme = "alamouti";
  double threshold_db = 10.0;
  add_grid_options(outage, outage_args);
  outage->add_option("--scheme", outage_scheme, "Scheme for the outage SINR");
  outage->add_option("--threshold-db", threshold_db, "Outage SINR threshold in dB");

  // plot
  auto* plot = app.add_subcommand("plot", "Render one metric of a CSV as SVG");
  std::string plot_csv, plot_metric = "psnr_db", plot_out;
  plot->add_option("--csv", plot_csv, "Input CSV (sweep schema)")->required();
  plot->add_option("--metric", plot_metric, "Metric column to plot")->required();
  plot->add_option("--out", plot_out, "Output SVG path")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "Run the cross-module invariant suite");
  bool full = false;
  validate->add_flag("--full", full, "Also run the slow Monte Carlo oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sweep->parsed()) {
      return cmd_sweep(config_path, !seed_opt->empty(), sweep_seed, workers, sweep_out_csv);
    }
    if (sinr->parsed()) return cmd_sinr(sinr_args, sinr_schemes);
    if (capacity->parsed()) return cmd_capacity(capacity_args);
    if (outage->parsed()) return cmd_outage(outage_args, outage_scheme, threshold_db);
    if (plot->parsed()) return cmd_plot(plot_csv, plot_metric, plot_out);
    if (validate->parsed()) return run_validation(full, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
