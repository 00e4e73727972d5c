#include "mimolink/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mimolink/baseline.hpp"
#include "mimolink/errors.hpp"
#include "mimolink/metrics.hpp"
#include "mimolink/receiver.hpp"

namespace mimolink {

const char* const kCsvHeader = "scheme,nt,nr,snr_db,rho,metric,value,ci95,trials,seed";
const char* const kSeparationScheme = "separation-rd";

namespace {

using nlohmann::json;

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

Rational rho_from_json(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational{v.get<long long>(), 1};
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v.get<double>());
    return Rational::parse(buf);
  }
  throw ConfigError("rho entries must be rational strings or numbers");
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Per-trial samples gathered for one grid cell.
struct TrialStats {
  double mse = 0.0;
  double analytic_mse = 0.0;
  double sinr_linear = 0.0;
  double capacity = 0.0;
  double sep_mse = 0.0;
};

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

template <typename Getter>
MeanCi reduce(const std::vector<TrialStats>& stats, Getter get) {
  double sum = 0.0;
  for (const TrialStats& s : stats) sum += get(s);
  const double mean = sum / stats.size();
  double ss = 0.0;
  for (const TrialStats& s : stats) {
    const double d = get(s) - mean;
    ss += d * d;
  }
  const double ci =
      stats.size() > 1 ? kZ95 * std::sqrt(ss / (stats.size() - 1) / stats.size()) : 0.0;
  return {mean, ci};
}

void parallel_for(long n, int workers, const std::function<void(long)>& fn) {
  if (workers <= 1 || n < 2) {
    for (long t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const long t = next.fetch_add(1);
      if (t >= n) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<long>(workers, n);
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(body);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Cell {
  StmScheme scheme;       // unused for the separation pseudo-scheme
  bool separation = false;
  int nr = 0;
  Rational rho;
  double snr_db = 0.0;
  long k = 0;
  long n = 0;
  long l_scheme = 0;
  long l_codec = 0;
  std::uint64_t cell_id = 0;
};

TrialStats run_trial(const SweepConfig& cfg, const Cell& cell, long trial) {
  const std::uint64_t t = static_cast<std::uint64_t>(trial);
  ChannelParams params{cfg.nt, cell.nr, 1.0,
                       noise_var_for_snr(cell.snr_db, cfg.nt, 1.0)};
  const Seed chan_seed{cfg.master_seed,
                       derive_stream(kStreamChannel, static_cast<std::uint64_t>(cell.nr), t)};
  const ChannelState state = sample_channel(params, chan_seed);

  TrialStats out;
  if (cell.separation) {
    out.capacity = mimo_capacity(state, params);
    out.sep_mse = separation_distortion(out.capacity, cell.k, cell.n, cfg.source_variance);
    return out;
  }

  const GaussianSource src{cell.n, cfg.source_variance};
  const LinearCodec codec{cell.n, cell.l_codec};
  const Seed src_seed{cfg.master_seed, derive_stream(kStreamSource, 0, t)};
  const std::vector<double> x = sample_source(src, src_seed);
  const LatentVector z = encode_source(codec, x);

  const EncodedFrame frame = encode(cell.scheme, z, cell.k);
  const Seed noise_seed{cfg.master_seed, derive_stream(kStreamNoise, cell.cell_id, t)};
  const ComplexMatrix y = transmit(frame.s, state, params, noise_seed);

  EqualizedLatent z_hat;
  if (cell.scheme.is_ostbc()) {
    z_hat = ostbc_decode(cell.scheme, y, state, params,
                         static_cast<std::size_t>(cell.l_codec));
    out.sinr_linear = sinr_diversity(state, params, cell.scheme);
  } else {
    z_hat = post_equalize(zero_post_equalizer(), mmse_equalize(y, state, params), y, state);
    z_hat.symbols.resize(static_cast<std::size_t>(cell.l_codec));
    z_hat.per_symbol_gain.resize(static_cast<std::size_t>(cell.l_codec));
    z_hat.per_symbol_err_var.resize(static_cast<std::size_t>(cell.l_codec));
    const std::vector<double> per_stream = sinr_mmse_all_streams(state, params);
    double acc = 0.0;
    for (double g : per_stream) acc += g;
    out.sinr_linear = acc / per_stream.size();
  }

  const std::vector<double> x_hat = decode_source(codec, z_hat, z.norm_scale);
  double se = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_hat[i];
    se += d * d;
  }
  out.mse = se / static_cast<double>(cell.n);
  out.analytic_mse =
      analytic_distortion(codec, z_hat.per_symbol_err_var, cfg.source_variance);
  return out;
}

void emit_rows(const SweepConfig& cfg, const Cell& cell,
               const std::vector<TrialStats>& stats, std::vector<SweepRow>& rows) {
  SweepRow base;
  base.scheme = cell.separation ? kSeparationScheme : cell.scheme.name();
  base.nt = cfg.nt;
  base.nr = cell.nr;
  base.snr_db = cell.snr_db;
  base.rho = cell.rho;
  base.trials = cfg.trials;
  base.seed = cfg.master_seed;

  auto push = [&](const std::string& metric, double value, double ci) {
    SweepRow r = base;
    r.metric = metric;
    r.value = value;
    r.ci95 = ci;
    rows.push_back(std::move(r));
  };

  if (cell.separation) {
    const MeanCi cap = reduce(stats, [](const TrialStats& s) { return s.capacity; });
    const MeanCi mse = reduce(stats, [](const TrialStats& s) { return s.sep_mse; });
    push("capacity_bpcu", cap.mean, cap.ci95);
    push("mse", mse.mean, mse.ci95);
    const double psnr_ci =
        mse.mean > 0.0 ? 10.0 / std::log(10.0) * mse.ci95 / mse.mean : 0.0;
    push("psnr_db", psnr(mse.mean, cfg.max_val), psnr_ci);
    return;
  }

  const MeanCi mse = reduce(stats, [](const TrialStats& s) { return s.mse; });
  push("mse", mse.mean, mse.ci95);
  const double psnr_ci = mse.mean > 0.0 ? 10.0 / std::log(10.0) * mse.ci95 / mse.mean : 0.0;
  push("psnr_db", psnr(mse.mean, cfg.max_val), psnr_ci);
  const MeanCi sinr = reduce(stats, [](const TrialStats& s) { return s.sinr_linear; });
  const double sinr_ci =
      sinr.mean > 0.0 ? 10.0 / std::log(10.0) * sinr.ci95 / sinr.mean : 0.0;
  push("sinr_db", 10.0 * std::log10(sinr.mean), sinr_ci);
}

}  // namespace

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  SweepConfig cfg;
  try {
    if (!j.contains("schemes")) throw ConfigError("config missing 'schemes'");
    cfg.schemes = j.at("schemes").get<std::vector<std::string>>();
    if (!j.contains("nt")) throw ConfigError("config missing 'nt'");
    cfg.nt = j.at("nt").get<int>();
    if (!j.contains("nr")) throw ConfigError("config missing 'nr'");
    if (j.at("nr").is_array()) {
      cfg.nr_list = j.at("nr").get<std::vector<int>>();
    } else {
      cfg.nr_list = {j.at("nr").get<int>()};
    }
    if (!j.contains("snr_db")) throw ConfigError("config missing 'snr_db'");
    cfg.snr_db_grid = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("rho")) {
      if (j.at("rho").is_array()) {
        for (const json& v : j.at("rho")) cfg.rho_list.push_back(rho_from_json(v));
      } else {
        cfg.rho_list.push_back(rho_from_json(j.at("rho")));
      }
    } else {
      throw ConfigError("config missing 'rho'");
    }
    if (j.contains("image_dims")) {
      const auto dims = j.at("image_dims").get<std::vector<int>>();
      if (dims.size() != 3) throw ConfigError("image_dims must be [C, H, W]");
      cfg.image_dims = ImageDims{dims[0], dims[1], dims[2]};
    }
    if (j.contains("source_n")) cfg.source_n = j.at("source_n").get<long>();
    if (j.contains("source_variance")) cfg.source_variance = j.at("source_variance").get<double>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<long>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("max_val")) cfg.max_val = j.at("max_val").get<double>();
    if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<bool>();
    if (j.contains("out_csv")) cfg.out_csv = j.at("out_csv").get<std::string>();
    if (j.contains("out_svg")) cfg.out_svg = j.at("out_svg").get<std::string>();
    if (j.contains("svg_metric")) cfg.svg_metric = j.at("svg_metric").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

long SweepConfig::source_len() const {
  if (image_dims) return image_dims->pixels();
  return source_n.value_or(0);
}

void SweepConfig::validate() const {
  if (schemes.empty()) throw ConfigError("config field 'schemes' must be nonempty");
  for (const std::string& name : schemes) {
    StmScheme::from_name(name, nt);  // throws on unknown name or bad (scheme, nt)
    if (name == kSeparationScheme) {
      throw ConfigError("'separation-rd' is emitted automatically; list only "
                        "transmission schemes");
    }
  }
  if (nr_list.empty()) throw ConfigError("config field 'nr' must be nonempty");
  for (int nr : nr_list) {
    if (nr < 1) throw ConfigError("config field 'nr' must be >= 1, got " + std::to_string(nr));
  }
  if (snr_db_grid.empty()) throw ConfigError("config field 'snr_db' must be nonempty");
  for (std::size_t i = 1; i < snr_db_grid.size(); ++i) {
    if (!(snr_db_grid[i] > snr_db_grid[i - 1])) {
      throw ConfigError("config field 'snr_db' must be strictly increasing");
    }
  }
  if (rho_list.empty()) throw ConfigError("config field 'rho' must be nonempty");
  if (image_dims.has_value() == (source_n.has_value())) {
    throw ConfigError("config needs exactly one of 'image_dims' or 'source_n'");
  }
  if (image_dims) image_dims->validate();
  const long n = source_len();
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("source length must be even and >= 2, got " + std::to_string(n));
  }
  if (!(source_variance > 0.0)) throw ConfigError("source_variance must be > 0");
  if (trials < 1) throw ConfigError("config field 'trials' must be >= 1");
  if (!(max_val > 0.0)) throw ConfigError("config field 'max_val' must be > 0");
  // Channel-use accounting must be exact for every (rho, scheme) pair.
  for (const Rational& rho : rho_list) {
    const long k = channel_uses(rho, n);
    for (const std::string& name : schemes) {
      latent_length(StmScheme::from_name(name, nt), k);  // throws on bad divisibility
    }
  }
}

SweepResult run_sweep(const SweepConfig& config, int workers) {
  config.validate();
  const long n = config.source_len();

  std::vector<Cell> cells;
  std::uint64_t cell_id = 0;
  auto add_cells = [&](const StmScheme* scheme) {
    for (int nr : config.nr_list) {
      for (const Rational& rho : config.rho_list) {
        for (double snr : config.snr_db_grid) {
          Cell cell;
          cell.separation = scheme == nullptr;
          if (scheme) cell.scheme = *scheme;
          cell.nr = nr;
          cell.rho = rho;
          cell.snr_db = snr;
          cell.n = n;
          cell.k = channel_uses(rho, n);
          if (scheme) {
            cell.l_scheme = latent_length(*scheme, cell.k);
            cell.l_codec = std::min(cell.l_scheme, n / 2);
          }
          cell.cell_id = cell_id++;
          cells.push_back(cell);
        }
      }
    }
  };
  for (const std::string& name : config.schemes) {
    const StmScheme scheme = StmScheme::from_name(name, config.nt);
    add_cells(&scheme);
  }
  if (config.baseline) add_cells(nullptr);

  SweepResult result;
  std::vector<TrialStats> stats(static_cast<std::size_t>(config.trials));
  for (const Cell& cell : cells) {
    parallel_for(config.trials, workers,
                 [&](long t) { stats[static_cast<std::size_t>(t)] = run_trial(config, cell, t); });
    emit_rows(config, cell, stats, result.rows);
  }
  return result;
}

std::string csv_to_string(const SweepResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : result.rows) {
    out += r.scheme;
    out += ',';
    out += std::to_string(r.nt);
    out += ',';
    out += std::to_string(r.nr);
    out += ',';
    out += fmt9(r.snr_db);
    out += ',';
    out += r.rho.str();
    out += ',';
    out += r.metric;
    out += ',';
    out += fmt9(r.value);
    out += ',';
    out += fmt9(r.ci95);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << csv_to_string(result);
  if (!out) throw IoError("write failed for " + path);
}

SweepResult read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw ConfigError("unexpected CSV header in " + path + ": '" + line + "'");
  }
  SweepResult result;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 10) {
      throw ConfigError("malformed CSV row in " + path + ": '" + line + "'");
    }
    SweepRow r;
    r.scheme = fields[0];
    r.nt = std::stoi(fields[1]);
    r.nr = std::stoi(fields[2]);
    r.snr_db = std::stod(fields[3]);
    r.rho = Rational::parse(fields[4]);
    r.metric = fields[5];
    r.value = std::stod(fields[6]);
    r.ci95 = std::stod(fields[7]);
    r.trials = std::stol(fields[8]);
    r.seed = std::stoull(fields[9]);
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace mimolink
