#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimolink/source.hpp"
#include "mimolink/stm.hpp"

namespace mimolink {

// Declarative sweep description. Parsed from a JSON config file; CLI flags
// may override master_seed and the CSV output path.
struct SweepConfig {
  std::vector<std::string> schemes;
  int nt = 0;
  std::vector<int> nr_list;
  std::vector<double> snr_db_grid;
  std::vector<Rational> rho_list;
  std::optional<ImageDims> image_dims;   // exactly one of image_dims /
  std::optional<long> source_n;          // source_n must be set
  double source_variance = 1.0;
  long trials = 1;
  std::uint64_t master_seed = 0;
  double max_val = 1.0;
  bool baseline = true;                  // emit separation-rd rows
  std::string out_csv;
  std::string out_svg;
  std::string svg_metric = "psnr_db";

  static SweepConfig from_json_text(const std::string& text);
  static SweepConfig from_json_file(const std::string& path);
  void validate() const;   // total: rejects every invalid combination up front
  long source_len() const; // n (pixel count for image dims)
};

struct SweepRow {
  std::string scheme;
  int nt = 0;
  int nr = 0;
  double snr_db = 0.0;
  Rational rho;
  std::string metric;
  double value = 0.0;
  double ci95 = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Runs every grid cell: trials independent frames through
// source -> stm -> channel -> receiver -> source decode, plus the
// separation baseline. Output is a pure function of (config, master_seed),
// independent of the worker count.
SweepResult run_sweep(const SweepConfig& config, int workers = 1);

extern const char* const kCsvHeader;
std::string csv_to_string(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);
SweepResult read_csv(const std::string& path);

// Scheme name used for baseline rows.
extern const char* const kSeparationScheme;

}  // namespace mimolink
