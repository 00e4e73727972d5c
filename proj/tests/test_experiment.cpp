#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mimolink/experiment.hpp"
#include "mimolink/plot.hpp"
#include "mimolink/validation.hpp"

using namespace mimolink;

namespace {

const char* kSmallConfig = R"({
  "schemes": ["alamouti", "mux"],
  "nt": 2,
  "nr": [1, 2],
  "snr_db": [5, 10, 15],
  "rho": "1/4",
  "source_n": 64,
  "trials": 40,
  "master_seed": 7,
  "max_val": 1.0
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::size_t count_needle(const std::string& hay, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mimolink_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig cfg = SweepConfig::from_json_text(kSmallConfig);
  CHECK(cfg.schemes == std::vector<std::string>{"alamouti", "mux"});
  CHECK(cfg.nt == 2);
  CHECK(cfg.nr_list == std::vector<int>{1, 2});
  CHECK(cfg.rho_list.size() == 1);
  CHECK(cfg.rho_list[0] == Rational{1, 4});
  CHECK(cfg.source_n.value() == 64);
  CHECK(cfg.trials == 40);
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(SweepConfig::from_json_text("{not json"), ConfigError);
}

TEST_CASE("config rejection is total and names the field") {
  auto broken = [](const std::string& patch_key, const std::string& patch_value) {
    SweepConfig cfg = SweepConfig::from_json_text(kSmallConfig);
    if (patch_key == "scheme_nt") {
      cfg.schemes = {"ostbc3-r12"};  // needs nt = 3
    } else if (patch_key == "unknown_scheme") {
      cfg.schemes = {"qam"};
    } else if (patch_key == "snr_order") {
      cfg.snr_db_grid = {10.0, 5.0};
    } else if (patch_key == "rho_fraction") {
      cfg.rho_list = {Rational::parse(patch_value)};
    } else if (patch_key == "both_sources") {
      cfg.image_dims = ImageDims{3, 32, 32};
    } else if (patch_key == "trials") {
      cfg.trials = 0;
    } else if (patch_key == "odd_source") {
      cfg.source_n = 63;
    } else if (patch_key == "divisibility") {
      cfg.schemes = {"alamouti"};
      cfg.rho_list = {Rational::parse("7/64")};  // k = 7, not divisible by 2
    }
    return cfg;
  };
  CHECK_THROWS_AS(broken("scheme_nt", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("unknown_scheme", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("snr_order", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("rho_fraction", "1/7").validate(), ConfigError);
  CHECK_THROWS_AS(broken("both_sources", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("trials", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("odd_source", "").validate(), ConfigError);
  CHECK_THROWS_AS(broken("divisibility", "").validate(), ConfigError);
  CHECK_THROWS_WITH_AS(broken("snr_order", "").validate(), doctest::Contains("snr_db"),
                       ConfigError);
}

TEST_CASE("single-cell sweep is deterministic") {
  SweepConfig cfg = SweepConfig::from_json_text(kSmallConfig);
  cfg.schemes = {"alamouti"};
  cfg.nr_list = {2};
  cfg.snr_db_grid = {10.0};
  cfg.trials = 1;
  cfg.baseline = false;
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  REQUIRE(a.rows.size() == 3);  // mse, psnr_db, sinr_db
  CHECK(csv_to_string(a) == csv_to_string(b));
  for (const SweepRow& r : a.rows) CHECK(r.ci95 == 0.0);
}

TEST_CASE("sweep output is identical for 1 and 8 workers") {
  const SweepConfig cfg = SweepConfig::from_json_text(kSmallConfig);
  const SweepResult a = run_sweep(cfg, 1);
  const SweepResult b = run_sweep(cfg, 8);
  CHECK(csv_to_string(a) == csv_to_string(b));
}

TEST_CASE("fig-4 style grid shape emits one distortion row per cell") {
  SweepConfig cfg;
  cfg.schemes = {"mux", "ostbc3-r12", "ostbc3-r34"};
  cfg.nt = 3;
  cfg.nr_list = {1};
  cfg.snr_db_grid = {2.0, 6.0, 10.0};
  cfg.rho_list = {Rational::parse("1/8"), Rational::parse("5/24")};
  cfg.image_dims = ImageDims{3, 32, 32};
  cfg.trials = 2;
  cfg.master_seed = 3;
  const SweepResult result = run_sweep(cfg, 4);
  std::size_t scheme_mse_rows = 0;
  for (const SweepRow& r : result.rows) {
    if (r.metric == "mse" && r.scheme != kSeparationScheme) ++scheme_mse_rows;
  }
  CHECK(scheme_mse_rows == 2 * 3 * 3);  // rho x scheme x snr grid
  // Baseline rows accompany every (nr, rho, snr) cell.
  std::size_t capacity_rows = 0;
  for (const SweepRow& r : result.rows)
    if (r.metric == "capacity_bpcu") ++capacity_rows;
  CHECK(capacity_rows == 2 * 3);
}

TEST_CASE("csv golden header and round trip") {
  CHECK(std::string(kCsvHeader) == "scheme,nt,nr,snr_db,rho,metric,value,ci95,trials,seed");

  TempDir tmp;
  SweepResult empty;
  write_csv(empty, tmp.file("empty.csv"));
  CHECK(slurp(tmp.file("empty.csv")) == std::string(kCsvHeader) + "\n");

  SweepRow row;
  row.scheme = "alamouti";
  row.nt = 2;
  row.nr = 1;
  row.snr_db = 10.0;
  row.rho = Rational{1, 8};
  row.metric = "mse";
  row.value = 0.123456789123;
  row.ci95 = 0.000123456789;
  row.trials = 100;
  row.seed = 42;
  SweepResult one;
  one.rows.push_back(row);
  write_csv(one, tmp.file("one.csv"));
  const std::string text = slurp(tmp.file("one.csv"));
  CHECK(count_needle(text, "\n") == 2);
  CHECK(text.find("alamouti,2,1,10,1/8,mse,0.123456789,0.000123456789,100,42\n") !=
        std::string::npos);

  // write -> read -> write is byte-stable.
  const SweepResult back = read_csv(tmp.file("one.csv"));
  REQUIRE(back.rows.size() == 1);
  write_csv(back, tmp.file("two.csv"));
  CHECK(slurp(tmp.file("one.csv")) == slurp(tmp.file("two.csv")));
}

TEST_CASE("full sweep csv survives a read/write round trip") {
  TempDir tmp;
  const SweepConfig cfg = SweepConfig::from_json_text(kSmallConfig);
  const SweepResult result = run_sweep(cfg, 2);
  write_csv(result, tmp.file("sweep.csv"));
  const SweepResult back = read_csv(tmp.file("sweep.csv"));
  write_csv(back, tmp.file("sweep2.csv"));
  CHECK(slurp(tmp.file("sweep.csv")) == slurp(tmp.file("sweep2.csv")));
}

TEST_CASE("svg rendering") {
  SweepResult result;
  for (double snr : {5.0, 10.0}) {
    SweepRow r;
    r.scheme = "alamouti";
    r.nt = 2;
    r.nr = 1;
    r.snr_db = snr;
    r.rho = Rational{1, 8};
    r.metric = "mse";
    r.value = snr == 5.0 ? 0.5 : 0.2;  // decreasing
    r.trials = 10;
    result.rows.push_back(r);
  }

  const std::string svg = render_svg(result, "mse");
  CHECK(count_needle(svg, "<polyline") == 1);

  // Exactly two coordinate pairs on the polyline.
  const std::size_t p0 = svg.find("points=\"");
  REQUIRE(p0 != std::string::npos);
  const std::size_t p1 = svg.find('"', p0 + 8);
  const std::string points = svg.substr(p0 + 8, p1 - p0 - 8);
  CHECK(count_needle(points, ",") == 2);
  CHECK(count_needle(points, " ") == 1);

  // Decreasing metric means increasing rendered y (SVG y grows downward).
  double x1, y1, x2, y2;
  REQUIRE(std::sscanf(points.c_str(), "%lf,%lf %lf,%lf", &x1, &y1, &x2, &y2) == 4);
  CHECK(x2 > x1);
  CHECK(y2 > y1);

  CHECK_THROWS_AS(render_svg(result, "psnr_db"), ConfigError);
  CHECK_THROWS_WITH_AS(render_svg(result, "nope"), doctest::Contains("mse"), ConfigError);
}

TEST_CASE("mutated alamouti encoder fails the orthogonality check") {
  // Sign error in slot 2: s_B[2] = -z1* instead of +z1*.
  const BlockEncoderFn broken = [](const StmScheme& scheme, std::span<const Complex> x) {
    ComplexMatrix b = encode_block(scheme, x);
    if (scheme.kind == SchemeKind::Alamouti) b(1, 1) = -b(1, 1);
    return b;
  };
  const CheckResult good = check_ostbc_orthogonality(50, 77);
  CHECK(good.pass);
  const CheckResult bad = check_ostbc_orthogonality(50, 77, broken);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("validation fast suite passes") {
  std::ostringstream out;
  const int status = run_validation(false, out);
  INFO(out.str());
  CHECK(status == 0);
  CHECK(count_needle(out.str(), "[PASS]") == 5);
}
