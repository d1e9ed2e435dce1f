#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "dtc/ingest.hpp"
#include "dtc/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("DTC_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "dtc_cli_test";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "dtc");
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Outcome o;
  o.code = dtc::cli::run(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_labels(const std::vector<int>& labels, const fs::path& p) {
  std::ofstream f(p);
  for (int l : labels) f << l << "\n";
}

}  // namespace

TEST_CASE("decompose") {
  const auto dir = scratch("decompose");
  dtc::FactorSet F;
  F.weights = {4.0};
  F.factors = {Eigen::VectorXd::Constant(3, 1.0 / std::sqrt(3.0)), Eigen::VectorXd::Unit(4, 1),
               Eigen::VectorXd::Constant(5, -1.0 / std::sqrt(5.0))};
  const auto T = dtc::cp_reconstruct(F, dtc::Dims{3, 4, 5});
  const auto input = (dir / "t.dtns").string();
  dtc::write_tensor(T, input);

  const auto ok = run({"decompose", "--input", input, "--rank", "1", "--output-dir", (dir / "out").string()});
  REQUIRE(ok.code == 0);
  const auto report = read_json(dir / "out" / "report.json");
  CHECK(report["residual_norm"].get<double>() <= 1e-6);
  CHECK(fs::exists(dir / "out" / "config.json"));
  CHECK(fs::exists(dir / "out" / "factor_mode2.csv"));
  const auto w = dtc::import_matrix_csv((dir / "out" / "weights.csv").string());
  CHECK(std::abs(w(0, 0)) == doctest::Approx(4.0).epsilon(1e-9));

  const auto missing = (dir / "nope.dtns").string();
  const auto m = run({"decompose", "--input", missing, "--output-dir", (dir / "out2").string()});
  CHECK(m.code == 2);
  CHECK(m.err.find(missing) != std::string::npos);

  const auto big = run({"decompose", "--input", input, "--sparsity", "6", "--output-dir", (dir / "out3").string()});
  CHECK(big.code == 2);

  const auto wrong_count = run({"decompose", "--input", input, "--lambda", "0.1", "0.2"});
  CHECK(wrong_count.code == 2);

  CHECK(run({"decompose", "--rank", "x"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  // a file that is not a tensor is a runtime failure
  {
    std::ofstream f(dir / "junk.dtns");
    f << "not a tensor";
  }
  CHECK(run({"decompose", "--input", (dir / "junk.dtns").string(), "--output-dir", (dir / "out4").string()}).code == 1);
}

TEST_CASE("cluster") {
  const auto dir = scratch("cluster");
  const auto ds = dtc::gen_3d(40, 20, 0.8, {}, 11);
  const auto input = (dir / "t.dtns").string();
  dtc::write_tensor(ds.stacked, input);
  write_labels(ds.truth_assignment, dir / "truth.csv");

  const auto one = run({"cluster", "--input", input, "--rank", "2", "--k", "1", "--output-dir", (dir / "k1").string()});
  REQUIRE(one.code == 0);
  const auto a1 = dtc::import_matrix_csv((dir / "k1" / "assignment.csv").string());
  CHECK(a1.rows() == 40);
  CHECK((a1.col(1).array() == 1.0).all());

  const auto four = run({"cluster", "--input", input, "--truth", (dir / "truth.csv").string(), "--rank", "2",
                         "--k", "4", "--sparsity", "0.5", "0.5", "0.5", "1", "--fraction", "--output-dir", (dir / "k4").string()});
  REQUIRE(four.code == 0);
  CHECK(four.out.find("clustering_error 0\n") != std::string::npos);
  CHECK(slurp(dir / "k4" / "metrics.csv").find("clustering_error,0\n") != std::string::npos);

  write_labels(std::vector<int>(39, 1), dir / "short.csv");
  const auto bad = run({"cluster", "--input", input, "--truth", (dir / "short.csv").string(), "--k", "2",
                        "--output-dir", (dir / "bad").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("39") != std::string::npos);

  CHECK(run({"cluster", "--input", input, "--k", "41", "--output-dir", (dir / "bad2").string()}).code == 2);

  const auto js = run({"cluster", "--input", input, "--rank", "2", "--k", "4", "--emit", "json",
                       "--output-dir", (dir / "json").string()});
  REQUIRE(js.code == 0);
  const auto cj = read_json(dir / "json" / "clusters.json");
  CHECK(cj["assignment"].size() == 40);
  CHECK(cj["centers"].size() == 4);
}

TEST_CASE("simulate") {
  const auto dir = scratch("simulate");
  const std::vector<std::string> base{"simulate", "--design", "2d", "--d", "8", "--n", "20", "--mu", "2",
                                      "--reps", "1", "--grid-sparsity", "0.5", "1", "--grid-lambda", "0",
                                      "--seed", "5"};
  auto a = base;
  a.insert(a.end(), {"--output-dir", (dir / "a").string(), "--save-data"});
  auto b = base;
  b.insert(b.end(), {"--output-dir", (dir / "b").string()});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);

  const auto summary = slurp(dir / "a" / "summary.csv");
  CHECK(summary.rfind("metric,mean,se\n", 0) == 0);
  CHECK(summary.find(",NaN\n") != std::string::npos);
  CHECK(slurp(dir / "a" / "replications.csv") == slurp(dir / "b" / "replications.csv"));
  CHECK(summary == slurp(dir / "b" / "summary.csv"));
  CHECK(fs::exists(dir / "a" / "timing.csv"));
  CHECK(fs::exists(dir / "a" / "rep1_tensor.dtns"));
  CHECK(dtc::read_tensor((dir / "a" / "rep1_tensor.dtns").string()).dims() == dtc::Dims{8, 8, 20});

  CHECK(run({"simulate", "--design", "2d", "--d", "7", "--output-dir", (dir / "c").string()}).code == 2);
  CHECK(run({"simulate", "--rho", "1.0", "--cov", "ar", "--output-dir", (dir / "c").string()}).code == 2);
  CHECK(run({"simulate", "--design", "4d"}).code == 2);
}

TEST_CASE("tune") {
  const auto dir = scratch("tune");
  const auto ds = dtc::gen_3d(40, 20, 0.8, {}, 13);
  const auto input = (dir / "t.dtns").string();
  dtc::write_tensor(ds.stacked, input);

  const auto single = run({"tune", "--input", input, "--rank", "2", "--sparsity", "0.5", "--sparse-modes", "0", "1", "2", "--lambda", "0",
                           "--kmax", "6", "--gap-b", "20", "--restarts", "1", "--output-dir", (dir / "a").string()});
  REQUIRE(single.code == 0);
  const auto choice = read_json(dir / "a" / "choice.json");
  CHECK(choice["rank"] == 2);
  CHECK(choice["sparsity"] == json::array({10, 10, 10, 40}));
  CHECK(fs::exists(dir / "a" / "bic_grid.csv"));
  // the reported K follows the selection rule on the emitted gap curve
  const auto gap = dtc::import_matrix_csv((dir / "a" / "gap.csv").string());
  REQUIRE(gap.rows() == 6);
  int want = 6;
  for (Eigen::Index k = 0; k + 1 < gap.rows(); ++k)
    if (gap(k, 1) >= gap(k + 1, 1) - gap(k + 1, 2)) {
      want = static_cast<int>(k) + 1;
      break;
    }
  CHECK(choice["k"] == want);

  const auto k1 = run({"tune", "--input", input, "--rank", "2", "--kmax", "1", "--restarts", "1",
                       "--output-dir", (dir / "b").string()});
  REQUIRE(k1.code == 0);
  CHECK(read_json(dir / "b" / "choice.json")["k"] == 1);

  CHECK(run({"tune", "--input", input, "--kmax", "41", "--output-dir", (dir / "c").string()}).code == 2);
  CHECK(run({"tune", "--input", input, "--sparsity", "1.5", "--output-dir", (dir / "c").string()}).code == 2);
}

TEST_CASE("connect") {
  const auto dir = scratch("connect");
  // six series; the first half is driven by two shared signals on {0,1,2} and
  // {3,4,5}, the second half by three signals on {0,3}, {1,4}, {2,5}
  const Eigen::Index p = 6, len = 200;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  Eigen::MatrixXd S(p, len);
  for (Eigen::Index t = 0; t < len; ++t) {
    double z[3] = {g(rng), g(rng), g(rng)};
    for (Eigen::Index i = 0; i < p; ++i) {
      const double shared = t < len / 2 ? z[i / 3] : z[i % 3];
      S(i, t) = 2.0 * shared + 0.5 * g(rng);
    }
  }
  const auto csv = (dir / "series.csv").string();
  dtc::write_matrix_csv(S, csv);

  const auto r = run({"connect", "--input", csv, "--width", "20", "--step", "5", "--rank", "2", "--k", "2",
                      "--output-dir", (dir / "a").string()});
  REQUIRE(r.code == 0);
  const auto C = dtc::read_tensor((dir / "a" / "correlation.dtns").string());
  CHECK(C.dims() == dtc::Dims{6, 6, 37});
  const auto A = dtc::import_matrix_csv((dir / "a" / "assignment.csv").string());
  REQUIRE(A.rows() == 37);
  // windows 0..16 end by t = 99, windows 20.. start at t >= 100
  const double first = A(0, 1);
  for (Eigen::Index w = 0; w <= 16; ++w) CHECK(A(w, 1) == first);
  for (Eigen::Index w = 20; w < 37; ++w) CHECK(A(w, 1) != first);

  CHECK(run({"connect", "--input", csv, "--width", "201", "--output-dir", (dir / "b").string()}).code == 2);

  Eigen::MatrixXd flat = S.topRows(3);
  flat.row(2).setConstant(1.0);
  const auto flat_csv = (dir / "flat.csv").string();
  dtc::write_matrix_csv(flat, flat_csv);
  const auto w = run({"connect", "--input", flat_csv, "--width", "20", "--step", "10", "--output-dir",
                      (dir / "c").string()});
  CHECK(w.code == 0);
  CHECK(w.err.find("warning:") != std::string::npos);
  CHECK(read_json(dir / "c" / "report.json")["zero_variance"] == true);
}
