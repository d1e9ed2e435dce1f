#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dtc/cluster.hpp"
#include "dtc/errors.hpp"
#include "dtc/experiment.hpp"
#include "dtc/ingest.hpp"
#include "dtc/simgen.hpp"
#include "dtc/stf.hpp"
#include "dtc/tuning.hpp"

namespace dtc::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Common {
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  std::string emit = "csv";
};

struct ConstraintArgs {
  std::vector<double> sparsity;
  bool fraction = false;
  std::vector<double> lambda;
  std::vector<std::string> tie;
  int max_iters = 20;
  double tol = 1e-4;
  int restarts = 5;
};

std::string num(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const auto& xs, char sep = ';') {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += sep;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>)
      out += num(x);
    else
      out += std::to_string(x);
  }
  return out;
}

void require_input(const std::string& path) {
  if (path.empty()) throw InvalidArgument("--input is required");
  if (!fs::exists(path)) throw InvalidArgument("input file '" + path + "' does not exist");
}

fs::path out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / name;
}

void write_text(const Common& c, const std::string& name, const std::string& text) {
  const auto path = out_path(c, name);
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void write_json(const Common& c, const std::string& name, const json& j) {
  write_text(c, name, j.dump(2) + "\n");
}

std::vector<std::vector<std::size_t>> parse_ties(const std::vector<std::string>& groups) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& g : groups) {
    std::vector<std::size_t> group;
    std::stringstream ss(g);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t v = 0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size())
        throw InvalidArgument("bad --tie-modes group '" + g + "'");
      group.push_back(v);
    }
    out.push_back(std::move(group));
  }
  return out;
}

// Expands one shared value or one value per mode.
template <typename T>
std::vector<T> per_mode(const std::vector<T>& values, std::size_t m, const char* flag) {
  if (values.size() == 1) return std::vector<T>(m, values.front());
  if (values.size() == m) return values;
  throw InvalidArgument(std::string(flag) + " takes 1 or " + std::to_string(m) + " values, got " +
                        std::to_string(values.size()));
}

std::size_t sparsity_level(double value, bool fraction, std::size_t d) {
  if (fraction) {
    if (!(value > 0.0 && value <= 1.0)) throw InvalidArgument("sparsity fractions must lie in (0, 1]");
    return static_cast<std::size_t>(std::ceil(value * static_cast<double>(d) - 1e-9));
  }
  if (!(value >= 1.0) || value != std::floor(value))
    throw InvalidArgument("absolute sparsity must be a positive integer, got " + num(value));
  return static_cast<std::size_t>(value);
}

ConstraintSpec build_spec(const ConstraintArgs& a, const Dims& dims, std::uint64_t seed) {
  ConstraintSpec spec;
  const std::size_t m = dims.size();
  if (!a.sparsity.empty()) {
    const auto vals = per_mode(a.sparsity, m, "--sparsity");
    for (std::size_t j = 0; j < m; ++j) spec.sparsity.push_back(sparsity_level(vals[j], a.fraction, dims[j]));
  }
  if (!a.lambda.empty()) spec.fusion = per_mode(a.lambda, m, "--lambda");
  spec.tied_modes = parse_ties(a.tie);
  spec.max_iters = a.max_iters;
  spec.conv_tol = a.tol;
  spec.n_restarts = a.restarts;
  spec.seed = seed;
  spec.validate(dims);
  return spec.resolved(dims);
}

json spec_json(const ConstraintSpec& s) {
  return {{"sparsity", s.sparsity},   {"fusion", s.fusion},       {"tied_modes", s.tied_modes},
          {"max_iters", s.max_iters}, {"conv_tol", s.conv_tol},   {"n_restarts", s.n_restarts},
          {"seed", s.seed}};
}

json report_json(const StfReport& r, const DenseTensor& T) {
  const double norm = frobenius_norm(T);
  return {{"iterations", r.iterations},
          {"chosen_restart", r.chosen_restart},
          {"degenerate_attempts", r.degenerate_attempts},
          {"residual_norm", r.residual_norm},
          {"relative_residual", norm > 0.0 ? r.residual_norm / norm : 0.0},
          {"objective", r.objective}};
}

void write_factors(const Common& c, const FactorSet& F) {
  std::string w;
  for (double x : F.weights) w += num(x) + "\n";
  write_text(c, "weights.csv", w);
  for (std::size_t j = 0; j < F.order(); ++j)
    write_matrix_csv(F.factors[j], out_path(c, "factor_mode" + std::to_string(j) + ".csv").string());
}

std::vector<int> read_labels(const std::string& path) {
  require_input(path);
  const Eigen::MatrixXd M = import_matrix_csv(path);
  if (M.rows() != 1 && M.cols() != 1) throw InvalidArgument("truth file must hold a single row or column");
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < M.size(); ++i) {
    const double v = M.data()[i];
    if (v != std::floor(v)) throw InvalidArgument("truth labels must be integers");
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void add_constraint_options(CLI::App* cmd, ConstraintArgs& a) {
  cmd->add_option("--sparsity", a.sparsity, "kept entries per factor: one shared value or one per mode");
  cmd->add_flag("--fraction", a.fraction, "read --sparsity as fractions of each mode length");
  cmd->add_option("--lambda", a.lambda, "fusion weight: one shared value or one per mode");
  cmd->add_option("--tie-modes", a.tie, "comma-separated group of modes sharing one factor (repeatable)");
  cmd->add_option("--max-iters", a.max_iters, "power iterations per rank")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", a.tol, "convergence tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--restarts", a.restarts, "random starts per rank")->check(CLI::PositiveNumber);
}

void add_common_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--output-dir", c.output_dir, "directory for result files");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--emit", c.emit, "table format")->check(CLI::IsMember({"csv", "json"}));
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  Common c;
  std::string input;
  std::size_t rank = 1;
  ConstraintArgs cons;
};

void cmd_decompose(const DecomposeArgs& a) {
  require_input(a.input);
  const DenseTensor T = read_tensor(a.input);
  if (a.rank < 1) throw InvalidArgument("--rank must be at least 1");
  const ConstraintSpec spec = build_spec(a.cons, T.dims(), a.c.seed);
  write_json(a.c, "config.json",
             {{"command", "decompose"}, {"input", a.input}, {"dims", T.dims()}, {"rank", a.rank},
              {"constraints", spec_json(spec)}, {"output_dir", a.c.output_dir}});

  const auto res = stf_decompose(T, a.rank, spec);
  write_factors(a.c, res.factors);
  write_json(a.c, "report.json", report_json(res.report, T));
}

// ------------------------------------------------------------------ cluster

struct ClusterArgs {
  Common c;
  std::string input;
  std::string truth;
  std::size_t rank = 2;
  int k = 2;
  int n_init = 10;
  ConstraintArgs cons;
};

void cmd_cluster(const ClusterArgs& a) {
  require_input(a.input);
  const DenseTensor T = read_tensor(a.input);
  if (T.order() < 2) throw InvalidArgument("cluster needs samples stacked along a trailing mode");
  const std::size_t n = T.dims().back();
  if (a.rank < 1) throw InvalidArgument("--rank must be at least 1");
  if (a.k < 1 || static_cast<std::size_t>(a.k) > n)
    throw InvalidArgument("--k must lie in [1, " + std::to_string(n) + "]");
  std::vector<int> truth;
  if (!a.truth.empty()) {
    truth = read_labels(a.truth);
    if (truth.size() != n)
      throw InvalidArgument("truth file has " + std::to_string(truth.size()) + " labels, tensor has " +
                            std::to_string(n) + " samples");
  }
  const ConstraintSpec spec = build_spec(a.cons, T.dims(), a.c.seed);
  write_json(a.c, "config.json",
             {{"command", "cluster"}, {"input", a.input}, {"truth", a.truth}, {"dims", T.dims()},
              {"rank", a.rank}, {"k", a.k}, {"n_init", a.n_init}, {"constraints", spec_json(spec)},
              {"output_dir", a.c.output_dir}});

  KMeansOptions ko;
  ko.n_init = a.n_init;
  ko.seed = a.c.seed;
  const auto res = dtc_stacked(T, a.k, a.rank, spec, ko);
  write_factors(a.c, res.factors);

  json metrics = {{"k", a.k}, {"within_dispersion", res.clustering.within_dispersion}};
  if (!truth.empty()) metrics["clustering_error"] = clustering_error(res.clustering.assignment, truth);
  metrics["stf"] = report_json(res.report, T);

  if (a.c.emit == "json") {
    std::vector<std::vector<double>> centers;
    for (Eigen::Index i = 0; i < res.clustering.centers.rows(); ++i) {
      centers.emplace_back();
      for (Eigen::Index j = 0; j < res.clustering.centers.cols(); ++j)
        centers.back().push_back(res.clustering.centers(i, j));
    }
    write_json(a.c, "clusters.json",
               {{"assignment", res.clustering.assignment}, {"centers", centers}, {"metrics", metrics}});
  } else {
    std::string s = "sample,cluster\n";
    for (std::size_t i = 0; i < res.clustering.assignment.size(); ++i)
      s += std::to_string(i + 1) + "," + std::to_string(res.clustering.assignment[i]) + "\n";
    write_text(a.c, "assignment.csv", s);
    write_matrix_csv(res.clustering.centers, out_path(a.c, "centers.csv").string());
    std::string mcsv = "metric,value\nwithin_dispersion," + num(res.clustering.within_dispersion) + "\n";
    if (!truth.empty()) mcsv += "clustering_error," + num(metrics["clustering_error"].get<double>()) + "\n";
    write_text(a.c, "metrics.csv", mcsv);
  }
  if (!truth.empty())
    std::cout << "clustering_error " << num(metrics["clustering_error"].get<double>()) << "\n";
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  Common c;
  std::string design = "3d";
  std::size_t d = 20;
  std::size_t n = 50;
  double mu = 0.8;
  std::string cov = "identity";
  double rho = 0.0;
  std::vector<double> ratios;
  std::size_t rank = 2;
  int k = 4;
  int reps = 20;
  int restarts = 1;
  std::vector<double> grid_sparsity;
  std::vector<double> grid_lambda;
  bool save_data = false;
};

void cmd_simulate(const SimulateArgs& a) {
  ReplicationConfig cfg;
  cfg.design = a.design;
  cfg.d = a.d;
  cfg.n = a.n;
  cfg.mu = a.mu;
  cfg.cov = {parse_cov_kind(a.cov), a.rho, a.d};
  make_cov(cfg.cov);  // validates rho
  cfg.ratios = a.ratios;
  cfg.rank = a.rank;
  cfg.k = a.k;
  cfg.base.n_restarts = a.restarts;
  if (!a.grid_sparsity.empty()) cfg.grid.sparsity = a.grid_sparsity;
  if (!a.grid_lambda.empty()) cfg.grid.lambdas = a.grid_lambda;
  if (a.reps < 1) throw InvalidArgument("--reps must be at least 1");
  if (a.restarts < 1) throw InvalidArgument("--restarts must be at least 1");
  const SimDataset probe = make_dataset(cfg, a.c.seed);  // validates the design up front
  cfg.grid.validate(probe.stacked.dims());

  write_json(a.c, "config.json",
             {{"command", "simulate"}, {"design", cfg.design}, {"d", cfg.d}, {"n", cfg.n}, {"mu", cfg.mu},
              {"cov", to_string(cfg.cov.kind)}, {"rho", cfg.cov.rho},
              {"cluster_sizes", probe.design.cluster_sizes}, {"rank", cfg.rank}, {"k", cfg.k},
              {"reps", a.reps}, {"seed", a.c.seed}, {"restarts", cfg.base.n_restarts},
              {"grid_sparsity", cfg.grid.sparsity}, {"grid_lambda", cfg.grid.lambdas},
              {"replication_seeds", "seed + i"}, {"output_dir", a.c.output_dir}});

  const auto results = run_replications(cfg, a.reps, a.c.seed);
  std::vector<double> rec, clu, secs;
  for (const auto& r : results) {
    rec.push_back(r.recovery_error);
    clu.push_back(r.clustering_error);
    secs.push_back(r.seconds);
  }
  const MeanSe mr = mean_se(rec), mc = mean_se(clu), mt = mean_se(secs);

  if (a.c.emit == "json") {
    json reps = json::array();
    for (std::size_t i = 0; i < results.size(); ++i)
      reps.push_back({{"rep", i + 1}, {"seed", results[i].seed},
                      {"recovery_error", results[i].recovery_error},
                      {"clustering_error", results[i].clustering_error},
                      {"sparsity", results[i].sparsity}, {"lambda", results[i].lambda}});
    write_json(a.c, "results.json",
               {{"replications", reps},
                {"summary",
                 {{"recovery_error", {{"mean", mr.mean}, {"se", mr.se}}},
                  {"clustering_error", {{"mean", mc.mean}, {"se", mc.se}}}}}});
    write_json(a.c, "timing.json", {{"seconds", secs}, {"mean", mt.mean}, {"se", mt.se}});
  } else {
    std::string s = "rep,seed,recovery_error,clustering_error,sparsity,lambda\n";
    for (std::size_t i = 0; i < results.size(); ++i)
      s += std::to_string(i + 1) + "," + std::to_string(results[i].seed) + "," +
           num(results[i].recovery_error) + "," + num(results[i].clustering_error) + "," +
           std::to_string(results[i].sparsity) + "," + num(results[i].lambda) + "\n";
    write_text(a.c, "replications.csv", s);
    write_text(a.c, "summary.csv",
               "metric,mean,se\nrecovery_error," + num(mr.mean) + "," + num(mr.se) +
                   "\nclustering_error," + num(mc.mean) + "," + num(mc.se) + "\n");
    std::string t = "rep,seconds\n";
    for (std::size_t i = 0; i < secs.size(); ++i) t += std::to_string(i + 1) + "," + num(secs[i]) + "\n";
    t += "mean," + num(mt.mean) + "\nse," + num(mt.se) + "\n";
    write_text(a.c, "timing.csv", t);
  }
  if (a.save_data)
    for (int i = 0; i < a.reps; ++i) {
      const auto ds = make_dataset(cfg, a.c.seed + static_cast<std::uint64_t>(i));
      const std::string tag = "rep" + std::to_string(i + 1);
      write_tensor(ds.stacked, out_path(a.c, tag + "_tensor.dtns").string());
      std::string lab;
      for (int l : ds.truth_assignment) lab += std::to_string(l) + "\n";
      write_text(a.c, tag + "_truth.csv", lab);
    }
  std::cout << "recovery_error " << num(mr.mean) << " (" << num(mr.se) << ")\n"
            << "clustering_error " << num(mc.mean) << " (" << num(mc.se) << ")\n";
}

// --------------------------------------------------------------------- tune

struct TuneArgs {
  Common c;
  std::string input;
  std::vector<std::size_t> ranks{1};
  std::vector<double> sparsity{1.0};
  std::vector<double> lambdas{0.0};
  bool absolute = false;
  bool per_mode = false;
  std::vector<std::size_t> sparse_modes;
  std::vector<std::size_t> fused_modes;
  std::vector<std::string> tie;
  int restarts = 5;
  int kmax = 10;
  int gap_b = 50;
};

void cmd_tune(const TuneArgs& a) {
  require_input(a.input);
  const DenseTensor T = read_tensor(a.input);
  TuneGrid grid;
  grid.ranks = a.ranks;
  grid.sparsity = a.sparsity;
  grid.lambdas = a.lambdas;
  grid.sparsity_is_fraction = !a.absolute;
  grid.shared = !a.per_mode;
  if (!a.sparse_modes.empty()) grid.sparse_modes = a.sparse_modes;
  if (!a.fused_modes.empty()) grid.fused_modes = a.fused_modes;
  grid.validate(T.dims());
  ConstraintSpec base;
  base.tied_modes = parse_ties(a.tie);
  base.n_restarts = a.restarts;
  base.seed = a.c.seed;
  base.validate(T.dims());
  const std::size_t n = T.dims().back();
  if (a.kmax < 1 || static_cast<std::size_t>(a.kmax) > n)
    throw InvalidArgument("--kmax must lie in [1, " + std::to_string(n) + "]");
  if (a.gap_b < 1) throw InvalidArgument("--gap-b must be at least 1");
  write_json(a.c, "config.json",
             {{"command", "tune"}, {"input", a.input}, {"dims", T.dims()}, {"ranks", grid.ranks},
              {"sparsity", grid.sparsity}, {"lambdas", grid.lambdas},
              {"sparsity_is_fraction", grid.sparsity_is_fraction}, {"shared", grid.shared},
              {"sparse_modes", a.sparse_modes}, {"fused_modes", a.fused_modes},
              {"tied_modes", base.tied_modes}, {"restarts", base.n_restarts}, {"seed", a.c.seed},
              {"kmax", a.kmax}, {"gap_b", a.gap_b}, {"output_dir", a.c.output_dir}});

  const auto sel = select_model(T, grid, base);
  KMeansOptions ko;
  ko.seed = a.c.seed;
  const auto gap = gap_statistic(sel.best_factors.factors.back(), a.kmax, a.gap_b, a.c.seed, ko);
  const auto& best = sel.best_score().point;

  json choice = {{"rank", best.rank},          {"sparsity_value", best.sparsity_value},
                 {"lambda_value", best.lambda_value}, {"sparsity", best.sparsity},
                 {"fusion", best.fusion},      {"bic", sel.best_score().bic},
                 {"k", gap.chosen_k}};
  write_json(a.c, "choice.json", choice);

  if (a.c.emit == "json") {
    json rows = json::array();
    for (const auto& s : sel.scores)
      rows.push_back({{"rank", s.point.rank}, {"sparsity", s.point.sparsity_value},
                      {"lambda", s.point.lambda_value}, {"bic", s.degenerate ? json(nullptr) : json(s.bic)},
                      {"rss", s.rss}, {"df", s.df}, {"degenerate", s.degenerate}});
    json g = json::array();
    for (std::size_t k = 0; k < gap.gap.size(); ++k)
      g.push_back({{"k", k + 1}, {"gap", gap.gap[k]}, {"se", gap.se[k]}, {"log_w", gap.log_w[k]}});
    write_json(a.c, "tune.json", {{"bic_grid", rows}, {"gap", g}});
  } else {
    std::string s = "rank,sparsity,lambda,bic,rss,df,degenerate\n";
    for (const auto& sc : sel.scores)
      s += std::to_string(sc.point.rank) + "," + join(sc.point.sparsity_value) + "," +
           join(sc.point.lambda_value) + "," + num(sc.bic) + "," + num(sc.rss) + "," +
           std::to_string(sc.df) + "," + (sc.degenerate ? "1" : "0") + "\n";
    write_text(a.c, "bic_grid.csv", s);
    std::string g = "k,gap,se,log_w\n";
    for (std::size_t k = 0; k < gap.gap.size(); ++k)
      g += std::to_string(k + 1) + "," + num(gap.gap[k]) + "," + num(gap.se[k]) + "," +
           num(gap.log_w[k]) + "\n";
    write_text(a.c, "gap.csv", g);
  }
  std::cout << "rank " << best.rank << " sparsity " << join(best.sparsity_value) << " lambda "
            << join(best.lambda_value) << " k " << gap.chosen_k << "\n";
}

// ------------------------------------------------------------------ connect

struct ConnectArgs {
  Common c;
  std::string input;
  std::size_t width = 20;
  std::size_t step = 1;
  std::size_t rank = 0;
  int k = 0;
  double sparsity = 1.0;
  double lambda = 0.0;
  int restarts = 5;
};

void cmd_connect(const ConnectArgs& a) {
  require_input(a.input);
  const Eigen::MatrixXd series = import_matrix_csv(a.input);
  const WindowSpec ws{a.width, a.step};
  const std::size_t t = ws.window_count(static_cast<std::size_t>(series.cols()));
  const auto p = static_cast<std::size_t>(series.rows());
  if (series.rows() < 2) throw InvalidArgument("connect needs at least two series");
  if (a.k > 0 && a.rank == 0) throw InvalidArgument("--k needs --rank >= 1");
  if (a.k < 0 || static_cast<std::size_t>(a.k) > t)
    throw InvalidArgument("--k must lie in [0, " + std::to_string(t) + "]");

  ConstraintSpec spec;
  const Dims dims{p, p, t};
  if (a.rank > 0) {
    const std::size_t s = sparsity_level(a.sparsity, a.sparsity <= 1.0, p);
    spec.sparsity = {s, s, t};
    spec.fusion = {0.0, 0.0, a.lambda};
    spec.tied_modes = {{0, 1}};
    spec.n_restarts = a.restarts;
    spec.seed = a.c.seed;
    spec.validate(dims);
  }
  write_json(a.c, "config.json",
             {{"command", "connect"}, {"input", a.input}, {"series", p}, {"length", series.cols()},
              {"width", ws.width}, {"step", ws.step}, {"windows", t}, {"rank", a.rank}, {"k", a.k},
              {"constraints", a.rank > 0 ? spec_json(spec) : json(nullptr)}, {"output_dir", a.c.output_dir}});

  const auto corr = sliding_corr(series, ws);
  if (corr.zero_variance)
    std::cerr << "warning: a series is constant within some window; its correlations there are set to 0\n";
  write_tensor(corr.tensor, out_path(a.c, "correlation.dtns").string());
  json report = {{"windows", t}, {"zero_variance", corr.zero_variance}};
  if (a.rank > 0) {
    KMeansOptions ko;
    ko.seed = a.c.seed;
    if (a.k > 0) {
      const auto res = dtc_stacked(corr.tensor, a.k, a.rank, spec, ko, 2);
      write_factors(a.c, res.factors);
      report["stf"] = report_json(res.report, corr.tensor);
      report["assignment"] = res.clustering.assignment;
      std::string s = "window,cluster\n";
      for (std::size_t i = 0; i < res.clustering.assignment.size(); ++i)
        s += std::to_string(i + 1) + "," + std::to_string(res.clustering.assignment[i]) + "\n";
      if (a.c.emit == "csv") write_text(a.c, "assignment.csv", s);
    } else {
      const auto res = stf_decompose(corr.tensor, a.rank, spec);
      write_factors(a.c, res.factors);
      report["stf"] = report_json(res.report, corr.tensor);
    }
  }
  write_json(a.c, "report.json", report);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Dynamic tensor clustering: structured factorization, clustering, tuning, simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dtc 1.0.0");

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "structured CP factorization of a tensor file");
  add_common_options(c_dec, dec.c);
  c_dec->add_option("--input", dec.input, "tensor file");
  c_dec->add_option("--rank", dec.rank, "number of components");
  add_constraint_options(c_dec, dec.cons);

  ClusterArgs clu;
  auto* c_clu = app.add_subcommand("cluster", "factorize stacked samples and cluster the last mode");
  add_common_options(c_clu, clu.c);
  c_clu->add_option("--input", clu.input, "tensor file with samples along the last mode");
  c_clu->add_option("--truth", clu.truth, "CSV of true labels (optional)");
  c_clu->add_option("--rank", clu.rank, "number of components");
  c_clu->add_option("--k", clu.k, "number of clusters");
  c_clu->add_option("--n-init", clu.n_init, "K-means restarts")->check(CLI::PositiveNumber);
  add_constraint_options(c_clu, clu.cons);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "seeded replications of a synthetic design");
  add_common_options(c_sim, sim.c);
  c_sim->add_option("--design", sim.design, "2d or 3d")->check(CLI::IsMember({"2d", "3d"}));
  c_sim->add_option("--d", sim.d, "feature dimension");
  c_sim->add_option("--n", sim.n, "number of samples");
  c_sim->add_option("--mu", sim.mu, "signal level");
  c_sim->add_option("--cov", sim.cov, "2d noise covariance: identity, ar or exchangeable");
  c_sim->add_option("--rho", sim.rho, "covariance parameter in [0, 1)");
  c_sim->add_option("--ratios", sim.ratios, "relative cluster sizes (four values)");
  c_sim->add_option("--rank", sim.rank, "number of components");
  c_sim->add_option("--k", sim.k, "number of clusters");
  c_sim->add_option("--reps", sim.reps, "number of replications");
  c_sim->add_option("--restarts", sim.restarts, "random starts per rank");
  c_sim->add_option("--grid-sparsity", sim.grid_sparsity, "candidate sparsity fractions");
  c_sim->add_option("--grid-lambda", sim.grid_lambda, "candidate fusion weights");
  c_sim->add_flag("--save-data", sim.save_data, "also write each replication's tensor and labels");

  TuneArgs tun;
  auto* c_tun = app.add_subcommand("tune", "BIC grid search, then gap statistic for K");
  add_common_options(c_tun, tun.c);
  c_tun->add_option("--input", tun.input, "tensor file with samples along the last mode");
  c_tun->add_option("--rank", tun.ranks, "candidate ranks");
  c_tun->add_option("--sparsity", tun.sparsity, "candidate sparsity levels");
  c_tun->add_option("--lambda", tun.lambdas, "candidate fusion weights");
  c_tun->add_flag("--absolute", tun.absolute, "sparsity candidates are counts, not fractions");
  c_tun->add_flag("--per-mode", tun.per_mode, "try every per-mode combination");
  c_tun->add_option("--sparse-modes", tun.sparse_modes, "modes receiving sparsity (default: all)");
  c_tun->add_option("--fused-modes", tun.fused_modes, "modes receiving fusion (default: all)");
  c_tun->add_option("--tie-modes", tun.tie, "comma-separated group of tied modes (repeatable)");
  c_tun->add_option("--restarts", tun.restarts, "random starts per rank");
  c_tun->add_option("--kmax", tun.kmax, "largest K for the gap statistic");
  c_tun->add_option("--gap-b", tun.gap_b, "reference data sets for the gap statistic");

  ConnectArgs con;
  auto* c_con = app.add_subcommand("connect", "sliding-window correlation tensor, optional clustering of windows");
  add_common_options(c_con, con.c);
  c_con->add_option("--input", con.input, "CSV, one row per series");
  c_con->add_option("--width", con.width, "window width");
  c_con->add_option("--step", con.step, "window step");
  c_con->add_option("--rank", con.rank, "components of the tied decomposition (0: none)");
  c_con->add_option("--k", con.k, "clusters of time windows (0: none)");
  c_con->add_option("--sparsity", con.sparsity, "kept entries on the region modes (fraction if <= 1)");
  c_con->add_option("--lambda", con.lambda, "fusion weight on the time mode");
  c_con->add_option("--restarts", con.restarts, "random starts per rank");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (c_dec->parsed()) cmd_decompose(dec);
    if (c_clu->parsed()) cmd_cluster(clu);
    if (c_sim->parsed()) cmd_simulate(sim);
    if (c_tun->parsed()) cmd_tune(tun);
    if (c_con->parsed()) cmd_connect(con);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace dtc::cli
