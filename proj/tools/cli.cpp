#include "cli.hpp"

#include "ticc/error.hpp"
#include "ticc/metrics.hpp"
#include "ticc/random.hpp"
#include "ticc/serialization.hpp"
#include "ticc/synth.hpp"
#include "ticc/ticc.hpp"
#include "ticc/version.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ticc::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_output_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path)) {
    throw Error(ErrorCode::io_error, "cannot create output directory '" + dir + "'");
  }
  return path;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  return out;
}

// Shortest decimal that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json manifest_base(std::string_view command, std::uint64_t seed) {
  return json{{"tool", "ticc"},
              {"version", kVersion},
              {"command", command},
              {"prng", kPrngName},
              {"seed", seed}};
}

struct GenerateOptions {
  std::string preset = "1,2,1";
  std::string segments;
  Index sensors = 5;
  Index window = 5;
  double p_edge = 0.2;
  Index samples_per_segment = 0;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

// "0:100,1:100,0:100" -> [{0, 100}, {1, 100}, {0, 100}]
std::vector<Segment> parse_segments(const std::string& text) {
  std::vector<Segment> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
      std::size_t used = 0;
      const int cluster = std::stoi(item.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("trailing characters");
      const std::string rest = item.substr(colon + 1);
      const long long length = std::stoll(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing characters");
      out.push_back({cluster, static_cast<Index>(length)});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_argument,
                  "bad segment '" + item + "'; expected cluster:length");
    }
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty segment list");
  return out;
}

GroundTruth generate_truth(const GenerateOptions& opt) {
  if (!opt.segments.empty()) {
    return generate_segments(parse_segments(opt.segments), opt.sensors, opt.window, opt.p_edge,
                             opt.seed);
  }
  return generate_preset(find_preset(opt.preset), opt.sensors, opt.window, opt.p_edge, opt.seed,
                         opt.samples_per_segment);
}

void run_generate(const GenerateOptions& opt, std::ostream& out) {
  const GroundTruth gt = generate_truth(opt);
  const json source = opt.segments.empty()
                          ? json{{"preset", opt.preset}, {"samples_per_segment", opt.samples_per_segment}}
                          : json{{"segments", opt.segments}};
  const fs::path dir = prepare_output_dir(opt.output_dir);

  write_csv(gt.series, dir / "series.csv");
  json segments = json::array();
  for (const Segment& s : gt.segments) segments.push_back({{"cluster", s.cluster}, {"length", s.length}});
  write_json({{"num_clusters", gt.thetas.size()}, {"labels", gt.labels}, {"segments", segments}},
             dir / "truth_labels.json");
  write_json({{"thetas", gt.thetas}}, dir / "truth_thetas.json");

  json manifest = manifest_base("generate", opt.seed);
  manifest["config"] = {{"source", source},
                        {"n", opt.sensors},
                        {"w", opt.window},
                        {"p_edge", opt.p_edge}};
  manifest["outputs"] = {"series.csv", "truth_labels.json", "truth_thetas.json"};
  write_json(manifest, dir / "manifest.json");
  out << "wrote " << gt.series.length() << " rows, " << gt.thetas.size() << " clusters to "
      << dir.string() << "\n";
}

struct FitOptions {
  std::string input;
  bool header = false;
  std::string output_dir = ".";
  TiccConfig config;
  bool debug_trace = false;
};

void write_assignment(const AssignmentPath& path, const fs::path& file) {
  std::ofstream out = open_for_write(file);
  out << "t,label\n";
  for (std::size_t t = 0; t < path.labels.size(); ++t) out << t << ',' << path.labels[t] << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failure on '" + file.string() + "'");
}

void run_fit(const FitOptions& opt, std::ostream& out) {
  const auto start = Clock::now();
  const TimeSeries series = load_csv(opt.input, opt.header);
  const double load_s = seconds_since(start);
  const fs::path dir = prepare_output_dir(opt.output_dir);

  std::optional<std::ofstream> trace_file;
  FitTraceSink sink;
  if (opt.debug_trace) {
    trace_file.emplace(open_for_write(dir / "admm_trace.csv"));
    *trace_file << "em_iter,cluster,iter,primal_res,dual_res,eps_primal,eps_dual,objective,"
                   "stationarity\n";
    sink = [&](int em_iter, int cluster, const AdmmTraceRow& r) {
      *trace_file << em_iter << ',' << cluster << ',' << r.iter << ',' << num(r.primal_res) << ','
                  << num(r.dual_res) << ',' << num(r.eps_primal) << ',' << num(r.eps_dual) << ','
                  << num(r.objective) << ',' << num(r.stationarity) << '\n';
    };
  }

  const auto fit_start = Clock::now();
  const TiccModel model = fit(series, opt.config, sink);
  const double fit_s = seconds_since(fit_start);

  write_json(model_to_json(model, opt.config), dir / "model.json");
  write_assignment(model.assignment, dir / "assignment.csv");

  const PhaseTimings& t = model.diagnostics.timings;
  json manifest = manifest_base("fit", opt.config.seed);
  manifest["config"] = opt.config;
  manifest["inputs"] = {{"series", opt.input}, {"header", opt.header}};
  json outputs = {"model.json", "assignment.csv"};
  if (opt.debug_trace) outputs.push_back("admm_trace.csv");
  manifest["outputs"] = outputs;
  manifest["timings"] = {{"load_s", load_s},
                         {"fit_s", fit_s},
                         {"cost_build_s", t.cost_build},
                         {"dp_s", t.dp},
                         {"admm_s", t.admm},
                         {"total_s", seconds_since(start)}};
  manifest["result"] = {{"em_iters_run", model.em_iters_run},
                        {"converged", model.converged},
                        {"num_switches", model.assignment.num_switches},
                        {"empty_cluster_repairs", model.diagnostics.empty_cluster_repairs},
                        {"repaired_after", model.diagnostics.repaired_after},
                        {"glasso_nonconverged", model.diagnostics.glasso_nonconverged},
                        {"warnings", model.diagnostics.warnings}};
  write_json(manifest, dir / "manifest.json");
  out << "fit K=" << model.num_clusters() << " in " << model.em_iters_run << " EM iterations ("
      << (model.converged ? "converged" : "not converged") << "), wrote " << dir.string() << "\n";
}

struct Truth {
  std::vector<int> labels;
  std::vector<BlockToeplitzMatrix> thetas;
  int num_clusters = 0;
};

Truth load_truth(const fs::path& dir) {
  Truth truth;
  const json labels = read_json(dir / "truth_labels.json");
  const json thetas = read_json(dir / "truth_thetas.json");
  try {
    truth.labels = labels.at("labels").get<std::vector<int>>();
    truth.num_clusters = labels.at("num_clusters").get<int>();
    for (const json& t : thetas.at("thetas")) truth.thetas.push_back(toeplitz_from_json(t));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed truth files: ") + e.what());
  }
  if (static_cast<int>(truth.thetas.size()) != truth.num_clusters) {
    throw Error(ErrorCode::parse_error, "truth files disagree on the number of clusters");
  }
  return truth;
}

struct EvaluateOptions {
  std::string input;
  std::string truth_dir;
  std::string output_dir = ".";
};

void run_evaluate(const EvaluateOptions& opt, std::ostream& out) {
  const TiccModel model = model_from_json(read_json(opt.input));
  const Truth truth = load_truth(opt.truth_dir);
  if (model.num_clusters() != truth.num_clusters) {
    throw Error(ErrorCode::dimension_mismatch,
                "model has K = " + std::to_string(model.num_clusters()) + " but truth has K = " +
                    std::to_string(truth.num_clusters));
  }
  const MatchResult match = macro_f1(model.assignment.labels, truth.labels, truth.num_clusters);
  std::vector<BlockToeplitzMatrix> estimated;
  for (const ClusterModel& c : model.clusters) estimated.push_back(c.theta);
  const double network = network_f1(estimated, truth.thetas, match.permutation);

  const fs::path dir = prepare_output_dir(opt.output_dir);
  json scores = match;
  scores["network_f1"] = network;
  write_json(scores, dir / "scores.json");

  json manifest = manifest_base("evaluate", 0);
  manifest["inputs"] = {{"model", opt.input}, {"truth_dir", opt.truth_dir}};
  manifest["outputs"] = {"scores.json"};
  write_json(manifest, dir / "manifest.json");
  out << "macro_f1 " << match.macro_f1 << " network_f1 " << network << "\n";
}

struct SweepOptions {
  FitOptions base;
  std::string param = "K";
  std::string values;
  std::string range;
  std::string truth_dir;
};

std::vector<double> sweep_values(const SweepOptions& opt) {
  if (opt.values.empty() == opt.range.empty()) {
    throw Error(ErrorCode::invalid_argument, "give exactly one of --values or --range");
  }
  auto number = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_argument, "bad sweep value '" + s + "'");
    }
  };
  std::vector<double> out;
  if (!opt.values.empty()) {
    std::stringstream in(opt.values);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(number(item));
  } else {
    std::vector<double> parts;
    std::stringstream in(opt.range);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(number(item));
    if (parts.size() < 2 || parts.size() > 3) {
      throw Error(ErrorCode::invalid_argument, "range must be lo:hi or lo:hi:step");
    }
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (step <= 0.0) throw Error(ErrorCode::invalid_argument, "range step must be positive");
    for (double v = parts[0]; v <= parts[1] + 1e-9 * step; v += step) out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty sweep range");
  if (opt.param == "K" || opt.param == "w") {
    for (const double v : out) {
      if (v < 1.0 || v != std::floor(v)) {
        throw Error(ErrorCode::invalid_argument, opt.param + " values must be positive integers");
      }
    }
  } else if (opt.param != "beta") {
    throw Error(ErrorCode::invalid_argument, "sweep parameter must be K, beta or w");
  }
  return out;
}

void run_sweep(const SweepOptions& opt, std::ostream& out) {
  const std::vector<double> values = sweep_values(opt);
  const TimeSeries series = load_csv(opt.base.input, opt.base.header);
  std::optional<Truth> truth;
  if (!opt.truth_dir.empty()) truth = load_truth(opt.truth_dir);
  const fs::path dir = prepare_output_dir(opt.base.output_dir);

  std::ofstream csv = open_for_write(dir / "sweep.csv");
  csv << "param,value,bic,macro_f1,num_switches,em_iters,converged,runtime_s\n";
  json rows = json::array();
  std::optional<double> best_bic;
  double best_value = 0.0;
  for (const double v : values) {
    TiccConfig config = opt.base.config;
    if (opt.param == "K") config.num_clusters = static_cast<int>(v);
    if (opt.param == "w") config.window = static_cast<Index>(v);
    if (opt.param == "beta") config.beta = v;
    const auto start = Clock::now();
    const SubsequenceMatrix subseq = stack_windows(series, config.window);
    const TiccModel model = fit(subseq, config);
    const double runtime = seconds_since(start);
    const double score = bic(model, subseq);
    std::optional<double> f1;
    if (truth && truth->num_clusters == config.num_clusters) {
      f1 = macro_f1(model.assignment.labels, truth->labels, truth->num_clusters).macro_f1;
    }
    csv << opt.param << ',' << num(v) << ',' << num(score) << ',';
    if (f1) csv << num(*f1);
    csv << ',' << model.assignment.num_switches << ',' << model.em_iters_run << ','
        << (model.converged ? 1 : 0) << ',' << num(runtime) << '\n';
    rows.push_back({{"value", v}, {"runtime_s", runtime}});
    if (!best_bic || score < *best_bic) {
      best_bic = score;
      best_value = v;
    }
  }
  if (!csv) throw Error(ErrorCode::io_error, "write failure on sweep.csv");

  json manifest = manifest_base("sweep", opt.base.config.seed);
  manifest["config"] = opt.base.config;
  manifest["sweep"] = {{"param", opt.param}, {"values", values}};
  manifest["inputs"] = {{"series", opt.base.input}, {"truth_dir", opt.truth_dir}};
  manifest["outputs"] = {"sweep.csv"};
  manifest["timings"] = rows;
  write_json(manifest, dir / "manifest.json");
  out << "lowest BIC at " << opt.param << "=" << best_value << "\n";
}

void add_fit_flags(CLI::App& cmd, FitOptions& opt) {
  TiccConfig& c = opt.config;
  cmd.add_option("--input", opt.input, "Series CSV, one observation per line")->required();
  cmd.add_flag("--header", opt.header, "Skip the first line of the CSV");
  cmd.add_option("--output-dir", opt.output_dir, "Directory for output files");
  cmd.add_option("-K,--clusters", c.num_clusters, "Number of clusters")->capture_default_str();
  cmd.add_option("-w,--window", c.window, "Window size")->capture_default_str();
  cmd.add_option("--lambda", c.lambda, "Sparsity penalty")->capture_default_str();
  cmd.add_option("--beta", c.beta, "Switching penalty")->capture_default_str();
  cmd.add_option("--seed", c.seed, "Seed for initialization")->capture_default_str();
  cmd.add_option("--rho", c.admm.rho, "ADMM penalty parameter")->capture_default_str();
  cmd.add_option("--max-em-iters", c.max_em_iters, "EM iteration cap")->capture_default_str();
  cmd.add_option("--threads", c.threads, "Worker thread cap")->capture_default_str();
  cmd.add_option("--warmup-iters", c.warmup_iters, "Switching-free warm-up iterations")
      ->capture_default_str();
  cmd.add_option("--init", [&c](const CLI::results_t& r) {
        c.init = parse_init_method(r.front());
        return true;
      }, "Initialization: contiguous or random");
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toeplitz inverse covariance-based clustering of multivariate time series", "ticc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic dataset with ground truth");
  generate->add_option("--preset", gen.preset, "Named segment sequence")->capture_default_str();
  generate->add_option("--segments", gen.segments, "Explicit segments, e.g. 0:100,1:100,0:100");
  generate->add_option("-n,--sensors", gen.sensors, "Sensor dimension")->capture_default_str();
  generate->add_option("-w,--window", gen.window, "Window of the generating model")->capture_default_str();
  generate->add_option("--p-edge", gen.p_edge, "Edge probability")->capture_default_str();
  generate->add_option("--samples-per-segment", gen.samples_per_segment,
                       "Points per segment; 0 selects 100 * K")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_option("--output-dir", gen.output_dir, "Directory for output files");

  FitOptions fit_opt;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model to a series");
  add_fit_flags(*fit_cmd, fit_opt);
  fit_cmd->add_flag("--debug-trace", fit_opt.debug_trace, "Write every ADMM iteration to admm_trace.csv");

  EvaluateOptions eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a fitted model against ground truth");
  evaluate->add_option("--input", eval.input, "model.json from fit")->required();
  evaluate->add_option("--truth-dir", eval.truth_dir, "Directory written by generate")->required();
  evaluate->add_option("--output-dir", eval.output_dir, "Directory for scores.json");

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Fit over a range of K, beta or w");
  add_fit_flags(*sweep_cmd, sweep.base);
  sweep_cmd->add_option("--param", sweep.param, "K, beta or w")->capture_default_str();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values");
  sweep_cmd->add_option("--range", sweep.range, "lo:hi or lo:hi:step, inclusive");
  sweep_cmd->add_option("--truth-dir", sweep.truth_dir, "Ground truth for macro-F1 columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what());
    return 2;
  } catch (const Error& e) {
    // Raised by option callbacks such as --init.
    write_error(err, to_string(e.code()), e.what());
    return 2;
  }

  try {
    if (generate->parsed()) run_generate(gen, out);
    if (fit_cmd->parsed()) run_fit(fit_opt, out);
    if (evaluate->parsed()) run_evaluate(eval, out);
    if (sweep_cmd->parsed()) run_sweep(sweep, out);
  } catch (const Error& e) {
    write_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace ticc::cli
