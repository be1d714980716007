#include "heatsift/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "heatsift/bench.hpp"
#include "heatsift/errors.hpp"
#include "heatsift/parallel.hpp"
#include "heatsift/rng.hpp"
#include "heatsift/scales.hpp"

namespace heatsift {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log_stage(const std::string& stage, const std::string& message) {
  std::cerr << '[' << stage << "] " << message << '\n';
}

struct CommonOpts {
  std::string nodes_path;
  std::string edges_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = hardware concurrency
  std::string sigma = "auto";
  std::string sigma_pairs = "all";
  std::uint64_t pair_budget = 2'000'000;
  bool standardize = false;
  bool largest_component = false;
  int runs = 100;
  int cheb_degree = kDefaultChebDegree;
  std::size_t dense_limit = kDefaultDenseLimit;
  double t_min = 1e-2;
  double t_max = 1e3;
  std::size_t t_count = 100;
  std::vector<double> at_times;
  double plateau_eps = 0.05;
  std::size_t min_plateau = 3;
  double dip_quantile = 0.25;
  bool dump_kernel = false;
  bool linear_null_score = false;
  bool refine_bound = false;
  double sparsify_eps = 0.0;
};

void add_input_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--nodes", o.nodes_path, "Nodes TSV (id, attr_1..attr_d[, label])")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--edges", o.edges_path, "Edges TSV (src, dst)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--sigma", o.sigma, "Gaussian weighting scale: 'auto' or a positive number");
  cmd->add_option("--sigma-pairs", o.sigma_pairs, "Pair population for auto sigma")
      ->check(CLI::IsMember({"all", "edges"}));
  cmd->add_option("--pair-budget", o.pair_budget, "Pair subsample budget for auto sigma");
  cmd->add_flag("--standardize", o.standardize, "Z-score attribute columns before weighting");
  cmd->add_flag("--largest-component", o.largest_component,
                "Restrict analysis to the largest connected component");
}

void add_pipeline_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--seed", o.seed, "Master RNG seed");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--runs", o.runs, "Louvain runs per scale")->check(CLI::PositiveNumber);
  cmd->add_option("--cheb-degree", o.cheb_degree, "Chebyshev degree m")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dense-limit", o.dense_limit,
                  "Largest N handled by the exact eigendecomposition path");
  cmd->add_flag("--refine-bound", o.refine_bound,
                "Tighten the spectral bound by power iteration on the Chebyshev path");
  cmd->add_flag("--dump-kernel", o.dump_kernel, "Export kernel matrices as CSV");
  cmd->add_flag("--linear-null-score", o.linear_null_score,
                "Also report the stability value with the linear size null term (diagnostic, never optimized)");
  cmd->add_option("--sparsify-eps", o.sparsify_eps,
                  "Drop kernel entries below eps/N in the quality matrix (0 = off)");
}

void add_grid_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--tmin", o.t_min, "Smallest grid time")->check(CLI::PositiveNumber);
  cmd->add_option("--tmax", o.t_max, "Largest grid time")->check(CLI::PositiveNumber);
  cmd->add_option("--tcount", o.t_count, "Grid size")->check(CLI::PositiveNumber);
  cmd->add_option("--at-times", o.at_times, "Explicit times instead of the log grid");
}

void add_selection_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--plateau-eps", o.plateau_eps, "VI(t,t') bound inside a plateau");
  cmd->add_option("--min-plateau", o.min_plateau, "Minimum plateau length in grid points");
  cmd->add_option("--dip-quantile", o.dip_quantile, "VI(t) quantile gate for dips");
}

std::vector<double> time_grid(const CommonOpts& o) {
  if (!o.at_times.empty()) {
    std::vector<double> times = o.at_times;
    std::sort(times.begin(), times.end());
    for (double t : times)
      if (!(t > 0.0)) throw ParameterError("times must be positive");
    return times;
  }
  if (!(o.t_min > 0.0) || o.t_max < o.t_min) throw ParameterError("invalid time grid bounds");
  std::vector<double> times;
  times.reserve(o.t_count);
  if (o.t_count == 1) {
    times.push_back(o.t_min);
    return times;
  }
  const double log_min = std::log(o.t_min);
  const double step = (std::log(o.t_max) - log_min) / static_cast<double>(o.t_count - 1);
  times.push_back(o.t_min);
  for (std::size_t i = 1; i + 1 < o.t_count; ++i)
    times.push_back(std::exp(log_min + step * static_cast<double>(i)));
  times.push_back(o.t_max);
  return times;
}

struct PipelineInput {
  AttributedGraph graph;
  WeightedGraph weighted;
  LaplacianMatrix L;
  double sigma_used = 0.0;  // 0 marks the degenerate unit-weight fallback
};

PipelineInput prepare(const CommonOpts& o) {
  PipelineInput in;
  LoadResult loaded = load_attributed_graph(o.nodes_path, o.edges_path);
  in.graph = std::move(loaded.graph);
  log_stage("load", "N=" + std::to_string(in.graph.node_count) +
                        " d=" + std::to_string(in.graph.attribute_dim) +
                        " |E|=" + std::to_string(in.graph.edges.size()) +
                        " dropped_self_loops=" + std::to_string(loaded.dropped_self_loops) +
                        " dropped_duplicates=" + std::to_string(loaded.dropped_duplicate_edges));

  if (o.largest_component) {
    const auto components = connected_components(in.graph);
    std::size_t largest = 0;
    for (std::size_t c = 1; c < components.size(); ++c)
      if (components[c].size() > components[largest].size()) largest = c;
    if (components.size() > 1) {
      in.graph = restrict_to_nodes(in.graph, components[largest]);
      log_stage("component", "restricted to largest component, N=" +
                                 std::to_string(in.graph.node_count));
    }
  }
  if (o.standardize) {
    in.graph = standardize_attributes(in.graph);
    log_stage("standardize", "attribute columns z-scored");
  }

  if (o.sigma == "auto") {
    const SigmaPairs pairs =
        o.sigma_pairs == "edges" ? SigmaPairs::edges_only : SigmaPairs::all_pairs;
    const auto sigma =
        auto_sigma(in.graph, o.pair_budget, rng::derive(o.seed, "sigma"), pairs);
    if (sigma) {
      in.sigma_used = *sigma;
      in.weighted = weight_edges(in.graph, *sigma);
      log_stage("sigma", "auto sigma = " + format_double(*sigma));
    } else {
      in.weighted = unit_weights(in.graph);
      log_stage("sigma", "degenerate pairwise distances; falling back to unit weights");
    }
  } else {
    double sigma;
    try {
      sigma = parse_double(o.sigma);
    } catch (const ParseError&) {
      throw ParameterError("--sigma must be 'auto' or a positive number");
    }
    in.sigma_used = sigma;
    in.weighted = weight_edges(in.graph, sigma);
  }
  in.L = laplacian(in.weighted);
  return in;
}

void write_text_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  fn(out);
}

void dump_kernel_csv(const KernelMatrix& kernel, const fs::path& path) {
  write_text_file(path, [&kernel](std::ostream& out) {
    for (std::size_t i = 0; i < kernel.order; ++i) {
      const double* row = kernel.entries.row(i);
      for (std::size_t j = 0; j < kernel.order; ++j) {
        if (j) out << ',';
        out << format_double(row[j]);
      }
      out << '\n';
    }
  });
}

json sigma_json(const PipelineInput& in) {
  if (in.sigma_used > 0.0) return in.sigma_used;
  return "degenerate-unit-weights";
}

// Concentration profiles across a time grid: factorize once on the exact
// path, per-time Chebyshev kernels otherwise.
std::vector<ConcentrationProfile> profiles_for_times(const LaplacianMatrix& L,
                                                     std::span<const double> times,
                                                     const CommonOpts& o) {
  std::vector<ConcentrationProfile> profiles;
  profiles.reserve(times.size());
  if (L.order <= o.dense_limit) {
    const SpectralFactor factor = SpectralFactor::compute(L);
    for (double t : times) profiles.push_back(make_profile(t, factor.concentrations_at(t)));
  } else {
    for (double t : times) {
      const KernelMatrix k = full_kernel_approx(L, t, o.cheb_degree, o.workers,
                                                GuardPolicy::escalate, o.refine_bound);
      profiles.push_back(concentration_profile(k));
    }
  }
  return profiles;
}

int cmd_scan(const CommonOpts& o) {
  const PipelineInput in = prepare(o);
  const auto times = time_grid(o);

  ScanOptions options;
  options.runs = o.runs;
  options.dense_limit = o.dense_limit;
  options.cheb_degree = o.cheb_degree;
  options.refine_bound = o.refine_bound;
  log_stage("scan", std::to_string(times.size()) + " times, " + std::to_string(o.runs) +
                        " louvain runs each");
  const ScaleScan result = scan(in.L, times, o.seed, o.workers, options);

  // Explicit --at-times overrides the dip/plateau automation: the caller has
  // already chosen the scales.
  const bool explicit_times = !o.at_times.empty();
  ScaleSelection selection;
  if (explicit_times) {
    for (std::size_t i = 0; i < result.times.size(); ++i) {
      if (i > 0 && result.times[i] == result.times[i - 1]) continue;
      SelectedScale s;
      s.grid_index = i;
      s.time = result.times[i];
      s.num_clusters = result.num_clusters[i];
      s.vi_within = result.vi_within[i];
      s.plateau_start = result.times[i];
      s.plateau_end = result.times[i];
      s.plateau_length = 1;
      selection.selected.push_back(s);
    }
    log_stage("select", std::to_string(selection.selected.size()) + " explicit scales");
  } else {
    selection = select_scales(result, o.dip_quantile, o.plateau_eps, o.min_plateau);
    log_stage("select", std::to_string(selection.selected.size()) + " scales selected");
  }

  fs::create_directories(fs::path(o.out_dir) / "partitions");
  fs::create_directories(fs::path(o.out_dir) / "concentration");
  write_text_file(fs::path(o.out_dir) / "vi_within.csv",
                  [&result](std::ostream& s) { write_vi_within_csv(result, s); });
  write_text_file(fs::path(o.out_dir) / "vi_cross.csv",
                  [&result](std::ostream& s) { write_vi_cross_csv(result, s); });
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    const std::string t_name = format_double(result.times[i]);
    write_text_file(fs::path(o.out_dir) / "partitions" / ("t_" + t_name + ".tsv"),
                    [&](std::ostream& s) {
                      write_partition_tsv(result.best_partitions[i], in.graph.node_ids, s);
                    });
    write_text_file(fs::path(o.out_dir) / "concentration" / ("t_" + t_name + ".csv"),
                    [&](std::ostream& s) {
                      write_concentration_csv(result.concentrations[i], in.graph.node_ids, s);
                    });
  }

  json doc;
  doc["sigma"] = sigma_json(in);
  doc["seed"] = o.seed;
  doc["runs"] = o.runs;
  doc["grid"] = {{"count", times.size()},
                 {"t_min", times.front()},
                 {"t_max", times.back()},
                 {"explicit", explicit_times}};
  doc["parameters"] = {{"plateau_eps", o.plateau_eps},
                       {"min_plateau", o.min_plateau},
                       {"dip_quantile", o.dip_quantile}};
  auto selected = json::array();
  for (const SelectedScale& s : selection.selected) {
    json entry;
    entry["time"] = s.time;
    entry["num_clusters"] = s.num_clusters;
    entry["vi_within"] = s.vi_within;
    entry["dip_threshold"] = s.dip_threshold;
    entry["plateau"] = {{"start", s.plateau_start},
                        {"end", s.plateau_end},
                        {"length", s.plateau_length}};
    entry["stability"] = *result.best_partitions[s.grid_index].score;
    selected.push_back(std::move(entry));
  }
  doc["selected"] = std::move(selected);

  // Per-selected-scale anomaly reports with contexts from that scale.
  for (const SelectedScale& s : selection.selected) {
    AnomalyReport report = detect(result.concentrations[s.grid_index]);
    report.contexts = result.best_partitions[s.grid_index].assignment;
    const std::string t_name = format_double(s.time);
    write_text_file(fs::path(o.out_dir) / ("anomalies_t_" + t_name + ".json"),
                    [&](std::ostream& out) { write_report_json(report, in.graph.node_ids, out); });
    write_text_file(fs::path(o.out_dir) / ("anomalies_t_" + t_name + ".csv"),
                    [&](std::ostream& out) { write_report_csv(report, in.graph.node_ids, out); });
  }

  if (o.linear_null_score || o.dump_kernel) {
    std::optional<SpectralFactor> factor;
    if (in.L.order <= o.dense_limit) factor = SpectralFactor::compute(in.L);
    for (std::size_t idx = 0; idx < selection.selected.size(); ++idx) {
      const SelectedScale& s = selection.selected[idx];
      const KernelMatrix kernel =
          factor ? factor->kernel_at(s.time)
                 : full_kernel_approx(in.L, s.time, o.cheb_degree, o.workers,
                                      GuardPolicy::escalate, o.refine_bound);
      if (o.linear_null_score)
        doc["selected"][idx]["linear_null_stability"] =
            stability_score_linear_null(kernel, result.best_partitions[s.grid_index]);
      if (o.dump_kernel)
        dump_kernel_csv(kernel, fs::path(o.out_dir) / ("kernel_t_" + format_double(s.time) + ".csv"));
    }
  }

  write_text_file(fs::path(o.out_dir) / "selection.json",
                  [&doc](std::ostream& out) { out << doc.dump(2) << '\n'; });
  return static_cast<int>(ExitCode::ok);
}

int cmd_detect(const CommonOpts& o, double t) {
  if (!(t >= 0.0)) throw ParameterError("detection time must be nonnegative");
  const PipelineInput in = prepare(o);
  fs::create_directories(o.out_dir);

  log_stage("detect", "t = " + format_double(t));
  const KernelMatrix kernel = heat_kernel_auto(in.L, t, o.dense_limit, o.cheb_degree, o.workers, o.refine_bound);
  AnomalyReport report = detect(concentration_profile(kernel));

  const QualityMatrix q = quality_matrix(kernel, o.sparsify_eps);
  const auto best = best_partition_on(q, in.L, o.runs,
                                      rng::derive(o.seed, "time", rng::bits_of(t)), o.workers);
  report.contexts = best.best.assignment;

  write_text_file(fs::path(o.out_dir) / "anomalies.json",
                  [&](std::ostream& out) { write_report_json(report, in.graph.node_ids, out); });
  write_text_file(fs::path(o.out_dir) / "anomalies.csv",
                  [&](std::ostream& out) { write_report_csv(report, in.graph.node_ids, out); });
  write_text_file(fs::path(o.out_dir) / "partition.tsv", [&](std::ostream& out) {
    write_partition_tsv(best.best, in.graph.node_ids, out);
  });
  write_text_file(fs::path(o.out_dir) / "partition.json", [&](std::ostream& out) {
    write_partition_json(best.best, in.graph.node_ids, out);
  });
  if (o.dump_kernel)
    dump_kernel_csv(kernel, fs::path(o.out_dir) / ("kernel_t_" + format_double(t) + ".csv"));
  log_stage("detect", std::to_string(report.flagged.size()) + " nodes flagged");
  return static_cast<int>(ExitCode::ok);
}

json eval_to_json(const EvalResult& r) {
  return json{{"roc_auc", r.roc_auc},
              {"pr_auc", r.pr_auc},
              {"precision", r.precision},
              {"recall", r.recall},
              {"f1_weighted", r.f1_weighted},
              {"counts", {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}}}};
}

// The mean + 2 std thresholding rule applied to arbitrary scores.
std::vector<NodeIndex> threshold_flags(std::span<const double> scores) {
  const auto profile = make_profile(0.0, std::vector<double>(scores.begin(), scores.end()));
  if (profile.std_dev <= 0.0) return {};
  const double threshold = profile.mean + 2.0 * profile.std_dev;
  std::vector<NodeIndex> flagged;
  for (std::size_t u = 0; u < scores.size(); ++u)
    if (scores[u] >= threshold) flagged.push_back(static_cast<NodeIndex>(u));
  return flagged;
}

EvalResult evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           std::span<const NodeIndex> flagged) {
  EvalResult r = prf1(flagged, labels);
  r.roc_auc = roc_auc(scores, labels);
  r.pr_auc = pr_auc(scores, labels);
  return r;
}

struct BenchOpts {
  SyntheticConfig config;
  CommonOpts common;  // grid/output/seed settings (input paths unused)
};

int cmd_bench(BenchOpts& b) {
  b.config.rng_seed = b.common.seed;
  const GeneratedNetwork net = generate_synthetic(b.config);
  log_stage("generate", "realized N=" + std::to_string(net.graph.node_count) +
                            " |E|=" + std::to_string(net.graph.edges.size()) +
                            " communities=" + std::to_string(net.ground_truth.num_contexts));

  fs::create_directories(b.common.out_dir);
  save_attributed_graph(net.graph, (fs::path(b.common.out_dir) / "nodes.tsv").string(),
                        (fs::path(b.common.out_dir) / "edges.tsv").string());
  write_text_file(fs::path(b.common.out_dir) / "labels.tsv", [&net](std::ostream& out) {
    out << "id\tlabel\n";
    for (std::size_t u = 0; u < net.graph.node_count; ++u)
      out << net.graph.node_ids[u] << '\t' << static_cast<int>(net.labels[u]) << '\n';
  });

  const auto sigma = auto_sigma(net.graph, b.common.pair_budget,
                                rng::derive(b.common.seed, "sigma"), SigmaPairs::all_pairs);
  const WeightedGraph weighted =
      sigma ? weight_edges(net.graph, *sigma) : unit_weights(net.graph);
  log_stage("sigma", sigma ? "auto sigma = " + format_double(*sigma) : "unit weights");

  PipelineInput in;
  in.graph = net.graph;
  in.sigma_used = sigma.value_or(0.0);
  in.weighted = weighted;
  in.L = laplacian(weighted);

  const auto times = time_grid(b.common);
  const auto profiles = profiles_for_times(in.L, times, b.common);

  // The reported scale is the one giving the best ranking performance.
  std::size_t best_idx = 0;
  double best_auc = -1.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const double auc = roc_auc(profiles[i].values, net.labels);
    if (auc > best_auc) {
      best_auc = auc;
      best_idx = i;
    }
  }
  const ConcentrationProfile& best = profiles[best_idx];
  log_stage("bench", "best scale t = " + format_double(best.time) +
                         " roc_auc = " + format_double(best_auc));

  const AnomalyReport report = detect(best);
  const EvalResult detector = evaluate_scores(best.values, net.labels, report.flagged);

  const auto baseline_scores =
      random_baseline(net.graph.node_count, rng::derive(b.common.seed, "baseline"));
  const EvalResult baseline =
      evaluate_scores(baseline_scores, net.labels, threshold_flags(baseline_scores));

  write_text_file(fs::path(b.common.out_dir) / "scores.tsv", [&](std::ostream& out) {
    out << "id\tscore\n";
    for (std::size_t u = 0; u < net.graph.node_count; ++u)
      out << net.graph.node_ids[u] << '\t' << format_double(best.values[u]) << '\n';
  });

  std::uint64_t positives = 0;
  for (auto l : net.labels) positives += l;
  json doc;
  doc["generator"] = {{"requested_n", b.config.node_count},
                      {"realized_n", net.graph.node_count},
                      {"mixing", b.config.mixing},
                      {"attribute_dim", b.config.attribute_dim},
                      {"attribute_noise", b.config.attribute_noise},
                      {"anomaly_fraction", b.config.anomaly_fraction},
                      {"perturbed_attr_fraction", b.config.perturbed_attr_fraction},
                      {"seed", b.common.seed}};
  doc["sigma"] = sigma_json(in);
  doc["best_time"] = best.time;
  doc["prevalence"] = static_cast<double>(positives) / static_cast<double>(net.graph.node_count);
  doc["threshold"] = report.threshold;
  doc["detector"] = eval_to_json(detector);
  doc["random_baseline"] = eval_to_json(baseline);
  write_text_file(fs::path(b.common.out_dir) / "metrics.json",
                  [&doc](std::ostream& out) { out << doc.dump(2) << '\n'; });
  return static_cast<int>(ExitCode::ok);
}

// id -> value TSV with a fixed two-column header.
std::vector<std::pair<std::string, std::string>> read_two_column_tsv(
    const std::string& path, const std::string& col1, const std::string& col2) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != col1 + "\t" + col2)
    throw ParseError("header must be '" + col1 + "<TAB>" + col2 + "' in " + path, 1);
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError("expected 2 columns", ln);
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

int cmd_eval(const std::string& scores_path, const std::string& labels_path,
             const std::string& out_dir) {
  const auto score_rows = read_two_column_tsv(scores_path, "id", "score");
  const auto label_rows = read_two_column_tsv(labels_path, "id", "label");
  if (score_rows.size() != label_rows.size())
    throw ReferenceError("scores and labels cover different node counts");

  std::unordered_map<std::string, double> score_of;
  for (const auto& [id, value] : score_rows)
    if (!score_of.emplace(id, parse_double(value)).second)
      throw ReferenceError("duplicate id in scores: " + id);

  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const auto& [id, value] : label_rows) {
    const auto it = score_of.find(id);
    if (it == score_of.end()) throw ReferenceError("label id missing from scores: " + id);
    scores.push_back(it->second);
    if (value == "0")
      labels.push_back(0);
    else if (value == "1")
      labels.push_back(1);
    else
      throw ParseError("label must be 0 or 1 for id " + id);
  }

  const EvalResult r = evaluate_scores(scores, labels, threshold_flags(scores));
  fs::create_directories(out_dir);
  json doc = eval_to_json(r);
  write_text_file(fs::path(out_dir) / "metrics.json",
                  [&doc](std::ostream& out) { out << doc.dump(2) << '\n'; });
  log_stage("eval", "roc_auc = " + format_double(r.roc_auc));
  return static_cast<int>(ExitCode::ok);
}

int cmd_score_partition(const CommonOpts& o, const std::string& partition_path, double t) {
  if (!(t >= 0.0)) throw ParameterError("time must be nonnegative");
  const PipelineInput in = prepare(o);

  const auto rows = read_two_column_tsv(partition_path, "id", "context");
  if (rows.size() != in.graph.node_count)
    throw ReferenceError("partition covers " + std::to_string(rows.size()) + " nodes, graph has " +
                         std::to_string(in.graph.node_count));
  std::unordered_map<std::string, std::uint32_t> context_of;
  for (const auto& [id, value] : rows) {
    std::uint32_t c;
    try {
      c = static_cast<std::uint32_t>(parse_double(value));
    } catch (const ParseError&) {
      throw ParseError("context must be an integer for id " + id);
    }
    if (!context_of.emplace(id, c).second) throw ReferenceError("duplicate id: " + id);
  }
  std::vector<std::uint32_t> assignment(in.graph.node_count);
  for (NodeIndex u = 0; u < in.graph.node_count; ++u) {
    const auto it = context_of.find(in.graph.node_ids[u]);
    if (it == context_of.end())
      throw ReferenceError("partition is missing node id " + in.graph.node_ids[u]);
    assignment[u] = it->second;
  }
  Partition p = Partition::from_assignment(std::move(assignment));

  const KernelMatrix kernel = heat_kernel_auto(in.L, t, o.dense_limit, o.cheb_degree, o.workers, o.refine_bound);
  const QualityMatrix q = quality_matrix(kernel, o.sparsify_eps);

  json doc;
  doc["time"] = t;
  doc["num_contexts"] = p.num_contexts;
  doc["stability"] = stability_score(q, p);
  if (o.linear_null_score) doc["linear_null_stability"] = stability_score_linear_null(kernel, p);
  fs::create_directories(o.out_dir);
  write_text_file(fs::path(o.out_dir) / "score.json",
                  [&doc](std::ostream& out) { out << doc.dump(2) << '\n'; });
  log_stage("score-partition", "stability = " + format_double(doc["stability"].get<double>()));
  return static_cast<int>(ExitCode::ok);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Multi-scale anomaly detection on attributed networks via heat-kernel filtering"};
  app.require_subcommand(1);

  CommonOpts scan_opts;
  auto* scan_cmd = app.add_subcommand("scan", "Scan a time grid, select scales, report anomalies");
  add_input_options(scan_cmd, scan_opts);
  add_pipeline_options(scan_cmd, scan_opts);
  add_grid_options(scan_cmd, scan_opts);
  add_selection_options(scan_cmd, scan_opts);

  CommonOpts detect_opts;
  double detect_time = 1.0;
  auto* detect_cmd = app.add_subcommand("detect", "Detect anomalies at a single scale");
  add_input_options(detect_cmd, detect_opts);
  add_pipeline_options(detect_cmd, detect_opts);
  detect_cmd->add_option("--at-time", detect_time, "Diffusion time t")->required();

  BenchOpts bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Generate a synthetic network and evaluate");
  add_pipeline_options(bench_cmd, bench_opts.common);
  add_grid_options(bench_cmd, bench_opts.common);
  bench_cmd->add_option("--n", bench_opts.config.node_count, "Number of nodes");
  bench_cmd->add_option("--mu", bench_opts.config.mixing, "Mixing parameter");
  bench_cmd->add_option("--dim", bench_opts.config.attribute_dim, "Attribute dimension");
  bench_cmd->add_option("--sigma-hat", bench_opts.config.attribute_noise, "Attribute spread");
  bench_cmd->add_option("--size-min", bench_opts.config.community_size_min,
                        "Smallest community size");
  bench_cmd->add_option("--size-max", bench_opts.config.community_size_max,
                        "Largest community size");
  bench_cmd->add_option("--size-exponent", bench_opts.config.community_size_exponent,
                        "Community size power-law exponent");
  bench_cmd->add_option("--degree-exponent", bench_opts.config.degree_exponent,
                        "Degree power-law exponent");
  bench_cmd->add_option("--mean-degree", bench_opts.config.mean_degree, "Mean degree target");
  bench_cmd->add_option("--anomaly-fraction", bench_opts.config.anomaly_fraction,
                        "Fraction of perturbed nodes")
      ->default_val(0.05);
  bench_cmd->add_option("--attr-fraction", bench_opts.config.perturbed_attr_fraction,
                        "Fraction of attributes replaced per anomaly");
  bench_cmd->add_option("--pair-budget", bench_opts.common.pair_budget,
                        "Pair subsample budget for auto sigma");

  std::string eval_scores, eval_labels, eval_out = "out";
  auto* eval_cmd = app.add_subcommand("eval", "Metrics from externally produced scores");
  eval_cmd->add_option("--scores", eval_scores, "TSV id<TAB>score")->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", eval_labels, "TSV id<TAB>label")->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_out, "Output directory");

  CommonOpts score_opts;
  std::string partition_path;
  double score_time = 1.0;
  auto* score_cmd = app.add_subcommand("score-partition", "Stability of a stored partition");
  add_input_options(score_cmd, score_opts);
  add_pipeline_options(score_cmd, score_opts);
  score_cmd->add_option("--partition", partition_path, "TSV id<TAB>context")->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--at-time", score_time, "Diffusion time t")->required();

  // flags > config file > defaults
  for (auto* sub : {scan_cmd, detect_cmd, bench_cmd, eval_cmd, score_cmd})
    sub->set_config("--config", "", "Config file with key=value lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::usage);
  }

  try {
    if (scan_cmd->parsed()) return cmd_scan(scan_opts);
    if (detect_cmd->parsed()) return cmd_detect(detect_opts, detect_time);
    if (bench_cmd->parsed()) return cmd_bench(bench_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_scores, eval_labels, eval_out);
    if (score_cmd->parsed()) return cmd_score_partition(score_opts, partition_path, score_time);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric);
  }
  return static_cast<int>(ExitCode::usage);
}

}  // namespace heatsift
