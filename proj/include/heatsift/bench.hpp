#pragma once

#include <cstdint>
#include <vector>

#include "heatsift/graph.hpp"
#include "heatsift/stability.hpp"

namespace heatsift {

enum class AttributeFamily { normal, uniform, logistic };

// Degree-corrected planted-partition generator with power-law community
// sizes and degrees, per-community attribute distributions sharing centers
// through a hierarchy map, and optional attribute-perturbation anomalies.
struct SyntheticConfig {
  std::size_t node_count = 1000;
  double mixing = 0.1;  // fraction of stubs leaving the community
  double community_size_exponent = 1.0;
  std::size_t community_size_min = 50;
  std::size_t community_size_max = 200;
  double degree_exponent = 2.0;
  double mean_degree = 20.0;  // target, within [10, 100]
  std::size_t attribute_dim = 20;
  double attribute_noise = 0.1;  // sigma-hat
  std::vector<int> hierarchy;            // community -> center group; empty = pair C/2
  std::vector<double> group_centers;     // group -> center value; empty = group index
  std::vector<AttributeFamily> families;  // per community; empty = round-robin
  double anomaly_fraction = 0.0;          // within [0, 0.30]
  double perturbed_attr_fraction = 0.30;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws ConfigError
};

struct GeneratedNetwork {
  AttributedGraph graph;       // the realized giant component
  Partition ground_truth;      // planted communities, re-compacted
  std::vector<std::uint8_t> labels;  // 1 = injected anomaly
};

GeneratedNetwork generate_synthetic(const SyntheticConfig& config);

// Perturbs floor(fraction*N) uniformly chosen nodes by replacing
// floor(attr_fraction*d) attribute entries with values resampled from a
// uniformly chosen different community; returns the anomaly labels and
// mutates the graph attributes in place.
std::vector<std::uint8_t> inject_anomalies(AttributedGraph& graph, const Partition& ground_truth,
                                           double fraction, double attr_fraction,
                                           std::uint64_t rng_seed);

struct EvalResult {
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1_weighted = 0.0;
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Probability that a random positive outranks a random negative, ties 1/2.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Average precision with tied scores entering as one group.
double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Precision/recall of the anomaly class plus support-weighted F1.
EvalResult prf1(std::span<const NodeIndex> flagged, std::span<const std::uint8_t> labels);

std::vector<double> random_baseline(std::size_t n, std::uint64_t rng_seed);

}  // namespace heatsift
