#include "heatsift/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "heatsift/errors.hpp"
#include "heatsift/rng.hpp"

namespace heatsift {

void SyntheticConfig::validate() const {
  if (node_count < 4) throw ConfigError("node_count must be at least 4");
  if (!(mixing > 0.0 && mixing < 1.0)) throw ConfigError("mixing must lie in (0, 1)");
  if (community_size_min < 2 || community_size_min > community_size_max)
    throw ConfigError("community size bounds invalid");
  const std::size_t k_lo = (node_count + community_size_max - 1) / community_size_max;
  const std::size_t k_hi = node_count / community_size_min;
  if (k_lo > k_hi) throw ConfigError("community size bounds cannot tile node_count");
  if (!(mean_degree >= 10.0 && mean_degree <= 100.0))
    throw ConfigError("mean_degree target must lie in [10, 100]");
  if (mean_degree >= static_cast<double>(node_count))
    throw ConfigError("mean_degree target too large for node_count");
  if (attribute_dim < 1) throw ConfigError("attribute_dim must be >= 1");
  if (!(attribute_noise > 0.0)) throw ConfigError("attribute_noise must be positive");
  if (!(anomaly_fraction >= 0.0 && anomaly_fraction <= 0.30))
    throw ConfigError("anomaly_fraction must lie in [0, 0.30]");
  if (anomaly_fraction > 0.0 && anomaly_fraction * static_cast<double>(node_count) < 1.0)
    throw ConfigError("anomaly_fraction*N must be >= 1 when nonzero");
  if (!(perturbed_attr_fraction >= 0.0 && perturbed_attr_fraction <= 1.0))
    throw ConfigError("perturbed_attr_fraction must lie in [0, 1]");
}

namespace {

int center_group(const SyntheticConfig& cfg, std::size_t community) {
  if (!cfg.hierarchy.empty()) {
    if (community >= cfg.hierarchy.size())
      throw ConfigError("hierarchy map shorter than the community count");
    return cfg.hierarchy[community];
  }
  return static_cast<int>(community / 2);  // adjacent communities share a center
}

double center_value(const SyntheticConfig& cfg, std::size_t community) {
  const int group = center_group(cfg, community);
  if (!cfg.group_centers.empty()) {
    if (group < 0 || static_cast<std::size_t>(group) >= cfg.group_centers.size())
      throw ConfigError("group_centers shorter than the hierarchy group range");
    return cfg.group_centers[static_cast<std::size_t>(group)];
  }
  return static_cast<double>(group);
}

AttributeFamily family_of(const SyntheticConfig& cfg, std::size_t community) {
  if (!cfg.families.empty()) {
    if (community >= cfg.families.size())
      throw ConfigError("families list shorter than the community count");
    return cfg.families[community];
  }
  switch (community % 3) {
    case 0: return AttributeFamily::normal;
    case 1: return AttributeFamily::uniform;
    default: return AttributeFamily::logistic;
  }
}

double draw_attribute(rng::Stream& stream, AttributeFamily family, double center, double spread) {
  switch (family) {
    case AttributeFamily::normal: return stream.normal(center, spread);
    case AttributeFamily::uniform: return stream.uniform(center - spread, center + spread);
    case AttributeFamily::logistic: return stream.logistic(center, spread);
  }
  return center;
}

// Truncated discrete power law p(s) ~ s^-exponent on [lo, hi] via a CDF table.
class PowerLawSizes {
public:
  PowerLawSizes(std::size_t lo, std::size_t hi, double exponent) : lo_(lo) {
    cdf_.reserve(hi - lo + 1);
    double total = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) {
      total += std::pow(static_cast<double>(s), -exponent);
      cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
  }

  std::size_t draw(rng::Stream& stream, std::size_t cap) const {
    const double u = stream.uniform();
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (idx >= cdf_.size()) idx = cdf_.size() - 1;
    return std::min(lo_ + idx, cap);
  }

private:
  std::size_t lo_;
  std::vector<double> cdf_;
};

std::vector<std::size_t> sample_community_sizes(const SyntheticConfig& cfg, rng::Stream& stream) {
  const std::size_t lo = cfg.community_size_min, hi = cfg.community_size_max;
  const std::size_t n = cfg.node_count;

  // feasible[r]: r can still be tiled with sizes in [lo, hi].
  std::vector<char> feasible(n + 1, 0);
  feasible[0] = 1;
  std::size_t window = 0;  // count of feasible r' in [r-hi, r-lo]
  for (std::size_t r = 1; r <= n; ++r) {
    if (r >= lo) window += feasible[r - lo];
    if (r >= hi + 1) window -= feasible[r - hi - 1];
    feasible[r] = window > 0 ? 1 : 0;
  }
  if (!feasible[n]) throw ConfigError("community size bounds cannot tile node_count");

  PowerLawSizes dist(lo, hi, cfg.community_size_exponent);
  std::vector<std::size_t> sizes;
  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t s = dist.draw(stream, remaining);
    if (!feasible[remaining - s]) {
      // Clip to the nearest feasible size, preferring the sampled value.
      std::size_t best = 0;
      for (std::size_t c = lo; c <= std::min(hi, remaining); ++c)
        if (feasible[remaining - c] &&
            (best == 0 || std::llabs(static_cast<long long>(c) - static_cast<long long>(s)) <
                              std::llabs(static_cast<long long>(best) - static_cast<long long>(s))))
          best = c;
      s = best;
    }
    sizes.push_back(s);
    remaining -= s;
  }
  return sizes;
}

std::vector<std::size_t> sample_degrees(const SyntheticConfig& cfg, rng::Stream& stream,
                                        std::size_t n) {
  // Continuous truncated power law, then a multiplicative rescale onto the
  // mean-degree target. Hubs are capped near sqrt(N * mean) so that degrees
  // stay realizable inside the smallest communities.
  const double a = 3.0;
  const double cap = std::max(
      2.0 * cfg.mean_degree,
      std::min(static_cast<double>(n) / 2.0, std::sqrt(static_cast<double>(n) * cfg.mean_degree)));
  const double b = std::max(a + 1.0, cap);
  const double alpha = cfg.degree_exponent;
  std::vector<double> raw(n);
  for (double& k : raw) {
    const double u = stream.uniform();
    if (std::abs(alpha - 1.0) < 1e-12) {
      k = a * std::pow(b / a, u);
    } else {
      const double p = 1.0 - alpha;
      k = std::pow(std::pow(a, p) + u * (std::pow(b, p) - std::pow(a, p)), 1.0 / p);
    }
  }
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(n);
  const double scale = cfg.mean_degree / mean;
  std::vector<std::size_t> degrees(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<long long>(std::llround(raw[i] * scale));
    degrees[i] = static_cast<std::size_t>(
        std::clamp<long long>(k, 2, static_cast<long long>(std::llround(b))));
  }
  return degrees;
}

using EdgeKey = std::uint64_t;
EdgeKey edge_key(NodeIndex u, NodeIndex v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Pairs stubs uniformly, rejecting self-loops, duplicates and (when
// `forbid_same_side` is set) pairs inside one community; unresolved stubs
// after the retry rounds are dropped.
void match_stubs(std::vector<NodeIndex> stubs, rng::Stream& stream,
                 const std::vector<std::uint32_t>& community, bool forbid_same_side,
                 std::unordered_set<EdgeKey>& edge_set, std::vector<Edge>& edges) {
  for (int round = 0; round < 32 && stubs.size() >= 2; ++round) {
    stream.shuffle(stubs);
    std::vector<NodeIndex> retry;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const NodeIndex u = stubs[i], v = stubs[i + 1];
      if (u == v || (forbid_same_side && community[u] == community[v]) ||
          !edge_set.insert(edge_key(u, v)).second) {
        retry.push_back(u);
        retry.push_back(v);
        continue;
      }
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
    if (stubs.size() % 2) retry.push_back(stubs.back());
    if (retry.size() == stubs.size()) break;  // no progress
    stubs = std::move(retry);
  }
}

}  // namespace

GeneratedNetwork generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();

  rng::Stream size_stream(rng::derive(cfg.rng_seed, "sizes"));
  const auto sizes = sample_community_sizes(cfg, size_stream);
  const std::size_t n = cfg.node_count;

  std::vector<std::uint32_t> community(n);
  {
    std::size_t node = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c)
      for (std::size_t i = 0; i < sizes[c]; ++i) community[node++] = static_cast<std::uint32_t>(c);
  }

  rng::Stream degree_stream(rng::derive(cfg.rng_seed, "degrees"));
  const auto degrees = sample_degrees(cfg, degree_stream, n);

  // Split each node's stubs into internal and external shares.
  std::vector<std::size_t> internal(n), external(n);
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t size_c = sizes[community[u]];
    auto in = static_cast<std::size_t>(std::llround((1.0 - cfg.mixing) * degrees[u]));
    in = std::min(in, size_c - 1);
    internal[u] = in;
    external[u] = degrees[u] - std::min(degrees[u], in);
  }

  std::unordered_set<EdgeKey> edge_set;
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    std::vector<NodeIndex> stubs;
    for (std::size_t u = 0; u < n; ++u)
      if (community[u] == c)
        for (std::size_t s = 0; s < internal[u]; ++s) stubs.push_back(static_cast<NodeIndex>(u));
    if (stubs.size() % 2) {
      // move one stub to the external pool to restore parity
      for (std::size_t u = n; u-- > 0;)
        if (community[u] == c && internal[u] > 0) {
          --internal[u];
          ++external[u];
          stubs.pop_back();
          break;
        }
    }
    rng::Stream intra_stream(rng::derive(cfg.rng_seed, "intra-stubs", c));
    match_stubs(std::move(stubs), intra_stream, community, false, edge_set, edges);
  }
  {
    std::vector<NodeIndex> stubs;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t s = 0; s < external[u]; ++s) stubs.push_back(static_cast<NodeIndex>(u));
    if (stubs.size() % 2) stubs.pop_back();
    rng::Stream inter_stream(rng::derive(cfg.rng_seed, "inter-stubs"));
    match_stubs(std::move(stubs), inter_stream, community, true, edge_set, edges);
  }
  std::sort(edges.begin(), edges.end());

  AttributedGraph full;
  full.node_count = n;
  full.attribute_dim = cfg.attribute_dim;
  full.attributes.assign(n * cfg.attribute_dim, 0.0);
  full.edges = std::move(edges);
  full.node_ids.reserve(n);
  for (std::size_t u = 0; u < n; ++u) full.node_ids.push_back("n" + std::to_string(u));

  // Keep the giant component; N is reported as realized.
  const auto components = connected_components(full);
  std::size_t largest = 0;
  for (std::size_t c = 1; c < components.size(); ++c)
    if (components[c].size() > components[largest].size()) largest = c;

  GeneratedNetwork out;
  out.graph = restrict_to_nodes(full, components[largest]);
  std::vector<std::uint32_t> kept_community;
  kept_community.reserve(components[largest].size());
  for (NodeIndex u : components[largest]) kept_community.push_back(community[u]);
  out.ground_truth = Partition::from_assignment(std::move(kept_community));

  // Attributes are drawn for the realized nodes; the original community
  // index (not the compacted id) selects center and family so that dropped
  // stragglers do not shift distributions.
  std::vector<std::uint32_t> realized_original_community;
  realized_original_community.reserve(components[largest].size());
  for (NodeIndex u : components[largest]) realized_original_community.push_back(community[u]);
  rng::Stream attr_stream(rng::derive(cfg.rng_seed, "attrs"));
  for (std::size_t u = 0; u < out.graph.node_count; ++u) {
    const std::size_t c = realized_original_community[u];
    const double center = center_value(cfg, c);
    const AttributeFamily family = family_of(cfg, c);
    for (std::size_t k = 0; k < cfg.attribute_dim; ++k)
      out.graph.attr(static_cast<NodeIndex>(u), k) =
          draw_attribute(attr_stream, family, center, cfg.attribute_noise);
  }

  if (cfg.anomaly_fraction > 0.0) {
    out.labels = inject_anomalies(out.graph, out.ground_truth, cfg.anomaly_fraction,
                                  cfg.perturbed_attr_fraction,
                                  rng::derive(cfg.rng_seed, "anomalies"));
  } else {
    out.labels.assign(out.graph.node_count, 0);
  }
  out.graph.labels = out.labels;
  return out;
}

std::vector<std::uint8_t> inject_anomalies(AttributedGraph& graph, const Partition& ground_truth,
                                           double fraction, double attr_fraction,
                                           std::uint64_t rng_seed) {
  const std::size_t n = graph.node_count;
  if (ground_truth.size() != n) throw ShapeError("ground truth does not match graph");
  if (ground_truth.num_contexts < 2)
    throw ConfigError("anomaly injection needs at least 2 communities");
  const auto count = static_cast<std::size_t>(fraction * static_cast<double>(n));
  if (count < 1) throw ConfigError("fraction*N must be >= 1");
  const auto attrs_per_node =
      static_cast<std::size_t>(attr_fraction * static_cast<double>(graph.attribute_dim));

  std::vector<std::vector<NodeIndex>> members(ground_truth.num_contexts);
  for (NodeIndex u = 0; u < n; ++u) members[ground_truth.assignment[u]].push_back(u);

  rng::Stream stream(rng_seed);
  std::vector<NodeIndex> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0u);
  stream.shuffle(nodes);
  nodes.resize(count);

  std::vector<std::uint8_t> labels(n, 0);
  std::vector<std::uint32_t> attr_indices(graph.attribute_dim);
  for (NodeIndex u : nodes) {
    labels[u] = 1;
    // one donor community per perturbed node
    std::uint32_t donor = static_cast<std::uint32_t>(stream.below(ground_truth.num_contexts - 1));
    if (donor >= ground_truth.assignment[u]) ++donor;
    std::iota(attr_indices.begin(), attr_indices.end(), 0u);
    stream.shuffle(attr_indices);
    for (std::size_t i = 0; i < attrs_per_node; ++i) {
      const std::uint32_t k = attr_indices[i];
      const auto& pool = members[donor];
      const NodeIndex source = pool[stream.below(pool.size())];
      graph.attr(u, k) = graph.attr(source, k);
    }
  }
  return labels;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores/labels length mismatch");
  const std::size_t n = scores.size();
  std::uint64_t positives = 0;
  for (auto l : labels) positives += l;
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw MetricError("roc_auc requires both classes present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tie groups; equivalent to counting won pairs with
  // ties worth 1/2.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double p = static_cast<double>(positives);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores/labels length mismatch");
  const std::size_t n = scores.size();
  std::uint64_t positives = 0;
  for (auto l : labels) positives += l;
  if (positives == 0) throw MetricError("pr_auc requires at least one positive");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  std::uint64_t tp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    std::uint64_t group_tp = 0;
    for (std::size_t k = i; k <= j; ++k) group_tp += labels[order[k]];
    if (group_tp > 0) {
      tp += group_tp;
      const double precision = static_cast<double>(tp) / static_cast<double>(j + 1);
      ap += precision * (static_cast<double>(group_tp) / static_cast<double>(positives));
    }
    i = j + 1;
  }
  return ap;
}

EvalResult prf1(std::span<const NodeIndex> flagged, std::span<const std::uint8_t> labels) {
  EvalResult r;
  std::vector<bool> is_flagged(labels.size(), false);
  for (NodeIndex u : flagged) is_flagged[u] = true;
  for (std::size_t u = 0; u < labels.size(); ++u) {
    if (labels[u] && is_flagged[u]) ++r.tp;
    if (!labels[u] && is_flagged[u]) ++r.fp;
    if (labels[u] && !is_flagged[u]) ++r.fn;
    if (!labels[u] && !is_flagged[u]) ++r.tn;
  }
  const auto f1 = [](double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  };
  r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  const double precision_neg =
      (r.tn + r.fn) > 0 ? static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fn) : 0.0;
  const double recall_neg =
      (r.tn + r.fp) > 0 ? static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp) : 0.0;
  const double support_pos = static_cast<double>(r.tp + r.fn);
  const double support_neg = static_cast<double>(r.tn + r.fp);
  const double total = support_pos + support_neg;
  r.f1_weighted = total > 0.0 ? (support_pos * f1(r.precision, r.recall) +
                                 support_neg * f1(precision_neg, recall_neg)) /
                                    total
                              : 0.0;
  return r;
}

std::vector<double> random_baseline(std::size_t n, std::uint64_t rng_seed) {
  rng::Stream stream(rng_seed);
  std::vector<double> scores(n);
  for (double& s : scores) s = stream.uniform();
  return scores;
}

}  // namespace heatsift
