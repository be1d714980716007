#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatsift/linalg.hpp"
#include "heatsift/simd.hpp"

namespace heatsift {

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex u = 0;  // canonical: u < v
  NodeIndex v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Nodes with d-dimensional attribute vectors plus undirected simple edges.
struct AttributedGraph {
  std::size_t node_count = 0;
  std::size_t attribute_dim = 0;
  std::vector<double> attributes;  // row-major node_count x attribute_dim
  std::vector<Edge> edges;         // canonical, sorted, unique
  std::vector<std::string> node_ids;
  std::optional<std::vector<std::uint8_t>> labels;

  std::span<const double> attr_row(NodeIndex u) const {
    return {attributes.data() + static_cast<std::size_t>(u) * attribute_dim, attribute_dim};
  }
  double& attr(NodeIndex u, std::size_t k) {
    return attributes[static_cast<std::size_t>(u) * attribute_dim + k];
  }
  double attr(NodeIndex u, std::size_t k) const {
    return attributes[static_cast<std::size_t>(u) * attribute_dim + k];
  }

  // Euclidean distance between the attribute vectors of u and v.
  double attribute_distance(NodeIndex u, NodeIndex v) const;

  // Throws DataError if any structural invariant is violated.
  void validate() const;
};

struct LoadResult {
  AttributedGraph graph;
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicate_edges = 0;
};

// Nodes file: TSV with header `id  attr_1 .. attr_d [label]`.
// Edges file: TSV with header `src  dst`. Undirected, order irrelevant.
LoadResult load_attributed_graph(const std::string& nodes_path, const std::string& edges_path);

// Writes back with the same schema; floats use shortest round-trip decimals.
void save_attributed_graph(const AttributedGraph& g, const std::string& nodes_path,
                           const std::string& edges_path);

// Maximal connected node sets, each sorted ascending, ordered by smallest member.
std::vector<std::vector<NodeIndex>> connected_components(const AttributedGraph& g);

// Induced subgraph on `keep` (must be sorted ascending); node order preserved.
AttributedGraph restrict_to_nodes(const AttributedGraph& g, std::span<const NodeIndex> keep);

enum class SigmaPairs { all_pairs, edges_only };

// Population standard deviation of Euclidean attribute distances over node
// pairs (all pairs by default, adjacent pairs with edges_only). When the pair
// count exceeds pair_budget, that many pairs are sampled uniformly without
// replacement using rng_seed. Returns nullopt for the degenerate sigma = 0
// case (callers fall back to unit weights).
std::optional<double> auto_sigma(const AttributedGraph& g, std::uint64_t pair_budget,
                                 std::uint64_t rng_seed,
                                 SigmaPairs pairs = SigmaPairs::all_pairs);

struct WeightedGraph {
  AttributedGraph base;
  double sigma = 0.0;  // 0 marks the unit-weight fallback
  std::vector<double> weights;  // aligned with base.edges, each in (0, 1]
};

// w(u,v) = exp(-||f(u)-f(v)||^2 / (2 sigma^2)) for every edge; non-edges carry
// no weight.
WeightedGraph weight_edges(const AttributedGraph& g, double sigma);

// Degenerate-sigma fallback: every edge weight set to 1.
WeightedGraph unit_weights(const AttributedGraph& g);

// Symmetric weighted Laplacian L = D - W in CSR form (diagonal included,
// columns sorted within rows).
struct LaplacianMatrix {
  std::size_t order = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;        // diagonal = strength, off-diagonal = -w
  std::vector<double> strengths;  // d_u = sum_v w(u,v)

  simd::CsrView view() const { return {order, row_ptr.data(), col.data(), val.data()}; }

  double max_strength() const;
  linalg::Matrix dense() const;

  // Visits the neighbors of u as (v, w(u,v)) with positive weights.
  template <typename Fn>
  void for_each_neighbor(NodeIndex u, Fn&& fn) const {
    for (std::int64_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k) {
      const auto v = static_cast<NodeIndex>(col[k]);
      if (v != u) fn(v, -val[k]);
    }
  }
};

// Requires a connected base graph; throws ConnectivityError naming the
// component sizes otherwise.
LaplacianMatrix laplacian(const WeightedGraph& w);

// Shifts each attribute column to mean 0 and scales to population std 1;
// constant columns are left at 0 after centering.
AttributedGraph standardize_attributes(const AttributedGraph& g);

// Shortest round-trip decimal representation of a double.
std::string format_double(double x);
double parse_double(std::string_view s);  // throws ParseError on failure

}  // namespace heatsift
