#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "heatsift/heat_kernel.hpp"

namespace heatsift {

// Assignment of nodes to contexts with contiguous ids 0..K-1.
struct Partition {
  std::vector<std::uint32_t> assignment;
  std::uint32_t num_contexts = 0;
  std::optional<double> score;
  std::optional<double> time;

  std::size_t size() const noexcept { return assignment.size(); }

  static Partition singletons(std::size_t n);
  static Partition all_in_one(std::size_t n);
  static Partition from_assignment(std::vector<std::uint32_t> assignment);  // compacts ids

  // Relabels contexts by first occurrence; equal keys mean equal partitions
  // up to relabeling.
  std::vector<std::uint32_t> canonical_key() const;

  void validate() const;  // contiguous ids, every id used
};

// B(t) = (1/N) e^{-tL} - (1/N^2) 11^T, so that sum_i h_i^T B h_i is the
// stability r(t;H) with the uniform null model. Optional sparsification
// drops kernel entries with K_uv/N < eps before the subtraction.
struct QualityMatrix {
  std::size_t order = 0;
  double time = 0.0;
  linalg::Matrix entries;
};

QualityMatrix quality_matrix(const KernelMatrix& kernel, double sparsify_eps = 0.0);

// Sum over contexts of within-context entries of Q.
double stability_score(const QualityMatrix& q, const Partition& p);

// The stability expression with a linear size null term,
// sum_i (h_i^T e^{-tL} h_i - |h_i|_1 / N); reported for comparison only,
// never optimized (it is constant-shifted toward the all-in-one partition).
double stability_score_linear_null(const KernelMatrix& kernel, const Partition& p);

struct LouvainRun {
  Partition partition;
  double total_gain = 0.0;
  int levels = 0;
};

// Generalized Louvain on a dense quality matrix: seeded-shuffle local moves
// with gain tolerance 1e-12, then aggregation, iterated to a fixed point.
// Deterministic given rng_seed.
LouvainRun louvain_detailed(const QualityMatrix& q, std::uint64_t rng_seed);
Partition louvain(const QualityMatrix& q, std::uint64_t rng_seed);

// Reassigns every size-1 context with at least one edge to the adjacent
// context receiving the largest total edge weight (ties to the lowest
// context id), repeating until no singleton context remains. An all-singleton
// partition is returned unchanged.
Partition merge_singletons(const Partition& p, const WeightedGraph& w);
Partition merge_singletons(const Partition& p, const LaplacianMatrix& L);

struct BestPartitionResult {
  Partition best;
  std::vector<Partition> ensemble;  // merged + scored, by run index
};

// `runs` Louvain runs with per-run seeds derived from rng_seed, singleton
// contexts merged, highest score wins (ties to the lowest run index).
BestPartitionResult best_partition_on(const QualityMatrix& q, const LaplacianMatrix& L,
                                      int runs, std::uint64_t rng_seed, int workers);

BestPartitionResult best_partition(const LaplacianMatrix& L, double t, int runs,
                                   std::uint64_t rng_seed, int workers,
                                   std::size_t dense_limit = kDefaultDenseLimit,
                                   int cheb_degree = kDefaultChebDegree);

}  // namespace heatsift
