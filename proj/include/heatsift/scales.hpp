#pragma once

#include <string>
#include <vector>

#include "heatsift/anomaly.hpp"
#include "heatsift/stability.hpp"

namespace heatsift {

// H(P1|P2) over the contingency table with uniform node probability,
// natural log, 0 log 0 = 0.
double conditional_entropy(const Partition& p1, const Partition& p2);

// (H(P1|P2) + H(P2|P1)) / log N, in [0, 1]; 0 iff equal up to relabeling.
double variation_of_information(const Partition& p1, const Partition& p2);

struct ScanOptions {
  int runs = 100;
  std::size_t dense_limit = kDefaultDenseLimit;
  int cheb_degree = kDefaultChebDegree;
  std::size_t max_vi_pairs = 1000;  // ensemble VI pair budget per time
  bool refine_bound = false;        // power-iteration lambda_max on the cheb path
};

// Per-time record of best partitions, ensemble VI(t), cross-time VI(t,t'),
// cluster counts and concentration profiles.
struct ScaleScan {
  std::vector<double> times;
  std::vector<Partition> best_partitions;
  std::vector<std::uint32_t> num_clusters;
  std::vector<double> vi_within;
  linalg::Matrix vi_cross;  // T x T, zero diagonal, symmetric
  std::vector<ConcentrationProfile> concentrations;
};

ScaleScan scan(const LaplacianMatrix& L, std::span<const double> times, std::uint64_t rng_seed,
               int workers, const ScanOptions& options = {});

struct SelectedScale {
  std::size_t grid_index = 0;
  double time = 0.0;
  std::uint32_t num_clusters = 0;
  double vi_within = 0.0;
  double dip_threshold = 0.0;  // the vi_within quantile gate
  double plateau_start = 0.0;
  double plateau_end = 0.0;
  std::size_t plateau_length = 0;
};

struct ScaleSelection {
  std::vector<SelectedScale> selected;  // ascending time
};

// Plateaus are maximal contiguous grid blocks with all pairwise VI(t,t')
// below plateau_eps and at least min_plateau points; within each block the
// time minimizing VI(t) is selected if it clears the dip_quantile gate.
// Blocks whose best partitions coincide are merged.
ScaleSelection select_scales(const ScaleScan& scan, double dip_quantile, double plateau_eps,
                             std::size_t min_plateau);

// Plot-ready exports.
void write_vi_within_csv(const ScaleScan& scan, std::ostream& out);
void write_vi_cross_csv(const ScaleScan& scan, std::ostream& out);
void write_partition_tsv(const Partition& p, const std::vector<std::string>& node_ids,
                         std::ostream& out);
void write_partition_json(const Partition& p, const std::vector<std::string>& node_ids,
                          std::ostream& out);
void write_concentration_csv(const ConcentrationProfile& profile,
                             const std::vector<std::string>& node_ids, std::ostream& out);

}  // namespace heatsift
