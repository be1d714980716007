#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heatsift/heat_kernel.hpp"

namespace heatsift {

// Per-node concentrations c_u(t) = ||e^{-tL} delta_u||_2 at one scale.
struct ConcentrationProfile {
  double time = 0.0;
  std::vector<double> values;
  double mean = 0.0;
  double std_dev = 0.0;  // population

  std::size_t size() const noexcept { return values.size(); }
};

ConcentrationProfile concentration_profile(const KernelMatrix& kernel);

// Profile from raw concentration values (mean/std filled in).
ConcentrationProfile make_profile(double time, std::vector<double> values);

// Ranked concentrations with the two-standard-deviation flagging rule
// c_u(t) >= mean + 2 std (inclusive). A zero-variance profile flags nothing.
struct AnomalyReport {
  double time = 0.0;
  double threshold = 0.0;
  std::vector<NodeIndex> ranking;  // by descending score, ties by ascending index
  std::vector<double> scores;      // indexed by node
  std::vector<NodeIndex> flagged;  // ascending node index
  std::optional<std::vector<std::uint32_t>> contexts;  // node -> context id
};

AnomalyReport detect(const ConcentrationProfile& profile);

// Concentration of one node across an ascending time grid, via cheb_apply
// per time (no full kernel).
std::vector<double> concentration_curve(const LaplacianMatrix& L, NodeIndex node,
                                        std::span<const double> times,
                                        int cheb_degree = kDefaultChebDegree);

void write_report_json(const AnomalyReport& report, const std::vector<std::string>& node_ids,
                       std::ostream& out);
void write_report_csv(const AnomalyReport& report, const std::vector<std::string>& node_ids,
                      std::ostream& out);

}  // namespace heatsift
