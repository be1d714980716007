#include "heatsift/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "heatsift/errors.hpp"
#include "heatsift/simd.hpp"

namespace heatsift {

ConcentrationProfile make_profile(double time, std::vector<double> values) {
  ConcentrationProfile p;
  p.time = time;
  p.values = std::move(values);
  const auto n = static_cast<double>(p.values.size());
  double mean = 0.0;
  for (double v : p.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : p.values) var += (v - mean) * (v - mean);
  var /= n;
  p.mean = mean;
  p.std_dev = std::sqrt(std::max(0.0, var));
  return p;
}

ConcentrationProfile concentration_profile(const KernelMatrix& kernel) {
  const std::size_t n = kernel.order;
  std::vector<double> values(n);
  // Symmetric kernel: column u norm = row u norm, and rows are contiguous.
  for (std::size_t u = 0; u < n; ++u)
    values[u] = std::sqrt(simd::sumsq(kernel.entries.row(u), n));
  return make_profile(kernel.time, std::move(values));
}

AnomalyReport detect(const ConcentrationProfile& profile) {
  const std::size_t n = profile.size();
  if (n < 2) throw SizeError("detect requires at least 2 nodes");

  AnomalyReport report;
  report.time = profile.time;
  report.scores = profile.values;
  report.threshold = profile.mean + 2.0 * profile.std_dev;

  report.ranking.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.ranking[i] = static_cast<NodeIndex>(i);
  std::sort(report.ranking.begin(), report.ranking.end(), [&](NodeIndex a, NodeIndex b) {
    if (profile.values[a] != profile.values[b]) return profile.values[a] > profile.values[b];
    return a < b;
  });

  // A constant profile exhibits no outlier even though c_u >= mean holds
  // for every node.
  if (profile.std_dev > 0.0) {
    for (std::size_t u = 0; u < n; ++u)
      if (profile.values[u] >= report.threshold) report.flagged.push_back(static_cast<NodeIndex>(u));
  }
  return report;
}

std::vector<double> concentration_curve(const LaplacianMatrix& L, NodeIndex node,
                                        std::span<const double> times, int cheb_degree) {
  if (node >= L.order) throw ReferenceError("node index out of range");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw ParameterError("times must be nonnegative");
    if (i > 0 && times[i] < times[i - 1]) throw ParameterError("times must be ascending");
  }
  const double lambda_max = spectral_bound(L);
  std::vector<double> delta(L.order, 0.0);
  delta[node] = 1.0;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto coeffs = guarded_coefficients(t, lambda_max, cheb_degree);
    const auto filtered = cheb_apply(L, coeffs, delta);
    out.push_back(std::sqrt(simd::sumsq(filtered.data(), filtered.size())));
  }
  return out;
}

void write_report_json(const AnomalyReport& report, const std::vector<std::string>& node_ids,
                       std::ostream& out) {
  nlohmann::json doc;
  doc["time"] = report.time;
  doc["threshold"] = report.threshold;
  std::vector<bool> is_flagged(report.scores.size(), false);
  for (NodeIndex u : report.flagged) is_flagged[u] = true;
  auto nodes = nlohmann::json::array();
  for (std::size_t rank = 0; rank < report.ranking.size(); ++rank) {
    const NodeIndex u = report.ranking[rank];
    nlohmann::json entry;
    entry["id"] = node_ids[u];
    entry["score"] = report.scores[u];
    entry["rank"] = rank;
    entry["flagged"] = static_cast<bool>(is_flagged[u]);
    if (report.contexts)
      entry["context"] = (*report.contexts)[u];
    else
      entry["context"] = nullptr;
    nodes.push_back(std::move(entry));
  }
  doc["nodes"] = std::move(nodes);
  out << doc.dump(2) << '\n';
}

void write_report_csv(const AnomalyReport& report, const std::vector<std::string>& node_ids,
                      std::ostream& out) {
  std::vector<bool> is_flagged(report.scores.size(), false);
  for (NodeIndex u : report.flagged) is_flagged[u] = true;
  out << "id,score,rank,flagged,context\n";
  for (std::size_t rank = 0; rank < report.ranking.size(); ++rank) {
    const NodeIndex u = report.ranking[rank];
    out << node_ids[u] << ',' << format_double(report.scores[u]) << ',' << rank << ','
        << (is_flagged[u] ? 1 : 0) << ',';
    if (report.contexts) out << (*report.contexts)[u];
    out << '\n';
  }
}

}  // namespace heatsift
