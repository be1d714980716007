#include "heatsift/scales.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "heatsift/errors.hpp"
#include "heatsift/parallel.hpp"
#include "heatsift/rng.hpp"

namespace heatsift {

double conditional_entropy(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size()) throw ShapeError("partitions must cover the same nodes");
  const std::size_t n = p1.size();
  const std::size_t k1 = p1.num_contexts;
  const std::size_t k2 = p2.num_contexts;

  std::vector<std::uint64_t> joint(k1 * k2, 0);
  std::vector<std::uint64_t> marginal2(k2, 0);
  for (std::size_t u = 0; u < n; ++u) {
    ++joint[p1.assignment[u] * k2 + p2.assignment[u]];
    ++marginal2[p2.assignment[u]];
  }

  double h = 0.0;
  for (std::size_t c1 = 0; c1 < k1; ++c1)
    for (std::size_t c2 = 0; c2 < k2; ++c2) {
      const std::uint64_t count = joint[c1 * k2 + c2];
      if (count == 0) continue;
      const double p = static_cast<double>(count) / static_cast<double>(n);
      h -= p * std::log(static_cast<double>(count) / static_cast<double>(marginal2[c2]));
    }
  return std::max(0.0, h);
}

double variation_of_information(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size()) throw ShapeError("partitions must cover the same nodes");
  if (p1.size() < 2) throw SizeError("variation_of_information requires N >= 2 (log N = 0)");
  const double vi = (conditional_entropy(p1, p2) + conditional_entropy(p2, p1)) /
                    std::log(static_cast<double>(p1.size()));
  return std::clamp(vi, 0.0, 1.0);
}

namespace {

// Mean pairwise VI over the run ensemble, all pairs up to the budget,
// seeded uniform pair subsampling beyond.
double ensemble_vi(const std::vector<Partition>& ensemble, std::size_t max_pairs,
                   std::uint64_t seed, int workers) {
  const std::size_t r = ensemble.size();
  if (r < 2) return 0.0;
  if (max_pairs == 0) max_pairs = 1;
  const std::uint64_t total = static_cast<std::uint64_t>(r) * (r - 1) / 2;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (total <= max_pairs) {
    pairs.reserve(static_cast<std::size_t>(total));
    for (std::uint32_t i = 0; i + 1 < r; ++i)
      for (std::uint32_t j = i + 1; j < r; ++j) pairs.emplace_back(i, j);
  } else {
    rng::Stream stream(seed);
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(max_pairs * 2);
    pairs.reserve(max_pairs);
    while (pairs.size() < max_pairs) {
      const std::uint64_t i = stream.below(r);
      const std::uint64_t j = stream.below(r);
      if (i == j) continue;
      const std::uint64_t a = std::min(i, j), b = std::max(i, j);
      if (taken.insert(a * r + b).second)
        pairs.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
    }
  }

  std::vector<double> vi(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    vi[k] = variation_of_information(ensemble[pairs[k].first], ensemble[pairs[k].second]);
  });
  double sum = 0.0;
  for (double v : vi) sum += v;
  return sum / static_cast<double>(vi.size());
}

}  // namespace

ScaleScan scan(const LaplacianMatrix& L, std::span<const double> times, std::uint64_t rng_seed,
               int workers, const ScanOptions& options) {
  if (times.empty()) throw ParameterError("scan requires at least one time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw ParameterError("scan times must be positive");
    if (i > 0 && times[i] < times[i - 1]) throw ParameterError("scan times must be ascending");
  }
  if (options.runs < 1) throw ParameterError("runs must be >= 1");

  ScaleScan result;
  result.times.assign(times.begin(), times.end());
  const std::size_t t_count = times.size();
  result.best_partitions.resize(t_count);
  result.num_clusters.resize(t_count);
  result.vi_within.resize(t_count);
  result.concentrations.resize(t_count);

  // One factorization serves every time on the exact path.
  std::optional<SpectralFactor> factor;
  if (L.order <= options.dense_limit) factor = SpectralFactor::compute(L);

  for (std::size_t i = 0; i < t_count; ++i) {
    const double t = times[i];
    KernelMatrix kernel;
    try {
      kernel = factor ? factor->kernel_at(t)
                      : full_kernel_approx(L, t, options.cheb_degree, workers,
                                           GuardPolicy::escalate, options.refine_bound);
    } catch (const Error& e) {
      throw NumericError("scan aborted at t = " + format_double(t) + ": " + e.what());
    }
    result.concentrations[i] = concentration_profile(kernel);
    const QualityMatrix q = quality_matrix(kernel);
    // Sub-seeds hang off the time value itself so that a duplicated grid
    // point reproduces identical results.
    const std::uint64_t t_seed = rng::derive(rng_seed, "time", rng::bits_of(t));
    auto best = best_partition_on(q, L, options.runs, t_seed, workers);
    result.vi_within[i] = ensemble_vi(best.ensemble, options.max_vi_pairs,
                                      rng::derive(rng_seed, "vi-pairs", rng::bits_of(t)), workers);
    result.num_clusters[i] = best.best.num_contexts;
    result.best_partitions[i] = std::move(best.best);
  }

  result.vi_cross = linalg::Matrix(t_count, t_count);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cross;
  for (std::uint32_t i = 0; i + 1 < t_count; ++i)
    for (std::uint32_t j = i + 1; j < t_count; ++j) cross.emplace_back(i, j);
  parallel_for(cross.size(), workers, [&](std::size_t k) {
    const auto [i, j] = cross[k];
    const double vi =
        variation_of_information(result.best_partitions[i], result.best_partitions[j]);
    result.vi_cross(i, j) = vi;
    result.vi_cross(j, i) = vi;
  });
  return result;
}

namespace {

// Linear-interpolation quantile of a copy of v.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

ScaleSelection select_scales(const ScaleScan& scan, double dip_quantile, double plateau_eps,
                             std::size_t min_plateau) {
  ScaleSelection selection;
  if (scan.times.empty()) return selection;

  // Collapse repeated grid points; duplicates carry identical results.
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i < scan.times.size(); ++i)
    if (i == 0 || scan.times[i] != scan.times[i - 1]) grid.push_back(i);

  std::vector<double> vi_values;
  vi_values.reserve(grid.size());
  for (std::size_t g : grid) vi_values.push_back(scan.vi_within[g]);
  const double dip_threshold = quantile(vi_values, dip_quantile);

  std::vector<std::vector<std::uint32_t>> selected_keys;
  std::size_t a = 0;
  while (a < grid.size()) {
    // Extend [a, b] while every pair inside stays under plateau_eps.
    std::size_t b = a;
    while (b + 1 < grid.size()) {
      bool ok = true;
      for (std::size_t k = a; k <= b && ok; ++k)
        if (!(scan.vi_cross(grid[k], grid[b + 1]) < plateau_eps)) ok = false;
      if (!ok) break;
      ++b;
    }
    const std::size_t len = b - a + 1;
    if (len >= min_plateau) {
      std::size_t cand = a;
      for (std::size_t k = a + 1; k <= b; ++k)
        if (scan.vi_within[grid[k]] < scan.vi_within[grid[cand]]) cand = k;
      if (scan.vi_within[grid[cand]] <= dip_threshold) {
        const std::size_t gi = grid[cand];
        auto key = scan.best_partitions[gi].canonical_key();
        const bool duplicate =
            std::any_of(selected_keys.begin(), selected_keys.end(),
                        [&key](const auto& k) { return k == key; });
        if (!duplicate) {
          selected_keys.push_back(std::move(key));
          SelectedScale s;
          s.grid_index = gi;
          s.time = scan.times[gi];
          s.num_clusters = scan.num_clusters[gi];
          s.vi_within = scan.vi_within[gi];
          s.dip_threshold = dip_threshold;
          s.plateau_start = scan.times[grid[a]];
          s.plateau_end = scan.times[grid[b]];
          s.plateau_length = len;
          selection.selected.push_back(s);
        }
      }
    }
    a = b + 1;
  }
  return selection;
}

void write_vi_within_csv(const ScaleScan& scan, std::ostream& out) {
  out << "t,num_clusters,vi_within\n";
  for (std::size_t i = 0; i < scan.times.size(); ++i)
    out << format_double(scan.times[i]) << ',' << scan.num_clusters[i] << ','
        << format_double(scan.vi_within[i]) << '\n';
}

void write_vi_cross_csv(const ScaleScan& scan, std::ostream& out) {
  out << "t";
  for (double t : scan.times) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < scan.times.size(); ++i) {
    out << format_double(scan.times[i]);
    for (std::size_t j = 0; j < scan.times.size(); ++j)
      out << ',' << format_double(scan.vi_cross(i, j));
    out << '\n';
  }
}

void write_partition_tsv(const Partition& p, const std::vector<std::string>& node_ids,
                         std::ostream& out) {
  out << "id\tcontext\n";
  for (std::size_t u = 0; u < p.size(); ++u)
    out << node_ids[u] << '\t' << p.assignment[u] << '\n';
}

void write_concentration_csv(const ConcentrationProfile& profile,
                             const std::vector<std::string>& node_ids, std::ostream& out) {
  out << "id,concentration\n";
  for (std::size_t u = 0; u < profile.size(); ++u)
    out << node_ids[u] << ',' << format_double(profile.values[u]) << '\n';
}

void write_partition_json(const Partition& p, const std::vector<std::string>& node_ids,
                          std::ostream& out) {
  nlohmann::json doc;
  if (p.time) doc["time"] = *p.time;
  if (p.score) doc["stability"] = *p.score;
  doc["num_contexts"] = p.num_contexts;
  auto nodes = nlohmann::json::array();
  for (std::size_t u = 0; u < p.size(); ++u)
    nodes.push_back({{"id", node_ids[u]}, {"context", p.assignment[u]}});
  doc["nodes"] = std::move(nodes);
  out << doc.dump(2) << '\n';
}

}  // namespace heatsift
