#include "heatsift/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heatsift/errors.hpp"
#include "heatsift/parallel.hpp"
#include "heatsift/rng.hpp"

namespace heatsift {

namespace {

constexpr double kGainTolerance = 1e-12;

}  // namespace

Partition Partition::singletons(std::size_t n) {
  Partition p;
  p.assignment.resize(n);
  std::iota(p.assignment.begin(), p.assignment.end(), 0u);
  p.num_contexts = static_cast<std::uint32_t>(n);
  return p;
}

Partition Partition::all_in_one(std::size_t n) {
  Partition p;
  p.assignment.assign(n, 0u);
  p.num_contexts = n > 0 ? 1u : 0u;
  return p;
}

Partition Partition::from_assignment(std::vector<std::uint32_t> assignment) {
  Partition p;
  p.assignment = std::move(assignment);
  std::uint32_t next = 0;
  std::vector<std::int64_t> remap;
  for (auto& a : p.assignment) {
    if (a >= remap.size()) remap.resize(a + 1, -1);
    if (remap[a] < 0) remap[a] = next++;
    a = static_cast<std::uint32_t>(remap[a]);
  }
  p.num_contexts = next;
  return p;
}

std::vector<std::uint32_t> Partition::canonical_key() const {
  std::vector<std::uint32_t> key = assignment;
  std::vector<std::int64_t> remap(num_contexts, -1);
  std::uint32_t next = 0;
  for (auto& a : key) {
    if (remap[a] < 0) remap[a] = next++;
    a = static_cast<std::uint32_t>(remap[a]);
  }
  return key;
}

void Partition::validate() const {
  std::vector<bool> used(num_contexts, false);
  for (auto a : assignment) {
    if (a >= num_contexts) throw DataError("partition context id out of range");
    used[a] = true;
  }
  for (bool u : used)
    if (!u) throw DataError("partition has an unused context id");
}

QualityMatrix quality_matrix(const KernelMatrix& kernel, double sparsify_eps) {
  const std::size_t n = kernel.order;
  QualityMatrix q;
  q.order = n;
  q.time = kernel.time;
  q.entries = linalg::Matrix(n, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double null_term = inv_n * inv_n;
  for (std::size_t i = 0; i < n; ++i) {
    const double* krow = kernel.entries.row(i);
    double* qrow = q.entries.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      double scaled = krow[j] * inv_n;
      if (sparsify_eps > 0.0 && scaled < sparsify_eps) scaled = 0.0;
      qrow[j] = scaled - null_term;
    }
  }
  return q;
}

double stability_score(const QualityMatrix& q, const Partition& p) {
  if (p.size() != q.order) throw ShapeError("partition length does not match matrix order");
  double total = 0.0;
  for (std::size_t i = 0; i < q.order; ++i) {
    const double* row = q.entries.row(i);
    const std::uint32_t ci = p.assignment[i];
    double s = 0.0;
    for (std::size_t j = 0; j < q.order; ++j)
      if (p.assignment[j] == ci) s += row[j];
    total += s;
  }
  return total;
}

double stability_score_linear_null(const KernelMatrix& kernel, const Partition& p) {
  if (p.size() != kernel.order) throw ShapeError("partition length does not match kernel order");
  double total = 0.0;
  for (std::size_t i = 0; i < kernel.order; ++i) {
    const double* row = kernel.entries.row(i);
    const std::uint32_t ci = p.assignment[i];
    for (std::size_t j = 0; j < kernel.order; ++j)
      if (p.assignment[j] == ci) total += row[j];
  }
  // The linear null term sums to |h_i|_1 / N over contexts, i.e. exactly 1.
  return total - 1.0;
}

namespace {

// One Louvain level: local moves on a dense quality matrix until no move
// improves by more than the tolerance. Returns the number of moves.
std::size_t local_moves(const linalg::Matrix& q, std::vector<std::uint32_t>& assign,
                        rng::Stream& stream, double& gain_acc) {
  const std::size_t n = q.rows();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  stream.shuffle(order);

  std::vector<double> ctx_sum(n, 0.0);
  std::vector<std::uint32_t> ctx_size(n, 0);
  for (auto a : assign) ++ctx_size[a];

  std::size_t total_moves = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::uint32_t u : order) {
      const double* row = q.row(u);
      for (std::size_t j = 0; j < n; ++j) ctx_sum[assign[j]] = 0.0;
      for (std::size_t j = 0; j < n; ++j) ctx_sum[assign[j]] += row[j];

      // Moving u from A to C changes the score by 2(s_C - (s_A - B_uu));
      // maximizing over C reduces to maximizing s_C. Ascending scan with a
      // strict comparison keeps the lowest context id on ties.
      const std::uint32_t current = assign[u];
      const double stay = ctx_sum[current] - q(u, u);
      std::uint32_t best = current;
      double best_sum = stay;
      for (std::uint32_t c = 0; c < n; ++c) {
        if (c == current || ctx_size[c] == 0) continue;
        if (ctx_sum[c] > best_sum) {
          best_sum = ctx_sum[c];
          best = c;
        }
      }
      if (best == current) continue;
      const double gain = 2.0 * (best_sum - stay);
      if (gain > kGainTolerance) {
        assign[u] = best;
        --ctx_size[current];
        ++ctx_size[best];
        gain_acc += gain;
        ++total_moves;
        moved = true;
      }
    }
  }
  return total_moves;
}

linalg::Matrix aggregate(const linalg::Matrix& q, const std::vector<std::uint32_t>& assign,
                         std::uint32_t k) {
  const std::size_t n = q.rows();
  linalg::Matrix agg(k, k);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = q.row(i);
    double* arow = agg.row(assign[i]);
    for (std::size_t j = 0; j < n; ++j) arow[assign[j]] += row[j];
  }
  return agg;
}

}  // namespace

LouvainRun louvain_detailed(const QualityMatrix& q, std::uint64_t rng_seed) {
  const std::size_t n = q.order;
  rng::Stream stream(rng_seed);

  std::vector<std::uint32_t> node_to_comm(n);
  std::iota(node_to_comm.begin(), node_to_comm.end(), 0u);

  LouvainRun run;
  // Each pass sweeps local moves at full resolution (warm-started from the
  // current partition) and then climbs the aggregation pyramid; repeated
  // until a whole pass yields no move, which refines blocks a single pass
  // would freeze.
  while (true) {
    ++run.levels;
    std::size_t pass_moves = local_moves(q.entries, node_to_comm, stream, run.total_gain);
    Partition base = Partition::from_assignment(node_to_comm);
    node_to_comm = base.assignment;

    if (base.num_contexts > 1 && base.num_contexts < n) {
      linalg::Matrix level_q = aggregate(q.entries, base.assignment, base.num_contexts);
      std::vector<std::uint32_t> comm_to_final(base.num_contexts);
      std::iota(comm_to_final.begin(), comm_to_final.end(), 0u);
      std::vector<std::uint32_t> level_assign = comm_to_final;
      while (true) {
        const std::size_t moves = local_moves(level_q, level_assign, stream, run.total_gain);
        pass_moves += moves;
        Partition level = Partition::from_assignment(level_assign);
        for (auto& f : comm_to_final) f = level.assignment[f];
        if (moves == 0 || level.num_contexts == level_q.rows() || level.num_contexts <= 1) break;
        level_q = aggregate(level_q, level.assignment, level.num_contexts);
        level_assign.assign(level.num_contexts, 0u);
        std::iota(level_assign.begin(), level_assign.end(), 0u);
      }
      for (auto& c : node_to_comm) c = comm_to_final[c];
    }
    if (pass_moves == 0) break;
  }

  run.partition = Partition::from_assignment(std::move(node_to_comm));
  run.partition.time = q.time;
  run.partition.score = stability_score(q, run.partition);
  return run;
}

Partition louvain(const QualityMatrix& q, std::uint64_t rng_seed) {
  return louvain_detailed(q, rng_seed).partition;
}

namespace {

struct NeighborList {
  std::vector<std::int64_t> offsets;
  std::vector<NodeIndex> targets;
  std::vector<double> weights;
};

NeighborList adjacency_of(const WeightedGraph& w) {
  NeighborList a;
  const std::size_t n = w.base.node_count;
  std::vector<std::int64_t> degree(n, 0);
  for (const Edge& e : w.base.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  a.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) a.offsets[i + 1] = a.offsets[i] + degree[i];
  a.targets.resize(static_cast<std::size_t>(a.offsets[n]));
  a.weights.resize(static_cast<std::size_t>(a.offsets[n]));
  std::vector<std::int64_t> cursor(a.offsets.begin(), a.offsets.end() - 1);
  for (std::size_t e = 0; e < w.base.edges.size(); ++e) {
    const Edge& edge = w.base.edges[e];
    a.targets[static_cast<std::size_t>(cursor[edge.u])] = edge.v;
    a.weights[static_cast<std::size_t>(cursor[edge.u]++)] = w.weights[e];
    a.targets[static_cast<std::size_t>(cursor[edge.v])] = edge.u;
    a.weights[static_cast<std::size_t>(cursor[edge.v]++)] = w.weights[e];
  }
  return a;
}

NeighborList adjacency_of(const LaplacianMatrix& L) {
  NeighborList a;
  a.offsets.assign(L.order + 1, 0);
  for (std::size_t u = 0; u < L.order; ++u) {
    std::int64_t deg = 0;
    L.for_each_neighbor(static_cast<NodeIndex>(u), [&deg](NodeIndex, double) { ++deg; });
    a.offsets[u + 1] = a.offsets[u] + deg;
  }
  a.targets.resize(static_cast<std::size_t>(a.offsets[L.order]));
  a.weights.resize(static_cast<std::size_t>(a.offsets[L.order]));
  std::vector<std::int64_t> cursor(a.offsets.begin(), a.offsets.end() - 1);
  for (std::size_t u = 0; u < L.order; ++u)
    L.for_each_neighbor(static_cast<NodeIndex>(u), [&](NodeIndex v, double w) {
      a.targets[static_cast<std::size_t>(cursor[u])] = v;
      a.weights[static_cast<std::size_t>(cursor[u]++)] = w;
    });
  return a;
}

Partition merge_singletons_impl(const Partition& p, const NeighborList& adj) {
  const std::size_t n = p.size();
  std::vector<std::uint32_t> assign = p.assignment;
  std::vector<std::uint32_t> context_size(p.num_contexts, 0);
  for (auto a : assign) ++context_size[a];

  // An all-singleton partition is a fixed point.
  if (std::all_of(context_size.begin(), context_size.end(),
                  [](std::uint32_t s) { return s == 1; })) {
    Partition out = p;
    out.score.reset();
    return out;
  }

  std::vector<double> weight_to(p.num_contexts, 0.0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (NodeIndex u = 0; u < n; ++u) {
      const std::uint32_t own = assign[u];
      if (context_size[own] != 1) continue;
      if (adj.offsets[u] == adj.offsets[u + 1]) continue;  // isolated: no-op

      std::fill(weight_to.begin(), weight_to.end(), 0.0);
      for (std::int64_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k)
        weight_to[assign[adj.targets[static_cast<std::size_t>(k)]]] +=
            adj.weights[static_cast<std::size_t>(k)];

      std::uint32_t best = own;
      double best_weight = 0.0;
      for (std::uint32_t c = 0; c < p.num_contexts; ++c) {
        if (c == own) continue;
        if (weight_to[c] > best_weight) {
          best_weight = weight_to[c];
          best = c;
        }
      }
      if (best == own) continue;  // neighbors all in own context cannot happen for singletons
      assign[u] = best;
      --context_size[own];
      ++context_size[best];
      progress = true;
    }
  }

  Partition out = Partition::from_assignment(std::move(assign));
  out.time = p.time;
  return out;
}

}  // namespace

Partition merge_singletons(const Partition& p, const WeightedGraph& w) {
  if (p.size() != w.base.node_count) throw ShapeError("partition length does not match graph");
  return merge_singletons_impl(p, adjacency_of(w));
}

Partition merge_singletons(const Partition& p, const LaplacianMatrix& L) {
  if (p.size() != L.order) throw ShapeError("partition length does not match graph");
  return merge_singletons_impl(p, adjacency_of(L));
}

BestPartitionResult best_partition_on(const QualityMatrix& q, const LaplacianMatrix& L,
                                      int runs, std::uint64_t rng_seed, int workers) {
  if (runs < 1) throw ParameterError("runs must be >= 1");
  const NeighborList adj = adjacency_of(L);

  BestPartitionResult result;
  result.ensemble.resize(static_cast<std::size_t>(runs));
  parallel_for(static_cast<std::size_t>(runs), workers, [&](std::size_t r) {
    Partition p = louvain(q, rng::derive(rng_seed, "louvain-run", r));
    p = merge_singletons_impl(p, adj);
    p.time = q.time;
    p.score = stability_score(q, p);
    result.ensemble[r] = std::move(p);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < result.ensemble.size(); ++r)
    if (*result.ensemble[r].score > *result.ensemble[best].score) best = r;
  result.best = result.ensemble[best];
  return result;
}

BestPartitionResult best_partition(const LaplacianMatrix& L, double t, int runs,
                                   std::uint64_t rng_seed, int workers,
                                   std::size_t dense_limit, int cheb_degree) {
  const KernelMatrix kernel = heat_kernel_auto(L, t, dense_limit, cheb_degree, workers);
  const QualityMatrix q = quality_matrix(kernel);
  return best_partition_on(q, L, runs, rng_seed, workers);
}

}  // namespace heatsift
