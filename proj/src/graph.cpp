#include "heatsift/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "heatsift/errors.hpp"
#include "heatsift/rng.hpp"

namespace heatsift {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'");
  return x;
}

double AttributedGraph::attribute_distance(NodeIndex u, NodeIndex v) const {
  const double* a = attributes.data() + static_cast<std::size_t>(u) * attribute_dim;
  const double* b = attributes.data() + static_cast<std::size_t>(v) * attribute_dim;
  double s = 0.0;
  for (std::size_t k = 0; k < attribute_dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

void AttributedGraph::validate() const {
  if (node_count < 2) throw SizeError("graph requires at least 2 nodes");
  if (attribute_dim < 1) throw SizeError("graph requires at least 1 attribute");
  if (attributes.size() != node_count * attribute_dim)
    throw ShapeError("attribute matrix shape mismatch");
  if (node_ids.size() != node_count) throw ShapeError("node_ids length mismatch");
  for (double a : attributes)
    if (!std::isfinite(a)) throw DataError("non-finite attribute value");
  std::unordered_set<std::string_view> seen;
  seen.reserve(node_ids.size());
  for (const auto& id : node_ids)
    if (!seen.insert(id).second) throw DataError("duplicate node id: " + id);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u >= e.v) throw DataError("edge not canonical (self-loop or unordered)");
    if (e.v >= node_count) throw ReferenceError("edge endpoint out of range");
    if (i > 0 && !(edges[i - 1] < e)) throw DataError("edges not sorted/unique");
  }
  if (labels) {
    if (labels->size() != node_count) throw ShapeError("labels length mismatch");
    for (auto l : *labels)
      if (l > 1) throw DataError("labels must be 0 or 1");
  }
}

LoadResult load_attributed_graph(const std::string& nodes_path, const std::string& edges_path) {
  LoadResult result;
  AttributedGraph& g = result.graph;

  const auto node_lines = read_lines(nodes_path);
  if (node_lines.empty()) throw ParseError("empty nodes file: " + nodes_path);
  const auto header = split_tabs(strip_cr(node_lines[0]));
  if (header.size() < 2 || header[0] != "id")
    throw ParseError("nodes header must be 'id<TAB>attr_1...[<TAB>label]'", 1);
  const bool has_label = header.back() == "label";
  const std::size_t d = header.size() - 1 - (has_label ? 1 : 0);
  if (d < 1) throw ParseError("nodes file has no attribute columns", 1);
  for (std::size_t k = 0; k < d; ++k)
    if (header[1 + k] != "attr_" + std::to_string(k + 1))
      throw ParseError("unexpected attribute column name '" + std::string(header[1 + k]) + "'", 1);

  g.attribute_dim = d;
  if (has_label) g.labels.emplace();
  std::unordered_map<std::string, NodeIndex> index_of;
  for (std::size_t ln = 1; ln < node_lines.size(); ++ln) {
    const auto line = strip_cr(node_lines[ln]);
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns, found " +
                           std::to_string(cols.size()),
                       ln + 1);
    std::string id(cols[0]);
    if (id.empty()) throw ParseError("empty node id", ln + 1);
    if (!index_of.emplace(id, static_cast<NodeIndex>(g.node_count)).second)
      throw ParseError("duplicate node id '" + id + "'", ln + 1);
    for (std::size_t k = 0; k < d; ++k) {
      double v;
      try {
        v = parse_double(cols[1 + k]);
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()), ln + 1);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite attribute value", ln + 1);
      g.attributes.push_back(v);
    }
    if (has_label) {
      if (cols.back() == "0")
        g.labels->push_back(0);
      else if (cols.back() == "1")
        g.labels->push_back(1);
      else
        throw ParseError("label must be 0 or 1", ln + 1);
    }
    g.node_ids.push_back(std::move(id));
    ++g.node_count;
  }
  if (g.node_count < 2) throw SizeError("graph requires at least 2 nodes");

  const auto edge_lines = read_lines(edges_path);
  if (edge_lines.empty()) throw ParseError("empty edges file: " + edges_path);
  const auto eheader = split_tabs(strip_cr(edge_lines[0]));
  if (eheader.size() != 2 || eheader[0] != "src" || eheader[1] != "dst")
    throw ParseError("edges header must be 'src<TAB>dst'", 1);
  for (std::size_t ln = 1; ln < edge_lines.size(); ++ln) {
    const auto line = strip_cr(edge_lines[ln]);
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 2) throw ParseError("expected 2 columns", ln + 1);
    const auto su = index_of.find(std::string(cols[0]));
    const auto sv = index_of.find(std::string(cols[1]));
    if (su == index_of.end())
      throw ReferenceError("edge references unknown node id '" + std::string(cols[0]) + "'");
    if (sv == index_of.end())
      throw ReferenceError("edge references unknown node id '" + std::string(cols[1]) + "'");
    NodeIndex u = su->second, v = sv->second;
    if (u == v) {
      ++result.dropped_self_loops;
      continue;
    }
    if (u > v) std::swap(u, v);
    g.edges.push_back({u, v});
  }
  std::sort(g.edges.begin(), g.edges.end());
  const auto last = std::unique(g.edges.begin(), g.edges.end());
  result.dropped_duplicate_edges = static_cast<std::size_t>(g.edges.end() - last);
  g.edges.erase(last, g.edges.end());

  g.validate();
  return result;
}

void save_attributed_graph(const AttributedGraph& g, const std::string& nodes_path,
                           const std::string& edges_path) {
  std::ofstream nodes(nodes_path, std::ios::binary);
  if (!nodes) throw DataError("cannot write file: " + nodes_path);
  nodes << "id";
  for (std::size_t k = 1; k <= g.attribute_dim; ++k) nodes << "\tattr_" << k;
  if (g.labels) nodes << "\tlabel";
  nodes << "\n";
  for (NodeIndex u = 0; u < g.node_count; ++u) {
    nodes << g.node_ids[u];
    for (std::size_t k = 0; k < g.attribute_dim; ++k) nodes << '\t' << format_double(g.attr(u, k));
    if (g.labels) nodes << '\t' << static_cast<int>((*g.labels)[u]);
    nodes << '\n';
  }

  std::ofstream edges(edges_path, std::ios::binary);
  if (!edges) throw DataError("cannot write file: " + edges_path);
  edges << "src\tdst\n";
  for (const Edge& e : g.edges) edges << g.node_ids[e.u] << '\t' << g.node_ids[e.v] << '\n';
}

std::vector<std::vector<NodeIndex>> connected_components(const AttributedGraph& g) {
  std::vector<std::vector<NodeIndex>> adj(g.node_count);
  for (const Edge& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<std::vector<NodeIndex>> components;
  std::vector<bool> visited(g.node_count, false);
  std::vector<NodeIndex> stack;
  for (NodeIndex start = 0; start < g.node_count; ++start) {
    if (visited[start]) continue;
    std::vector<NodeIndex> comp;
    stack.push_back(start);
    visited[start] = true;
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (NodeIndex v : adj[u])
        if (!visited[v]) {
          visited[v] = true;
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

AttributedGraph restrict_to_nodes(const AttributedGraph& g, std::span<const NodeIndex> keep) {
  AttributedGraph out;
  out.node_count = keep.size();
  out.attribute_dim = g.attribute_dim;
  out.attributes.reserve(keep.size() * g.attribute_dim);
  out.node_ids.reserve(keep.size());
  if (g.labels) out.labels.emplace();
  std::vector<std::int64_t> new_index(g.node_count, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const NodeIndex u = keep[i];
    new_index[u] = static_cast<std::int64_t>(i);
    const auto row = g.attr_row(u);
    out.attributes.insert(out.attributes.end(), row.begin(), row.end());
    out.node_ids.push_back(g.node_ids[u]);
    if (g.labels) out.labels->push_back((*g.labels)[u]);
  }
  for (const Edge& e : g.edges) {
    if (new_index[e.u] < 0 || new_index[e.v] < 0) continue;
    out.edges.push_back({static_cast<NodeIndex>(new_index[e.u]),
                         static_cast<NodeIndex>(new_index[e.v])});
  }
  return out;
}

namespace {

// Linear index of pair (i, j), i < j, in lexicographic order.
// offset(i) = i*(N-1) - i*(i-1)/2 counts pairs whose first element is < i.
std::pair<NodeIndex, NodeIndex> decode_pair(std::uint64_t k, std::uint64_t n) {
  const auto offset = [n](std::uint64_t i) { return i * (n - 1) - i * (i - 1) / 2; };
  const double nn = static_cast<double>(n);
  double guess = (2.0 * nn - 1.0 - std::sqrt((2.0 * nn - 1.0) * (2.0 * nn - 1.0) -
                                             8.0 * static_cast<double>(k))) /
                 2.0;
  auto i = static_cast<std::uint64_t>(std::max(0.0, guess));
  if (i >= n - 1) i = n - 2;
  while (i > 0 && offset(i) > k) --i;
  while (offset(i + 1) <= k) ++i;
  const std::uint64_t j = i + 1 + (k - offset(i));
  return {static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)};
}

class Welford {
public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  // Population variance (divisor = count).
  double variance() const noexcept {
    return count_ ? std::max(0.0, m2_ / static_cast<double>(count_)) : 0.0;
  }

private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace

std::optional<double> auto_sigma(const AttributedGraph& g, std::uint64_t pair_budget,
                                 std::uint64_t rng_seed, SigmaPairs pairs) {
  if (g.node_count < 2) throw SizeError("auto_sigma requires at least 2 nodes");
  if (pair_budget == 0) throw ParameterError("pair_budget must be positive");

  Welford acc;
  if (pairs == SigmaPairs::edges_only) {
    const std::uint64_t m = g.edges.size();
    if (m == 0) throw SizeError("auto_sigma over edges needs at least one edge");
    if (m <= pair_budget) {
      for (const Edge& e : g.edges) acc.add(g.attribute_distance(e.u, e.v));
    } else {
      rng::Stream stream(rng_seed);
      std::unordered_set<std::uint64_t> taken;
      taken.reserve(pair_budget * 2);
      while (taken.size() < pair_budget) {
        const std::uint64_t k = stream.below(m);
        if (taken.insert(k).second) acc.add(g.attribute_distance(g.edges[k].u, g.edges[k].v));
      }
    }
  } else {
    const std::uint64_t n = g.node_count;
    const std::uint64_t total = n * (n - 1) / 2;
    if (total <= pair_budget) {
      for (NodeIndex i = 0; i + 1 < g.node_count; ++i)
        for (NodeIndex j = i + 1; j < g.node_count; ++j) acc.add(g.attribute_distance(i, j));
    } else {
      rng::Stream stream(rng_seed);
      std::unordered_set<std::uint64_t> taken;
      taken.reserve(pair_budget * 2);
      while (taken.size() < pair_budget) {
        const std::uint64_t k = stream.below(total);
        if (!taken.insert(k).second) continue;
        const auto [i, j] = decode_pair(k, n);
        acc.add(g.attribute_distance(i, j));
      }
    }
  }

  const double sd = std::sqrt(acc.variance());
  if (sd <= 1e-12 * std::max(1.0, acc.mean())) return std::nullopt;
  return sd;
}

WeightedGraph weight_edges(const AttributedGraph& g, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  WeightedGraph w;
  w.base = g;
  w.sigma = sigma;
  w.weights.reserve(g.edges.size());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (const Edge& e : g.edges) {
    const double d = g.attribute_distance(e.u, e.v);
    w.weights.push_back(std::exp(-d * d * inv));
  }
  return w;
}

WeightedGraph unit_weights(const AttributedGraph& g) {
  WeightedGraph w;
  w.base = g;
  w.sigma = 0.0;
  w.weights.assign(g.edges.size(), 1.0);
  return w;
}

double LaplacianMatrix::max_strength() const {
  double m = 0.0;
  for (double s : strengths) m = std::max(m, s);
  return m;
}

linalg::Matrix LaplacianMatrix::dense() const {
  linalg::Matrix m(order, order);
  for (std::size_t i = 0; i < order; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      m(i, static_cast<std::size_t>(col[k])) = val[k];
  return m;
}

LaplacianMatrix laplacian(const WeightedGraph& w) {
  const AttributedGraph& g = w.base;
  const auto components = connected_components(g);
  if (components.size() != 1) {
    std::ostringstream msg;
    msg << "graph is disconnected (" << components.size() << " components, sizes";
    for (const auto& c : components) msg << ' ' << c.size();
    msg << "); rerun with --largest-component to analyze the largest one";
    throw ConnectivityError(msg.str());
  }

  const std::size_t n = g.node_count;
  LaplacianMatrix L;
  L.order = n;
  L.strengths.assign(n, 0.0);
  std::vector<std::int32_t> degree(n, 1);  // diagonal slot
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    ++degree[g.edges[e].u];
    ++degree[g.edges[e].v];
    L.strengths[g.edges[e].u] += w.weights[e];
    L.strengths[g.edges[e].v] += w.weights[e];
  }
  L.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) L.row_ptr[i + 1] = L.row_ptr[i] + degree[i];
  L.col.resize(static_cast<std::size_t>(L.row_ptr[n]));
  L.val.resize(static_cast<std::size_t>(L.row_ptr[n]));
  std::vector<std::int64_t> cursor(L.row_ptr.begin(), L.row_ptr.end() - 1);
  const auto put = [&L, &cursor](NodeIndex r, NodeIndex c, double v) {
    const auto k = static_cast<std::size_t>(cursor[r]++);
    L.col[k] = static_cast<std::int32_t>(c);
    L.val[k] = v;
  };
  for (NodeIndex i = 0; i < n; ++i) put(i, i, L.strengths[i]);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    put(g.edges[e].u, g.edges[e].v, -w.weights[e]);
    put(g.edges[e].v, g.edges[e].u, -w.weights[e]);
  }
  // Sort columns within each row (diagonal first insertion breaks order).
  std::vector<std::pair<std::int32_t, double>> rowbuf;
  for (std::size_t i = 0; i < n; ++i) {
    rowbuf.clear();
    for (std::int64_t k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k)
      rowbuf.emplace_back(L.col[k], L.val[k]);
    std::sort(rowbuf.begin(), rowbuf.end());
    for (std::size_t j = 0; j < rowbuf.size(); ++j) {
      L.col[static_cast<std::size_t>(L.row_ptr[i]) + j] = rowbuf[j].first;
      L.val[static_cast<std::size_t>(L.row_ptr[i]) + j] = rowbuf[j].second;
    }
  }
  return L;
}

AttributedGraph standardize_attributes(const AttributedGraph& g) {
  AttributedGraph out = g;
  const std::size_t n = g.node_count;
  for (std::size_t k = 0; k < g.attribute_dim; ++k) {
    double mean = 0.0;
    for (NodeIndex u = 0; u < n; ++u) mean += g.attr(u, k);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (NodeIndex u = 0; u < n; ++u) {
      const double d = g.attr(u, k) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd <= 1e-13 * (std::abs(mean) + 1.0)) {
      for (NodeIndex u = 0; u < n; ++u) out.attr(u, k) = 0.0;
    } else {
      for (NodeIndex u = 0; u < n; ++u) out.attr(u, k) = (g.attr(u, k) - mean) / sd;
    }
  }
  return out;
}

}  // namespace heatsift
