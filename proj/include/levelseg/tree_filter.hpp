#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "levelseg/types.hpp"

namespace levelseg {

/// Rooted spanning tree over the H×W pixel lattice, nodes in scan order.
template <typename Scalar>
struct PixelTree {
  Index rows{0};
  Index cols{0};
  std::vector<Index> parent;              // parent index; root points to itself
  std::vector<Scalar> parent_edge_weight; // weight of the edge to the parent; 0 at root
  std::vector<Index> traversal_order;     // every node once, parents before children

  Index node_count() const { return static_cast<Index>(parent.size()); }
};

namespace detail {

struct UnionFind {
  std::vector<Index> parent;
  std::vector<Index> size;

  explicit UnionFind(Index n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  bool merge(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    return true;
  }
};

template <typename Scalar>
struct LatticeEdge {
  Index a;
  Index b;
  Scalar weight;
};

}  // namespace detail

/// Minimum spanning tree of the 4-connected lattice; edge weight is the
/// Euclidean distance between the two pixels' guide feature vectors.
/// Equal-weight edges keep scan order (each pixel's incoming left edge
/// before its incoming top edge), so uniform guides yield the row-major
/// scan tree.
template <typename Scalar>
PixelTree<Scalar> build_mst(const PixelGrid<Scalar>& guide) {
  const Index h = guide.height;
  const Index w = guide.width;
  const Index n = h * w;

  std::vector<detail::LatticeEdge<Scalar>> edges;
  edges.reserve(static_cast<std::size_t>(2 * n));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const Index node = y * w + x;
      if (x > 0)
        edges.push_back({node - 1, node, (guide.data.row(node) - guide.data.row(node - 1)).norm()});
      if (y > 0)
        edges.push_back({node - w, node, (guide.data.row(node) - guide.data.row(node - w)).norm()});
    }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const auto& lhs, const auto& rhs) { return lhs.weight < rhs.weight; });

  detail::UnionFind uf(n);
  std::vector<std::vector<std::pair<Index, Scalar>>> adjacency(n);
  Index accepted = 0;
  for (const auto& e : edges) {
    if (!uf.merge(e.a, e.b)) continue;
    adjacency[e.a].emplace_back(e.b, e.weight);
    adjacency[e.b].emplace_back(e.a, e.weight);
    if (++accepted == n - 1) break;
  }

  PixelTree<Scalar> tree;
  tree.rows = h;
  tree.cols = w;
  tree.parent.assign(n, -1);
  tree.parent_edge_weight.assign(n, Scalar(0));
  tree.traversal_order.reserve(n);

  tree.parent[0] = 0;
  tree.traversal_order.push_back(0);
  for (std::size_t head = 0; head < tree.traversal_order.size(); ++head) {
    const Index node = tree.traversal_order[head];
    for (const auto& [next, weight] : adjacency[node]) {
      if (tree.parent[next] != -1) continue;
      tree.parent[next] = node;
      tree.parent_edge_weight[next] = weight;
      tree.traversal_order.push_back(next);
    }
  }
  return tree;
}

/// Exact exponential-decay aggregation along tree path distance:
/// out_i = Σ_j exp(−D(i,j)/sigma)·s_j / Σ_j exp(−D(i,j)/sigma), computed by
/// a leaf-to-root plus root-to-leaf dynamic program, all channels at once.
template <typename Scalar>
PixelGrid<Scalar> tree_filter_apply(const PixelTree<Scalar>& tree, const PixelGrid<Scalar>& signal,
                                    Scalar sigma) {
  if (!(sigma > Scalar(0))) throw std::invalid_argument("tree_filter_apply: sigma must be > 0");
  const Index n = tree.node_count();
  if (signal.pixel_count() != n)
    throw std::invalid_argument("tree_filter_apply: signal does not match tree size");

  VectorX<Scalar> decay(n);  // exp(-w/sigma) for the edge to the parent
  for (Index i = 0; i < n; ++i)
    decay[i] = std::exp(-tree.parent_edge_weight[static_cast<std::size_t>(i)] / sigma);

  DataMatrix<Scalar> up = signal.data;          // subtree-aggregated values
  VectorX<Scalar> up_w = VectorX<Scalar>::Ones(n);
  for (std::size_t k = tree.traversal_order.size(); k-- > 0;) {
    const Index node = tree.traversal_order[k];
    const Index par = tree.parent[static_cast<std::size_t>(node)];
    if (par == node) continue;
    up.row(par) += decay[node] * up.row(node);
    up_w[par] += decay[node] * up_w[node];
  }

  DataMatrix<Scalar> total = up;
  VectorX<Scalar> total_w = up_w;
  for (const Index node : tree.traversal_order) {
    const Index par = tree.parent[static_cast<std::size_t>(node)];
    if (par == node) continue;
    total.row(node) = up.row(node) + decay[node] * (total.row(par) - decay[node] * up.row(node));
    total_w[node] = up_w[node] + decay[node] * (total_w[par] - decay[node] * up_w[node]);
  }

  DataMatrix<Scalar> out = total.array().colwise() / total_w.array();
  return PixelGrid<Scalar>(signal.height, signal.width, signal.channels, std::move(out));
}

}  // namespace levelseg
