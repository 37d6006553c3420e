#pragma once

#include <cstddef>
#include <vector>

namespace scim {

/// Min-cost flow by successive shortest augmenting paths (Bellman-Ford path search, so
/// negative arc costs are allowed as long as the network has no negative cycle).
///
/// `solve` pushes flow from `source` to `sink` along cheapest paths until either
/// `max_flow` is reached or the cheapest remaining path has nonnegative cost. With
/// `max_flow` unbounded this yields the minimum-cost flow of arbitrary value.
class MinCostFlow {
 public:
  static constexpr long kInfinite = 1L << 40;

  explicit MinCostFlow(std::size_t num_nodes) : graph_(num_nodes) {}

  std::size_t add_node();
  /// Returns an arc id usable with flow().
  std::size_t add_arc(std::size_t from, std::size_t to, long capacity, double cost);

  struct Result {
    long flow = 0;
    double cost = 0.0;
  };
  Result solve(std::size_t source, std::size_t sink, long max_flow = kInfinite,
               bool stop_at_nonnegative = true);

  long flow(std::size_t arc_id) const;
  std::size_t num_nodes() const { return graph_.size(); }

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    long capacity;
    double cost;
  };
  std::vector<std::vector<Edge>> graph_;
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;  // (node, index in adjacency)
  std::vector<long> arc_capacity_;
};

}  // namespace scim
