#include "scim/min_cost_flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace scim {

std::size_t MinCostFlow::add_node() {
  graph_.emplace_back();
  return graph_.size() - 1;
}

std::size_t MinCostFlow::add_arc(std::size_t from, std::size_t to, long capacity, double cost) {
  if (from >= graph_.size() || to >= graph_.size()) throw std::out_of_range("MinCostFlow: bad node");
  if (capacity < 0) throw std::invalid_argument("MinCostFlow: negative capacity");
  graph_[from].push_back({to, graph_[to].size() + (from == to ? 1 : 0), capacity, cost});
  graph_[to].push_back({from, graph_[from].size() - 1, 0, -cost});
  arcs_.emplace_back(from, graph_[from].size() - 1);
  arc_capacity_.push_back(capacity);
  return arcs_.size() - 1;
}

long MinCostFlow::flow(std::size_t arc_id) const {
  const auto [node, idx] = arcs_.at(arc_id);
  return arc_capacity_[arc_id] - graph_[node][idx].capacity;
}

MinCostFlow::Result MinCostFlow::solve(std::size_t source, std::size_t sink, long max_flow,
                                       bool stop_at_nonnegative) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-12;
  const std::size_t n = graph_.size();
  Result result;
  std::vector<double> dist(n);
  std::vector<bool> queued(n);
  std::vector<std::size_t> prev_node(n), prev_edge(n);

  while (result.flow < max_flow) {
    // SPFA (queue-based Bellman-Ford) over the residual network.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(queued.begin(), queued.end(), false);
    std::deque<std::size_t> queue{source};
    dist[source] = 0.0;
    queued[source] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      queued[u] = false;
      for (std::size_t k = 0; k < graph_[u].size(); ++k) {
        const Edge& e = graph_[u][k];
        if (e.capacity <= 0) continue;
        const double nd = dist[u] + e.cost;
        if (nd < dist[e.to] - kEps) {
          dist[e.to] = nd;
          prev_node[e.to] = u;
          prev_edge[e.to] = k;
          if (!queued[e.to]) {
            queued[e.to] = true;
            queue.push_back(e.to);
          }
        }
      }
    }
    if (dist[sink] == kInf) break;
    if (stop_at_nonnegative && dist[sink] >= 0.0) break;

    long push = max_flow - result.flow;
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      push = std::min(push, graph_[prev_node[v]][prev_edge[v]].capacity);
    }
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      Edge& e = graph_[prev_node[v]][prev_edge[v]];
      e.capacity -= push;
      graph_[v][e.rev].capacity += push;
    }
    result.flow += push;
    result.cost += static_cast<double>(push) * dist[sink];
  }
  return result;
}

}  // namespace scim
