#pragma once

#include <cstdint>
#include <vector>

namespace mminv::detail {

// Dinic max-flow on integer capacities. The graphs here are tiny bipartite
// transportation networks, so simplicity beats a heavyweight dependency.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count) : head_(node_count, -1), level_(node_count), it_(node_count) {}

  void add_edge(int from, int to, std::int64_t capacity) {
    edges_.push_back({to, head_[from], capacity});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  std::int64_t run(int source, int sink) {
    std::int64_t flow = 0;
    while (bfs(source, sink)) {
      it_ = head_;
      while (std::int64_t pushed = dfs(source, sink, kInf)) flow += pushed;
    }
    return flow;
  }

 private:
  static constexpr std::int64_t kInf = INT64_MAX / 4;

  struct Edge {
    int to;
    int next;
    std::int64_t cap;
  };

  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{source};
    level_[source] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int u = queue[q];
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] == -1) {
          level_[edges_[e].to] = level_[u] + 1;
          queue.push_back(edges_[e].to);
        }
      }
    }
    return level_[sink] != -1;
  }

  std::int64_t dfs(int u, int sink, std::int64_t limit) {
    if (u == sink) return limit;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      Edge& edge = edges_[e];
      if (edge.cap <= 0 || level_[edge.to] != level_[u] + 1) continue;
      const std::int64_t pushed = dfs(edge.to, sink, std::min(limit, edge.cap));
      if (pushed > 0) {
        edge.cap -= pushed;
        edges_[e ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace mminv::detail
