#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "realmono/rational.hpp"

namespace realmono {

/// Edmonds-Karp maximum flow with exact rational capacities.
///
/// Shortest augmenting paths bound the number of augmentations by
/// O(V E) independently of the capacity values.
class RationalMaxFlow {
 public:
  explicit RationalMaxFlow(std::size_t nodes) : adjacency_(nodes) {}

  /// Adds a directed edge and returns its id for flow() lookups.
  std::size_t add_edge(std::size_t from, std::size_t to, Rational capacity) {
    std::size_t id = edges_.size();
    edges_.push_back({to, std::move(capacity), Rational(0)});
    adjacency_[from].push_back(id);
    edges_.push_back({from, Rational(0), Rational(0)});
    adjacency_[to].push_back(id + 1);
    return id;
  }

  Rational run(std::size_t source, std::size_t sink) {
    Rational total = 0;
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    for (;;) {
      std::vector<std::size_t> via(adjacency_.size(), none);
      std::vector<std::size_t> queue{source};
      std::vector<char> seen(adjacency_.size(), 0);
      seen[source] = 1;
      for (std::size_t head = 0; head < queue.size() && !seen[sink]; ++head) {
        std::size_t x = queue[head];
        for (std::size_t id : adjacency_[x]) {
          const auto& e = edges_[id];
          if (!seen[e.to] && e.capacity - e.flow > 0) {
            seen[e.to] = 1;
            via[e.to] = id;
            queue.push_back(e.to);
          }
        }
      }
      if (!seen[sink]) return total;

      std::optional<Rational> bottleneck;
      for (std::size_t x = sink; x != source; x = edges_[via[x] ^ 1].to) {
        const auto& e = edges_[via[x]];
        Rational residual = e.capacity - e.flow;
        if (!bottleneck || residual < *bottleneck) bottleneck = residual;
      }
      for (std::size_t x = sink; x != source; x = edges_[via[x] ^ 1].to) {
        edges_[via[x]].flow += *bottleneck;
        edges_[via[x] ^ 1].flow -= *bottleneck;
      }
      total += *bottleneck;
    }
  }

  const Rational& flow(std::size_t edge) const { return edges_[edge].flow; }

 private:
  struct Edge {
    std::size_t to;
    Rational capacity;
    Rational flow;
  };
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace realmono
