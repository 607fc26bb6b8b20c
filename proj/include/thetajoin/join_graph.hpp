#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thetajoin/query.hpp"

namespace thetajoin {

// One θ condition as an undirected labelled edge. Parallel edges are kept.
struct JoinEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  int theta = 0;
  std::size_t other(std::size_t x) const { return x == u ? v : u; }
};

class JoinGraph {
 public:
  JoinGraph(std::size_t vertex_count, std::vector<JoinEdge> edges);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<JoinEdge>& edges() const { return edges_; }
  const JoinEdge& edge(std::size_t e) const { return edges_[e]; }
  // Indices into edges() incident to `v`, in label order.
  std::span<const std::size_t> incident(std::size_t v) const { return incident_[v]; }
  // Edge index carrying label `theta`; labels are 1..n so this is theta-1
  // for graphs built from a query.
  std::size_t edge_of_theta(int theta) const;

  bool is_connected() const;

 private:
  std::size_t vertex_count_;
  std::vector<JoinEdge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

// Throws ConnectivityError if the query's graph is disconnected.
JoinGraph build_join_graph(const Query& query);
JoinGraph build_join_graph_unchecked(const Query& query);

}  // namespace thetajoin
