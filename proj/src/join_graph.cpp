#include "thetajoin/join_graph.hpp"

#include "thetajoin/errors.hpp"

namespace thetajoin {

JoinGraph::JoinGraph(std::size_t vertex_count, std::vector<JoinEdge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)), incident_(vertex_count) {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].u >= vertex_count_ || edges_[e].v >= vertex_count_)
      throw ParameterError("edge endpoint out of range");
    incident_[edges_[e].u].push_back(e);
    if (edges_[e].v != edges_[e].u) incident_[edges_[e].v].push_back(e);
  }
}

std::size_t JoinGraph::edge_of_theta(int theta) const {
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].theta == theta) return e;
  throw ParameterError("no edge labelled " + std::to_string(theta));
}

bool JoinGraph::is_connected() const {
  if (vertex_count_ == 0) return true;
  std::vector<bool> seen(vertex_count_, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto e : incident_[v]) {
      const auto w = edges_[e].other(v);
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == vertex_count_;
}

JoinGraph build_join_graph_unchecked(const Query& query) {
  std::vector<JoinEdge> edges;
  edges.reserve(query.conditions.size());
  for (const auto& c : query.conditions)
    edges.push_back({c.left.attr.relation, c.right.attr.relation, c.id});
  return JoinGraph(query.relations.size(), std::move(edges));
}

JoinGraph build_join_graph(const Query& query) {
  auto g = build_join_graph_unchecked(query);
  if (!g.is_connected()) throw ConnectivityError("join graph is disconnected");
  return g;
}

}  // namespace thetajoin
