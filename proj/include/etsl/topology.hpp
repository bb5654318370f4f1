#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "etsl/landmark.hpp"

namespace etsl {

struct SkeletonTopology {
  int node_count = kNumPoints;
  std::vector<std::pair<int, int>> edges;          // undirected, i < j, no self
  std::vector<std::vector<int>> neighbors;         // ascending per node

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
  }
};

// Edge lists per region plus the inter-region links.  Node indices refer to
// the canonical 0..52 layout.
struct TopologyConfig {
  std::vector<std::pair<int, int>> face_edges;
  std::vector<std::pair<int, int>> body_edges;
  std::vector<std::pair<int, int>> hand_edges;  // local 0..20, applied to both hands
  std::vector<std::pair<int, int>> inter_region_edges;
};

// MediaPipe-style 21-point hand wiring: wrist 0, then four joints per finger.
inline std::vector<std::pair<int, int>> standard_hand_edges() {
  return {{0, 1},   {1, 2},   {2, 3},   {3, 4},    // thumb
          {0, 5},   {5, 6},   {6, 7},   {7, 8},    // index
          {5, 9},   {9, 10},  {10, 11}, {11, 12},  // middle
          {9, 13},  {13, 14}, {14, 15}, {15, 16},  // ring
          {13, 17}, {17, 18}, {18, 19}, {19, 20},  // pinky
          {0, 17}};
}

// Default wiring: star around face node 0, shoulder bar with two arm chains,
// both hands wired as standard skeletons, wrists tied to the body arm nodes
// and the face tied to the shoulders.
inline TopologyConfig default_topology_config() {
  TopologyConfig c;
  c.face_edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  c.body_edges = {{kLeftShoulder, kRightShoulder},
                  {kLeftShoulder, kLeftElbow},
                  {kLeftElbow, kLeftWrist},
                  {kRightShoulder, kRightElbow},
                  {kRightElbow, kRightWrist}};
  c.hand_edges = standard_hand_edges();
  c.inter_region_edges = {{kLeftWrist, kLeftHandBegin},
                          {kRightWrist, kRightHandBegin},
                          {kLeftShoulder, 0},
                          {kRightShoulder, 0}};
  return c;
}

inline SkeletonTopology build_topology(
    const TopologyConfig& config = default_topology_config()) {
  std::set<std::pair<int, int>> edge_set;
  auto add = [&](int a, int b, const char* where) {
    if (a == b)
      fail(Err::InvariantViolation,
           std::string(where) + ": self-edge at node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= kNumPoints || b >= kNumPoints)
      fail(Err::InvariantViolation, std::string(where) + ": node index out of "
                                        "range (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ")");
    if (a > b) std::swap(a, b);
    edge_set.insert({a, b});
  };
  for (auto [a, b] : config.face_edges) add(a, b, "face");
  for (auto [a, b] : config.body_edges) add(a, b, "body");
  for (auto [a, b] : config.hand_edges) {
    if (a < 0 || b < 0 || a >= 21 || b >= 21)
      fail(Err::InvariantViolation, "hand: local index out of range");
    add(a + kLeftHandBegin, b + kLeftHandBegin, "left_hand");
    add(a + kRightHandBegin, b + kRightHandBegin, "right_hand");
  }
  for (auto [a, b] : config.inter_region_edges) add(a, b, "inter");

  SkeletonTopology t;
  t.edges.assign(edge_set.begin(), edge_set.end());
  t.neighbors.assign(kNumPoints, {});
  for (auto [a, b] : t.edges) {
    t.neighbors[a].push_back(b);
    t.neighbors[b].push_back(a);
  }
  for (auto& n : t.neighbors) std::sort(n.begin(), n.end());

  // single connected component
  std::vector<char> seen(kNumPoints, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : t.neighbors[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  if (reached != kNumPoints) {
    std::string missing;
    for (int v = 0; v < kNumPoints && missing.size() < 40; ++v)
      if (!seen[v]) missing += " " + std::to_string(v);
    fail(Err::DisconnectedGraph, "unreached nodes:" + missing);
  }
  return t;
}

inline std::string write_topology(const SkeletonTopology& t) {
  std::string out = "ETSL-TOPO 1\n";
  for (auto [a, b] : t.edges)
    out += std::to_string(a) + " " + std::to_string(b) + "\n";
  return out;
}

inline SkeletonTopology parse_topology(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ETSL-TOPO 1")
    fail(Err::MalformedHeader, "topology: bad magic line");
  TopologyConfig c;  // all edges go through inter_region_edges verbatim
  while (std::getline(in, line)) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) fail(Err::MalformedHeader, "topology: want 2 fields");
    c.inter_region_edges.emplace_back(std::stoi(tok[0]), std::stoi(tok[1]));
  }
  return build_topology(c);
}

}  // namespace etsl
