#pragma once

#include <cstdint>
#include <vector>

namespace teamseg {

/// s-t max-flow by augmenting paths over two search trees that are reused
/// between augmentations (Boykov-Kolmogorov). Capacities are doubles;
/// nodes left in neither tree after the flow belong to the source side.
class MaxFlowGraph {
 public:
  enum class Side : std::uint8_t { source, sink };

  MaxFlowGraph() = default;
  explicit MaxFlowGraph(int num_nodes, int edge_hint = 0) { reset(num_nodes, edge_hint); }

  /// Drops all nodes and edges and allocates `num_nodes` fresh nodes.
  void reset(int num_nodes, int edge_hint = 0);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  /// Adds capacity from the source to `node` and from `node` to the sink.
  void add_terminal_edge(int node, double source_cap, double sink_cap);

  /// Adds an edge i -> j with capacity `cap` and j -> i with `rev_cap`.
  void add_edge(int i, int j, double cap, double rev_cap);

  double max_flow();

  Side side(int node) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Node {
    int first = kNone;     // first outgoing arc
    int parent = kNone;    // arc to the parent, or kNone/kTerminal/kOrphan
    int next_active = kNone;
    int timestamp = 0;
    int dist = 0;
    bool in_sink_tree = false;
    bool queued = false;
    double terminal_cap = 0.0;  // > 0: residual from source, < 0: residual to sink
  };

  struct Arc {
    int head;
    int next;
    double residual;
  };

  static int sister(int a) { return a ^ 1; }
  bool has_tree(int i) const { return nodes_[i].parent != kNone; }

  void set_active(int i);
  int next_active();
  void augment(int middle_arc);
  void adopt_source_orphan(int i);
  void adopt_sink_orphan(int i);
  void make_orphan(int i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<int> orphans_;
  int queue_head_ = kNone;
  int queue_tail_ = kNone;
  int time_ = 0;
  double flow_ = 0.0;
};

}  // namespace teamseg
