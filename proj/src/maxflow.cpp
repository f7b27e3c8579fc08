#include "teamseg/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace teamseg {

void MaxFlowGraph::reset(int num_nodes, int edge_hint) {
  if (num_nodes < 0) throw std::invalid_argument("node count must be nonnegative");
  nodes_.assign(static_cast<std::size_t>(num_nodes), Node{});
  arcs_.clear();
  arcs_.reserve(2 * static_cast<std::size_t>(std::max(edge_hint, 0)));
  orphans_.clear();
  queue_head_ = queue_tail_ = kNone;
  time_ = 0;
  flow_ = 0.0;
}

void MaxFlowGraph::add_terminal_edge(int node, double source_cap, double sink_cap) {
  if (source_cap < 0 || sink_cap < 0) throw std::invalid_argument("capacities must be nonnegative");
  auto& n = nodes_.at(static_cast<std::size_t>(node));
  // Only the difference matters for the cut; the common part is flow that
  // any cut must pay.
  const double common = std::min(source_cap, sink_cap);
  flow_ += common;
  n.terminal_cap += (source_cap - common) - (sink_cap - common);
}

void MaxFlowGraph::add_edge(int i, int j, double cap, double rev_cap) {
  if (cap < 0 || rev_cap < 0) throw std::invalid_argument("capacities must be nonnegative");
  if (i == j) throw std::invalid_argument("self loops are not allowed");
  auto& ni = nodes_.at(static_cast<std::size_t>(i));
  auto& nj = nodes_.at(static_cast<std::size_t>(j));
  const int a = static_cast<int>(arcs_.size());
  arcs_.push_back(Arc{j, ni.first, cap});
  arcs_.push_back(Arc{i, nj.first, rev_cap});
  ni.first = a;
  nj.first = a + 1;
}

void MaxFlowGraph::set_active(int i) {
  auto& n = nodes_[i];
  if (n.queued) return;
  n.queued = true;
  n.next_active = kNone;
  if (queue_tail_ == kNone) {
    queue_head_ = i;
  } else {
    nodes_[queue_tail_].next_active = i;
  }
  queue_tail_ = i;
}

int MaxFlowGraph::next_active() {
  while (queue_head_ != kNone) {
    const int i = queue_head_;
    queue_head_ = nodes_[i].next_active;
    if (queue_head_ == kNone) queue_tail_ = kNone;
    nodes_[i].queued = false;
    nodes_[i].next_active = kNone;
    if (has_tree(i)) return i;
  }
  return kNone;
}

void MaxFlowGraph::make_orphan(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_back(i);
}

void MaxFlowGraph::augment(int middle) {
  double bottleneck = arcs_[middle].residual;
  int i = arcs_[sister(middle)].head;
  for (int a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    bottleneck = std::min(bottleneck, arcs_[sister(a)].residual);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, nodes_[i].terminal_cap);
  i = arcs_[middle].head;
  for (int a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    bottleneck = std::min(bottleneck, arcs_[a].residual);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, -nodes_[i].terminal_cap);

  arcs_[sister(middle)].residual += bottleneck;
  arcs_[middle].residual -= bottleneck;

  i = arcs_[sister(middle)].head;
  for (int a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    arcs_[a].residual += bottleneck;
    arcs_[sister(a)].residual -= bottleneck;
    if (arcs_[sister(a)].residual <= 0) make_orphan(i);
    i = arcs_[a].head;
  }
  nodes_[i].terminal_cap -= bottleneck;
  if (nodes_[i].terminal_cap <= 0) make_orphan(i);

  i = arcs_[middle].head;
  for (int a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    arcs_[sister(a)].residual += bottleneck;
    arcs_[a].residual -= bottleneck;
    if (arcs_[a].residual <= 0) make_orphan(i);
    i = arcs_[a].head;
  }
  nodes_[i].terminal_cap += bottleneck;
  if (nodes_[i].terminal_cap >= 0) make_orphan(i);

  flow_ += bottleneck;
}

void MaxFlowGraph::adopt_source_orphan(int i) {
  constexpr int kInfinite = std::numeric_limits<int>::max();
  int best_arc = kNone;
  int best_dist = kInfinite;
  for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
    if (arcs_[sister(a)].residual <= 0) continue;
    const int j = arcs_[a].head;
    if (nodes_[j].in_sink_tree || !has_tree(j)) continue;
    // Distance from j to the source, or infinite if j hangs off an orphan.
    int d = 0;
    int k = j;
    while (true) {
      if (nodes_[k].timestamp == time_) {
        d += nodes_[k].dist;
        break;
      }
      const int up = nodes_[k].parent;
      ++d;
      if (up == kTerminal) {
        nodes_[k].timestamp = time_;
        nodes_[k].dist = 1;
        break;
      }
      if (up == kOrphan) {
        d = kInfinite;
        break;
      }
      k = arcs_[up].head;
    }
    if (d == kInfinite) continue;
    if (d < best_dist) {
      best_arc = a;
      best_dist = d;
    }
    for (k = j; nodes_[k].timestamp != time_; k = arcs_[nodes_[k].parent].head) {
      nodes_[k].timestamp = time_;
      nodes_[k].dist = d--;
    }
  }

  if (best_arc != kNone) {
    nodes_[i].parent = best_arc;
    nodes_[i].timestamp = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }

  nodes_[i].parent = kNone;
  for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
    const int j = arcs_[a].head;
    if (nodes_[j].in_sink_tree || !has_tree(j)) continue;
    const int up = nodes_[j].parent;
    if (arcs_[sister(a)].residual > 0) set_active(j);
    if (up != kTerminal && up != kOrphan && arcs_[up].head == i) make_orphan(j);
  }
}

void MaxFlowGraph::adopt_sink_orphan(int i) {
  constexpr int kInfinite = std::numeric_limits<int>::max();
  int best_arc = kNone;
  int best_dist = kInfinite;
  for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
    if (arcs_[a].residual <= 0) continue;
    const int j = arcs_[a].head;
    if (!nodes_[j].in_sink_tree || !has_tree(j)) continue;
    int d = 0;
    int k = j;
    while (true) {
      if (nodes_[k].timestamp == time_) {
        d += nodes_[k].dist;
        break;
      }
      const int up = nodes_[k].parent;
      ++d;
      if (up == kTerminal) {
        nodes_[k].timestamp = time_;
        nodes_[k].dist = 1;
        break;
      }
      if (up == kOrphan) {
        d = kInfinite;
        break;
      }
      k = arcs_[up].head;
    }
    if (d == kInfinite) continue;
    if (d < best_dist) {
      best_arc = a;
      best_dist = d;
    }
    for (k = j; nodes_[k].timestamp != time_; k = arcs_[nodes_[k].parent].head) {
      nodes_[k].timestamp = time_;
      nodes_[k].dist = d--;
    }
  }

  if (best_arc != kNone) {
    nodes_[i].parent = best_arc;
    nodes_[i].timestamp = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }

  nodes_[i].parent = kNone;
  for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
    const int j = arcs_[a].head;
    if (!nodes_[j].in_sink_tree || !has_tree(j)) continue;
    const int up = nodes_[j].parent;
    if (arcs_[a].residual > 0) set_active(j);
    if (up != kTerminal && up != kOrphan && arcs_[up].head == i) make_orphan(j);
  }
}

double MaxFlowGraph::max_flow() {
  queue_head_ = queue_tail_ = kNone;
  orphans_.clear();
  time_ = 0;
  for (int i = 0; i < num_nodes(); ++i) {
    auto& n = nodes_[i];
    n.queued = false;
    n.next_active = kNone;
    n.timestamp = 0;
    n.dist = 1;
    if (n.terminal_cap > 0) {
      n.parent = kTerminal;
      n.in_sink_tree = false;
      set_active(i);
    } else if (n.terminal_cap < 0) {
      n.parent = kTerminal;
      n.in_sink_tree = true;
      set_active(i);
    } else {
      n.parent = kNone;
    }
  }

  int current = kNone;
  while (true) {
    int i = current;
    if (i == kNone || !has_tree(i)) {
      i = next_active();
      if (i == kNone) break;
    }
    current = kNone;

    int middle = kNone;
    if (!nodes_[i].in_sink_tree) {
      for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        if (arcs_[a].residual <= 0) continue;
        const int j = arcs_[a].head;
        auto& nj = nodes_[j];
        if (!has_tree(j)) {
          nj.in_sink_tree = false;
          nj.parent = sister(a);
          nj.timestamp = nodes_[i].timestamp;
          nj.dist = nodes_[i].dist + 1;
          set_active(j);
        } else if (nj.in_sink_tree) {
          middle = a;
          break;
        } else if (nj.timestamp <= nodes_[i].timestamp && nj.dist > nodes_[i].dist) {
          nj.parent = sister(a);
          nj.timestamp = nodes_[i].timestamp;
          nj.dist = nodes_[i].dist + 1;
        }
      }
    } else {
      for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        if (arcs_[sister(a)].residual <= 0) continue;
        const int j = arcs_[a].head;
        auto& nj = nodes_[j];
        if (!has_tree(j)) {
          nj.in_sink_tree = true;
          nj.parent = sister(a);
          nj.timestamp = nodes_[i].timestamp;
          nj.dist = nodes_[i].dist + 1;
          set_active(j);
        } else if (!nj.in_sink_tree) {
          middle = sister(a);
          break;
        } else if (nj.timestamp <= nodes_[i].timestamp && nj.dist > nodes_[i].dist) {
          nj.parent = sister(a);
          nj.timestamp = nodes_[i].timestamp;
          nj.dist = nodes_[i].dist + 1;
        }
      }
    }

    ++time_;
    if (middle == kNone) continue;

    current = i;
    augment(middle);
    while (!orphans_.empty()) {
      const int orphan = orphans_.back();
      orphans_.pop_back();
      if (nodes_[orphan].in_sink_tree) {
        adopt_sink_orphan(orphan);
      } else {
        adopt_source_orphan(orphan);
      }
    }
  }
  return flow_;
}

MaxFlowGraph::Side MaxFlowGraph::side(int node) const {
  const auto& n = nodes_.at(static_cast<std::size_t>(node));
  return has_tree(node) && n.in_sink_tree ? Side::sink : Side::source;
}

}  // namespace teamseg
