#include "offprof/calltree.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "util.hpp"

namespace offprof {

namespace {

bool matches_any(const std::string& method_id, std::span<const std::string> prefixes) {
  for (const std::string& p : prefixes) {
    if (method_id.compare(0, p.size(), p) == 0) return true;
  }
  return false;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// DOT identifiers cannot carry '-', so negative thread ids get an 'm'.
std::string dot_thread_tag(std::int64_t tid) {
  std::string s = std::to_string(tid);
  if (!s.empty() && s[0] == '-') s[0] = 'm';
  return s;
}

void emit_dot_tree(std::ostream& out, const CallTree& tree, std::uint64_t min_bytes_filter) {
  const auto& nodes = tree.nodes();
  std::string prefix = "t" + dot_thread_tag(tree.thread_id()) + "_n";

  // Depth-first from the root; a child below the byte filter drops with its
  // whole subtree. The root itself always renders.
  std::vector<std::size_t> stack{0};
  std::vector<std::size_t> kept;
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    kept.push_back(idx);
    const CallNode& n = nodes[idx];
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      if (nodes[*it].agg_bytes >= min_bytes_filter) stack.push_back(*it);
    }
  }

  for (std::size_t idx : kept) {
    const CallNode& n = nodes[idx];
    out << "  " << prefix << idx << " [label=\"" << dot_escape(n.method_id) << "\\ncalls="
        << n.invocation_count << "\\nbytes=" << n.agg_bytes << "\\nE=["
        << detail::format_fixed6(n.bounds.e_min_j) << ',' << detail::format_fixed6(n.bounds.e_max_j)
        << "] J\"];\n";
  }
  for (std::size_t idx : kept) {
    for (std::size_t child : nodes[idx].children) {
      if (nodes[child].agg_bytes >= min_bytes_filter) {
        out << "  " << prefix << idx << " -> " << prefix << child << ";\n";
      }
    }
  }
}

}  // namespace

CallTree build_call_tree(const ThreadTrace& thread) {
  CallTree tree;
  tree.thread_id_ = thread.thread_id;
  tree.node_of_event_.assign(thread.events.size(), CallTree::npos);

  CallNode root;
  root.method_id = "<thread:" + std::to_string(thread.thread_id) + ">";
  tree.nodes_.push_back(std::move(root));

  std::vector<std::size_t> stack{0};
  for (std::size_t i = 0; i < thread.events.size(); ++i) {
    const MethodEvent& ev = thread.events[i];
    if (ev.kind == EventKind::kEnter) {
      CallNode& parent = tree.nodes_[stack.back()];
      std::size_t node_idx;
      if (!parent.children.empty() &&
          tree.nodes_[parent.children.back()].method_id == ev.method_id) {
        node_idx = parent.children.back();
        tree.nodes_[node_idx].invocation_count += 1;
      } else {
        node_idx = tree.nodes_.size();
        CallNode n;
        n.method_id = ev.method_id;
        tree.nodes_.push_back(std::move(n));
        tree.nodes_[stack.back()].children.push_back(node_idx);
      }
      tree.node_of_event_[i] = node_idx;
      stack.push_back(node_idx);
    } else {
      if (stack.size() <= 1) {
        throw std::invalid_argument("exit event with empty call stack on thread " +
                                    std::to_string(thread.thread_id));
      }
      if (tree.nodes_[stack.back()].method_id != ev.method_id) {
        throw std::invalid_argument("mismatched exit for '" + ev.method_id + "' on thread " +
                                    std::to_string(thread.thread_id));
      }
      tree.node_of_event_[i] = stack.back();
      stack.pop_back();
    }
  }
  if (stack.size() != 1) {
    throw std::invalid_argument("unclosed enter events on thread " +
                                std::to_string(thread.thread_id));
  }
  return tree;
}

void collapse_chains(CallTree& tree, std::span<const std::string> prefixes) {
  if (prefixes.empty()) return;

  std::vector<CallNode> old_nodes = std::move(tree.nodes_);
  tree.nodes_.clear();

  // old index -> new index; folded frames point at their surviving ancestor.
  std::vector<std::size_t> remap(old_nodes.size(), CallTree::npos);

  struct Item {
    std::size_t old_idx;
    std::size_t new_parent;  // npos for the root itself
  };
  std::vector<Item> stack{{0, CallTree::npos}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    CallNode& old_node = old_nodes[item.old_idx];

    std::size_t new_idx;
    bool folded = item.new_parent != CallTree::npos &&
                  matches_any(old_node.method_id, prefixes) &&
                  matches_any(tree.nodes_[item.new_parent].method_id, prefixes);
    if (folded) {
      new_idx = item.new_parent;
      CallNode& target = tree.nodes_[new_idx];
      target.own_packets.insert(target.own_packets.end(), old_node.own_packets.begin(),
                                old_node.own_packets.end());
    } else {
      // Adjacent same-method siblings can surface once a frame between them
      // folds away; merge them like build_call_tree would have.
      CallNode* parent =
          item.new_parent == CallTree::npos ? nullptr : &tree.nodes_[item.new_parent];
      if (parent && !parent->children.empty() &&
          tree.nodes_[parent->children.back()].method_id == old_node.method_id) {
        new_idx = parent->children.back();
        CallNode& target = tree.nodes_[new_idx];
        target.invocation_count += old_node.invocation_count;
        target.own_packets.insert(target.own_packets.end(), old_node.own_packets.begin(),
                                  old_node.own_packets.end());
      } else {
        new_idx = tree.nodes_.size();
        CallNode n;
        n.method_id = std::move(old_node.method_id);
        n.invocation_count = old_node.invocation_count;
        n.own_packets = std::move(old_node.own_packets);
        tree.nodes_.push_back(std::move(n));
        if (parent) tree.nodes_[item.new_parent].children.push_back(new_idx);
      }
    }
    remap[item.old_idx] = new_idx;
    for (auto it = old_node.children.rbegin(); it != old_node.children.rend(); ++it) {
      stack.push_back(Item{*it, new_idx});
    }
  }

  for (std::size_t& node : tree.node_of_event_) {
    if (node != CallTree::npos) node = remap[node];
  }
}

void aggregate_traffic(CallTree& tree, const FlowAssignment& assignment, const PacketTrace& trace,
                       const EnergyModel& model, const Horizon& horizon) {
  tree.attributed_packets_.clear();
  for (CallNode& n : tree.nodes_) {
    n.own_packets.clear();
    n.agg_packets.clear();
    n.agg_bytes = 0;
    n.bounds = EnergyBounds{};
  }

  std::size_t limit = std::min(assignment.packets.size(), trace.packets.size());
  for (std::size_t pi = 0; pi < limit; ++pi) {
    const auto& assoc = assignment.packets[pi];
    if (!assoc || assoc->thread_id != tree.thread_id_) continue;
    std::size_t node = tree.node_of_event(assoc->event_index);
    if (node == CallTree::npos) {
      throw std::invalid_argument("packet references an enter event not present in the tree");
    }
    tree.nodes_[node].own_packets.push_back(pi);
    tree.attributed_packets_.push_back(pi);
  }

  // Post-order pass: children first, then fold their aggregates into the
  // parent. own_packets arrive in ascending trace order, so a merge keeps
  // agg_packets sorted.
  struct Frame {
    std::size_t node;
    std::size_t next_child = 0;
  };
  std::vector<Frame> stack{{0, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    CallNode& n = tree.nodes_[f.node];
    if (f.next_child < n.children.size()) {
      stack.push_back(Frame{n.children[f.next_child++], 0});
      continue;
    }
    n.agg_packets = n.own_packets;
    for (std::size_t child : n.children) {
      const auto& child_agg = tree.nodes_[child].agg_packets;
      std::vector<std::size_t> merged;
      merged.reserve(n.agg_packets.size() + child_agg.size());
      std::merge(n.agg_packets.begin(), n.agg_packets.end(), child_agg.begin(), child_agg.end(),
                 std::back_inserter(merged));
      n.agg_packets = std::move(merged);
    }
    for (std::size_t pi : n.agg_packets) n.agg_bytes += trace.packets[pi].size_bytes;
    stack.pop_back();
  }

  // Bounds treat the thread's attributed traffic as the whole trace.
  std::vector<PacketRecord> thread_records;
  thread_records.reserve(tree.attributed_packets_.size());
  for (std::size_t pi : tree.attributed_packets_) thread_records.push_back(trace.packets[pi]);

  for (CallNode& n : tree.nodes_) {
    std::vector<std::size_t> local;
    local.reserve(n.agg_packets.size());
    for (std::size_t pi : n.agg_packets) {
      auto it = std::lower_bound(tree.attributed_packets_.begin(), tree.attributed_packets_.end(), pi);
      local.push_back(static_cast<std::size_t>(it - tree.attributed_packets_.begin()));
    }
    n.bounds = energy_bounds(thread_records, local, model, horizon);
  }
}

std::string emit_dot(const CallTree& tree, std::uint64_t min_bytes_filter) {
  return emit_dot(std::span<const CallTree>(&tree, 1), min_bytes_filter);
}

std::string emit_dot(std::span<const CallTree> trees, std::uint64_t min_bytes_filter) {
  std::ostringstream out;
  out << "digraph network_usage {\n";
  out << "  node [shape=box];\n";
  for (const CallTree& tree : trees) {
    emit_dot_tree(out, tree, min_bytes_filter);
  }
  out << "}\n";
  return out.str();
}

std::string emit_report(std::span<const CallTree> trees, const PacketTrace& trace,
                        const EnergyModel& model, const Horizon& horizon) {
  struct Row {
    std::uint64_t calls = 0;
    std::vector<std::size_t> packets;            // union of agg_packets
    std::vector<const CallTree*> involved;       // threads the method shows up on
  };
  std::map<std::string, Row> rows;

  for (const CallTree& tree : trees) {
    const auto& nodes = tree.nodes();
    for (std::size_t i = 1; i < nodes.size(); ++i) {  // skip the synthetic root
      Row& row = rows[nodes[i].method_id];
      row.calls += nodes[i].invocation_count;
      row.packets.insert(row.packets.end(), nodes[i].agg_packets.begin(),
                         nodes[i].agg_packets.end());
      if (row.involved.empty() || row.involved.back() != &tree) row.involved.push_back(&tree);
    }
  }

  struct Entry {
    std::string method_id;
    std::uint64_t calls;
    std::size_t packet_count;
    std::uint64_t bytes;
    EnergyBounds bounds;
  };
  std::vector<Entry> entries;
  entries.reserve(rows.size());

  for (auto& [method_id, row] : rows) {
    std::sort(row.packets.begin(), row.packets.end());
    row.packets.erase(std::unique(row.packets.begin(), row.packets.end()), row.packets.end());

    // Full trace for the bounds: everything attributed to the threads this
    // method ran on, so self-vs-rest stays meaningful across threads.
    std::vector<std::size_t> full;
    for (const CallTree* t : row.involved) {
      full.insert(full.end(), t->attributed_packets().begin(), t->attributed_packets().end());
    }
    std::sort(full.begin(), full.end());
    full.erase(std::unique(full.begin(), full.end()), full.end());

    std::vector<PacketRecord> full_records;
    full_records.reserve(full.size());
    for (std::size_t pi : full) full_records.push_back(trace.packets[pi]);

    std::vector<std::size_t> local;
    local.reserve(row.packets.size());
    for (std::size_t pi : row.packets) {
      auto it = std::lower_bound(full.begin(), full.end(), pi);
      local.push_back(static_cast<std::size_t>(it - full.begin()));
    }

    Entry e;
    e.method_id = method_id;
    e.calls = row.calls;
    e.packet_count = row.packets.size();
    e.bytes = 0;
    for (std::size_t pi : row.packets) e.bytes += trace.packets[pi].size_bytes;
    e.bounds = energy_bounds(full_records, local, model, horizon);
    entries.push_back(std::move(e));
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.bounds.e_max_j != b.bounds.e_max_j) return a.bounds.e_max_j > b.bounds.e_max_j;
    return a.method_id < b.method_id;
  });

  std::ostringstream out;
  out << "method_id,calls,packets,bytes,e_min_j,e_max_j\n";
  for (const Entry& e : entries) {
    out << e.method_id << ',' << e.calls << ',' << e.packet_count << ',' << e.bytes << ','
        << detail::format_fixed6(e.bounds.e_min_j) << ','
        << detail::format_fixed6(e.bounds.e_max_j) << '\n';
  }
  return out.str();
}

}  // namespace offprof
