#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "offprof/correlator.hpp"
#include "offprof/energy.hpp"
#include "offprof/trace_model.hpp"

namespace offprof {

// One call-tree node. Packet references are indices into the packet trace;
// children are indices into the owning CallTree's node arena.
struct CallNode {
  std::string method_id;
  std::uint64_t invocation_count = 1;
  std::vector<std::size_t> own_packets;  // attached to this node's enter events
  std::vector<std::size_t> agg_packets;  // own plus descendants, sorted
  std::uint64_t agg_bytes = 0;
  EnergyBounds bounds;
  std::vector<std::size_t> children;
};

// Per-thread call tree. Node 0 is a synthetic root named `<thread:ID>` that
// parents the thread's top-level calls.
class CallTree {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::int64_t thread_id() const { return thread_id_; }
  const std::vector<CallNode>& nodes() const { return nodes_; }
  const CallNode& root() const { return nodes_.front(); }

  // Arena index of the node an event maps to, or npos when unknown.
  std::size_t node_of_event(std::size_t event_index) const {
    return event_index < node_of_event_.size() ? node_of_event_[event_index] : npos;
  }

  // Packets attributed to this thread, ascending trace index (set by
  // aggregate_traffic).
  const std::vector<std::size_t>& attributed_packets() const { return attributed_packets_; }

  friend CallTree build_call_tree(const ThreadTrace& thread);
  friend void collapse_chains(CallTree& tree, std::span<const std::string> prefixes);
  friend void aggregate_traffic(CallTree& tree, const FlowAssignment& assignment,
                                const PacketTrace& trace, const EnergyModel& model,
                                const Horizon& horizon);

 private:
  std::int64_t thread_id_ = 0;
  std::vector<CallNode> nodes_;
  std::vector<std::size_t> node_of_event_;      // event index -> arena index
  std::vector<std::size_t> attributed_packets_;
};

// Stack replay of the thread's enter/exit events. Consecutive sibling
// invocations of one method merge into a single node with the invocation
// count bumped; recursive calls stay separate nodes.
CallTree build_call_tree(const ThreadTrace& thread);

// Folds chains of frames whose method ids match any prefix into the topmost
// matching frame, so library-internal call stacks show up as one node.
// Packets attached to folded frames follow them into the surviving node.
void collapse_chains(CallTree& tree, std::span<const std::string> prefixes);

// Attaches every packet the assignment maps onto this tree's thread to the
// node of its enter event, then computes agg_packets/agg_bytes bottom-up and
// per-node energy bounds against the thread's full attributed traffic.
void aggregate_traffic(CallTree& tree, const FlowAssignment& assignment, const PacketTrace& trace,
                       const EnergyModel& model, const Horizon& horizon);

// DOT rendering of aggregated trees. Node labels carry the method id,
// invocation count, aggregate bytes, and energy bounds; child subtrees whose
// agg_bytes fall below min_bytes_filter are pruned (roots always stay).
std::string emit_dot(const CallTree& tree, std::uint64_t min_bytes_filter = 1);
std::string emit_dot(std::span<const CallTree> trees, std::uint64_t min_bytes_filter = 1);

// Per-method rollup across threads as CSV:
// method_id,calls,packets,bytes,e_min_j,e_max_j sorted by descending e_max.
// Bounds are recomputed over the union of the involved threads' traffic so a
// method split across threads still gets a single consistent pair.
std::string emit_report(std::span<const CallTree> trees, const PacketTrace& trace,
                        const EnergyModel& model, const Horizon& horizon);

}  // namespace offprof
