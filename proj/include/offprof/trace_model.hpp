#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "offprof/errors.hpp"

namespace offprof {

enum class Direction { kInbound, kOutbound };
enum class Transport { kTcp, kUdp };
enum class EventKind { kEnter, kExit };

const char* to_string(Direction d);
const char* to_string(Transport t);
const char* to_string(EventKind k);

// One captured IP packet. Timestamps are microseconds since the trace epoch.
struct PacketRecord {
  std::int64_t timestamp_us = 0;
  Direction direction = Direction::kOutbound;
  std::uint64_t size_bytes = 0;
  std::string src_addr;
  std::uint16_t src_port = 0;
  std::string dst_addr;
  std::uint16_t dst_port = 0;
  Transport transport = Transport::kTcp;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// Full packet trace, time-ordered.
struct PacketTrace {
  std::vector<PacketRecord> packets;
  std::string epoch_label;
};

struct Endpoint {
  std::string addr;
  std::uint16_t port = 0;

  auto operator<=>(const Endpoint&) const = default;
};

// Transport 5-tuple with the endpoint pair order-normalized so that both
// directions of one conversation map to the same key.
struct FlowKey {
  Transport transport = Transport::kTcp;
  Endpoint lower;
  Endpoint higher;

  static FlowKey of(const PacketRecord& p);
  auto operator<=>(const FlowKey&) const = default;
};

// A flow references its packets by index into the parent PacketTrace.
struct Flow {
  FlowKey key;
  std::vector<std::size_t> packet_indices;
};

struct MethodEvent {
  EventKind kind = EventKind::kEnter;
  std::int64_t timestamp_us = 0;
  std::int64_t thread_id = 0;
  std::string method_id;

  friend bool operator==(const MethodEvent&, const MethodEvent&) = default;
};

// Per-thread slice of the method trace. Events are time-ordered and
// enter/exit pairs are properly nested; enters left open by the input are
// closed with synthetic exits at the thread's final timestamp.
struct ThreadTrace {
  std::int64_t thread_id = 0;
  std::vector<MethodEvent> events;
};

struct MethodTraceResult {
  std::vector<ThreadTrace> threads;  // ascending thread_id
  std::vector<std::string> warnings;
};

// Line format: timestamp_us,direction,size_bytes,transport,src_addr,src_port,
// dst_addr,dst_port with direction in {in,out} and transport in {tcp,udp}.
// Lines starting with '#' are comments; '# epoch=<label>' sets the epoch label.
PacketTrace parse_packet_trace(std::istream& in, const std::string& source_name = "<input>");
PacketTrace parse_packet_trace_file(const std::string& path);

// Emits the exact line format parse_packet_trace reads back.
std::string format_packet_trace(const PacketTrace& trace);

// Line format: timestamp_us,kind,thread_id,method_id with kind in
// {enter,exit}; method_id may contain anything except commas.
MethodTraceResult parse_method_trace(std::istream& in, const std::string& source_name = "<input>");
MethodTraceResult parse_method_trace_file(const std::string& path);

inline constexpr std::int64_t kDefaultIdleGapUs = 60'000'000;

// Partitions the trace into flows by normalized key; within one key a gap
// greater than idle_gap_us between consecutive packets starts a new flow.
// Flows are ordered by first packet index.
std::vector<Flow> segment_flows(const PacketTrace& trace, std::int64_t idle_gap_us = kDefaultIdleGapUs);

}  // namespace offprof
