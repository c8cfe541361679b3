#include "offprof/trace_model.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "util.hpp"

namespace offprof {

namespace {

using detail::fail_at;
using detail::parse_int;
using detail::split;
using detail::trim;

constexpr std::string_view kEpochPrefix = "# epoch=";

Direction parse_direction(std::string_view s, const std::string& src, std::size_t ln) {
  if (s == "in") return Direction::kInbound;
  if (s == "out") return Direction::kOutbound;
  fail_at(src, ln, "bad direction '" + std::string(s) + "' (expected in|out)");
}

Transport parse_transport(std::string_view s, const std::string& src, std::size_t ln) {
  if (s == "tcp") return Transport::kTcp;
  if (s == "udp") return Transport::kUdp;
  fail_at(src, ln, "bad transport '" + std::string(s) + "' (expected tcp|udp)");
}

std::uint16_t parse_port(std::string_view s, const std::string& src, std::size_t ln) {
  std::uint32_t v = 0;
  if (!parse_int(s, v) || v > 65535) {
    fail_at(src, ln, "bad port '" + std::string(s) + "'");
  }
  return static_cast<std::uint16_t>(v);
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::kInbound ? "in" : "out";
}

const char* to_string(Transport t) {
  return t == Transport::kTcp ? "tcp" : "udp";
}

const char* to_string(EventKind k) {
  return k == EventKind::kEnter ? "enter" : "exit";
}

FlowKey FlowKey::of(const PacketRecord& p) {
  Endpoint src{p.src_addr, p.src_port};
  Endpoint dst{p.dst_addr, p.dst_port};
  FlowKey key;
  key.transport = p.transport;
  if (src <= dst) {
    key.lower = std::move(src);
    key.higher = std::move(dst);
  } else {
    key.lower = std::move(dst);
    key.higher = std::move(src);
  }
  return key;
}

PacketTrace parse_packet_trace(std::istream& in, const std::string& source_name) {
  PacketTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      if (sv.substr(0, kEpochPrefix.size()) == kEpochPrefix) {
        trace.epoch_label = std::string(sv.substr(kEpochPrefix.size()));
      }
      continue;
    }
    auto fields = split(sv, ',');
    if (fields.size() != 8) {
      fail_at(source_name, line_no,
              "expected 8 comma-separated fields, got " + std::to_string(fields.size()));
    }
    PacketRecord rec;
    if (!parse_int(trim(fields[0]), rec.timestamp_us)) {
      fail_at(source_name, line_no, "bad timestamp '" + std::string(trim(fields[0])) + "'");
    }
    rec.direction = parse_direction(trim(fields[1]), source_name, line_no);
    if (!parse_int(trim(fields[2]), rec.size_bytes) || rec.size_bytes == 0) {
      fail_at(source_name, line_no, "bad size '" + std::string(trim(fields[2])) + "' (must be >= 1)");
    }
    rec.transport = parse_transport(trim(fields[3]), source_name, line_no);
    rec.src_addr = std::string(trim(fields[4]));
    rec.src_port = parse_port(trim(fields[5]), source_name, line_no);
    rec.dst_addr = std::string(trim(fields[6]));
    rec.dst_port = parse_port(trim(fields[7]), source_name, line_no);
    if (rec.src_addr.empty() || rec.dst_addr.empty()) {
      fail_at(source_name, line_no, "empty address field");
    }
    if (!trace.packets.empty() && rec.timestamp_us < trace.packets.back().timestamp_us) {
      fail_at(source_name, line_no,
              "non-monotonic timestamp (" + std::to_string(rec.timestamp_us) + " after " +
                  std::to_string(trace.packets.back().timestamp_us) + ")");
    }
    trace.packets.push_back(std::move(rec));
  }
  return trace;
}

PacketTrace parse_packet_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open packet trace: " + path);
  return parse_packet_trace(in, path);
}

std::string format_packet_trace(const PacketTrace& trace) {
  std::ostringstream out;
  if (!trace.epoch_label.empty()) {
    out << kEpochPrefix << trace.epoch_label << '\n';
  }
  for (const PacketRecord& p : trace.packets) {
    out << p.timestamp_us << ',' << to_string(p.direction) << ',' << p.size_bytes << ','
        << to_string(p.transport) << ',' << p.src_addr << ',' << p.src_port << ',' << p.dst_addr
        << ',' << p.dst_port << '\n';
  }
  return out.str();
}

MethodTraceResult parse_method_trace(std::istream& in, const std::string& source_name) {
  struct ThreadState {
    std::vector<MethodEvent> events;
    std::vector<std::string> open_stack;  // method ids of unmatched enters
    std::int64_t last_ts = 0;
  };
  std::map<std::int64_t, ThreadState> threads;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split(sv, ',');
    if (fields.size() != 4) {
      fail_at(source_name, line_no,
              "expected 4 comma-separated fields, got " + std::to_string(fields.size()));
    }
    MethodEvent ev;
    if (!parse_int(trim(fields[0]), ev.timestamp_us)) {
      fail_at(source_name, line_no, "bad timestamp '" + std::string(trim(fields[0])) + "'");
    }
    std::string_view kind = trim(fields[1]);
    if (kind == "enter") {
      ev.kind = EventKind::kEnter;
    } else if (kind == "exit") {
      ev.kind = EventKind::kExit;
    } else {
      fail_at(source_name, line_no, "bad event kind '" + std::string(kind) + "' (expected enter|exit)");
    }
    if (!parse_int(trim(fields[2]), ev.thread_id)) {
      fail_at(source_name, line_no, "bad thread id '" + std::string(trim(fields[2])) + "'");
    }
    ev.method_id = std::string(trim(fields[3]));
    if (ev.method_id.empty()) {
      fail_at(source_name, line_no, "empty method id");
    }

    ThreadState& st = threads[ev.thread_id];
    if (!st.events.empty() && ev.timestamp_us < st.last_ts) {
      fail_at(source_name, line_no,
              "non-monotonic timestamp on thread " + std::to_string(ev.thread_id) + " (" +
                  std::to_string(ev.timestamp_us) + " after " + std::to_string(st.last_ts) + ")");
    }
    if (ev.kind == EventKind::kEnter) {
      st.open_stack.push_back(ev.method_id);
    } else {
      if (st.open_stack.empty()) {
        fail_at(source_name, line_no,
                "exit without enter for '" + ev.method_id + "' on thread " +
                    std::to_string(ev.thread_id));
      }
      if (st.open_stack.back() != ev.method_id) {
        fail_at(source_name, line_no,
                "mismatched exit: got '" + ev.method_id + "' while '" + st.open_stack.back() +
                    "' is open on thread " + std::to_string(ev.thread_id));
      }
      st.open_stack.pop_back();
    }
    st.last_ts = ev.timestamp_us;
    st.events.push_back(std::move(ev));
  }

  MethodTraceResult result;
  for (auto& [tid, st] : threads) {
    // Close anything the trace left open so downstream consumers always see
    // properly nested enter/exit pairs.
    while (!st.open_stack.empty()) {
      MethodEvent synthetic;
      synthetic.kind = EventKind::kExit;
      synthetic.timestamp_us = st.last_ts;
      synthetic.thread_id = tid;
      synthetic.method_id = st.open_stack.back();
      st.open_stack.pop_back();
      result.warnings.push_back("thread " + std::to_string(tid) + ": unclosed enter for '" +
                                synthetic.method_id + "', closing at " +
                                std::to_string(st.last_ts));
      st.events.push_back(std::move(synthetic));
    }
    result.threads.push_back(ThreadTrace{tid, std::move(st.events)});
  }
  return result;
}

MethodTraceResult parse_method_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open method trace: " + path);
  return parse_method_trace(in, path);
}

std::vector<Flow> segment_flows(const PacketTrace& trace, std::int64_t idle_gap_us) {
  if (idle_gap_us <= 0) throw ConfigError("idle_gap_us must be positive");

  // Per key: index of the flow currently open plus the timestamp of its most
  // recent packet. The trace is time-ordered, so one pass suffices.
  struct OpenFlow {
    std::size_t flow_index;
    std::int64_t last_ts;
  };
  std::vector<Flow> flows;
  std::map<FlowKey, OpenFlow> open;

  for (std::size_t i = 0; i < trace.packets.size(); ++i) {
    const PacketRecord& p = trace.packets[i];
    FlowKey key = FlowKey::of(p);
    auto it = open.find(key);
    if (it != open.end() && p.timestamp_us - it->second.last_ts <= idle_gap_us) {
      flows[it->second.flow_index].packet_indices.push_back(i);
      it->second.last_ts = p.timestamp_us;
    } else {
      Flow f;
      f.key = key;
      f.packet_indices.push_back(i);
      flows.push_back(std::move(f));
      open[key] = OpenFlow{flows.size() - 1, p.timestamp_us};
    }
  }
  return flows;
}

}  // namespace offprof
