#include "offprof/calltree.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>

#include "support/fixture.hpp"
#include "support/oracles.hpp"

using namespace offprof;

namespace {

ThreadTrace make_thread(std::int64_t id,
                        std::initializer_list<std::pair<EventKind, const char*>> seq) {
  ThreadTrace t;
  t.thread_id = id;
  std::int64_t ts = 0;
  for (const auto& [kind, method] : seq) {
    t.events.push_back({kind, ts, id, method});
    ts += 10;
  }
  return t;
}

constexpr auto kEnter = EventKind::kEnter;
constexpr auto kExit = EventKind::kExit;

struct Bundle {
  PacketTrace trace;
  MethodTraceResult methods;
  std::vector<Flow> flows;
  FlowAssignment assignment;
  EnergyModel model = RrcModelParams{};
  Horizon horizon;
  std::vector<CallTree> trees;
};

Bundle load_bundle() {
  Bundle b;
  b.trace = parse_packet_trace_file(testsupport::fixture_path("sample_packets.trace"));
  b.methods = parse_method_trace_file(testsupport::fixture_path("sample_methods.trace"));
  b.flows = segment_flows(b.trace);
  NetworkCallFilter filter{{"java.net.", "javax.net.", "org.apache.http.", "android.net.",
                            "libcore.io."}};
  b.assignment =
      assign_flows_to_threads(b.trace, b.flows, b.methods.threads, filter, CorrelationParams{});
  b.horizon = default_horizon(b.trace.packets, b.model);
  for (const ThreadTrace& t : b.methods.threads) {
    b.trees.push_back(build_call_tree(t));
    aggregate_traffic(b.trees.back(), b.assignment, b.trace, b.model, b.horizon);
  }
  return b;
}

}  // namespace

TEST_SUITE("calltree") {

TEST_CASE("build_call_tree replays the stack and merges adjacent repeats") {
  SUBCASE("consecutive sibling calls merge, interleaved ones do not") {
    // A, A, B, A at the same depth: the leading pair merges, the trailing
    // A stays its own node because B broke the run.
    auto t = make_thread(1, {{kEnter, "m.A()"}, {kExit, "m.A()"},
                             {kEnter, "m.A()"}, {kExit, "m.A()"},
                             {kEnter, "m.B()"}, {kExit, "m.B()"},
                             {kEnter, "m.A()"}, {kExit, "m.A()"}});
    CallTree tree = build_call_tree(t);
    REQUIRE(tree.nodes().size() == 4);  // root + A + B + A
    CHECK(tree.root().method_id == "<thread:1>");
    REQUIRE(tree.root().children.size() == 3);
    const CallNode& a1 = tree.nodes()[tree.root().children[0]];
    CHECK(a1.method_id == "m.A()");
    CHECK(a1.invocation_count == 2);
    CHECK(tree.nodes()[tree.root().children[1]].method_id == "m.B()");
    const CallNode& a2 = tree.nodes()[tree.root().children[2]];
    CHECK(a2.method_id == "m.A()");
    CHECK(a2.invocation_count == 1);

    // Both enter and exit events resolve to their node.
    CHECK(tree.node_of_event(0) == tree.root().children[0]);
    CHECK(tree.node_of_event(3) == tree.root().children[0]);
    CHECK(tree.node_of_event(6) == tree.root().children[2]);
  }

  SUBCASE("recursion keeps one node per stack frame") {
    auto t = make_thread(1, {{kEnter, "m.R()"}, {kEnter, "m.R()"},
                             {kExit, "m.R()"}, {kExit, "m.R()"}});
    CallTree tree = build_call_tree(t);
    REQUIRE(tree.nodes().size() == 3);
    std::size_t outer = tree.root().children.at(0);
    REQUIRE(tree.nodes()[outer].children.size() == 1);
    CHECK(tree.nodes()[tree.nodes()[outer].children[0]].method_id == "m.R()");
  }

  SUBCASE("malformed event sequences are rejected") {
    CHECK_THROWS_AS(build_call_tree(make_thread(1, {{kExit, "m.A()"}})), std::invalid_argument);
    CHECK_THROWS_AS(build_call_tree(make_thread(1, {{kEnter, "m.A()"}, {kExit, "m.B()"}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_call_tree(make_thread(1, {{kEnter, "m.A()"}})), std::invalid_argument);
  }
}

TEST_CASE("collapse_chains folds matching frames into their topmost ancestor") {
  // Outer holds a direct M call, then reaches M again through Mid. Folding
  // Mid away leaves the two M invocations adjacent, so they merge.
  auto t = make_thread(7, {{kEnter, "lib.x.Outer()"},
                           {kEnter, "app.M()"}, {kExit, "app.M()"},
                           {kEnter, "lib.x.Mid()"},
                           {kEnter, "app.M()"}, {kExit, "app.M()"},
                           {kExit, "lib.x.Mid()"},
                           {kExit, "lib.x.Outer()"}});
  CallTree tree = build_call_tree(t);
  REQUIRE(tree.nodes().size() == 5);

  std::vector<std::string> prefixes{"lib.x."};
  collapse_chains(tree, prefixes);

  REQUIRE(tree.nodes().size() == 3);  // root, Outer, merged M
  std::size_t outer = tree.root().children.at(0);
  CHECK(tree.nodes()[outer].method_id == "lib.x.Outer()");
  REQUIRE(tree.nodes()[outer].children.size() == 1);
  std::size_t m = tree.nodes()[outer].children[0];
  CHECK(tree.nodes()[m].method_id == "app.M()");
  CHECK(tree.nodes()[m].invocation_count == 2);

  // Events of the folded frame now resolve to the surviving ancestor.
  CHECK(tree.node_of_event(3) == outer);  // lib.x.Mid enter
  CHECK(tree.node_of_event(1) == m);
  CHECK(tree.node_of_event(4) == m);

  SUBCASE("aggregation lands folded-frame packets on the survivor") {
    PacketTrace trace;
    PacketRecord p;
    p.timestamp_us = 35;
    p.size_bytes = 500;
    p.src_addr = "a";
    p.src_port = 1;
    p.dst_addr = "b";
    p.dst_port = 2;
    trace.packets.push_back(p);

    FlowAssignment assignment;
    assignment.packets.push_back(PacketCallAssoc{7, 3});  // the Mid enter event

    aggregate_traffic(tree, assignment, trace, EnergyModel{RrcModelParams{}},
                      Horizon{0, 20'000'000});
    CHECK(tree.nodes()[outer].own_packets == std::vector<std::size_t>{0});
    CHECK(tree.nodes()[m].agg_bytes == 0);
    CHECK(tree.root().agg_bytes == 500);
  }

  SUBCASE("no prefixes means no change") {
    CallTree again = build_call_tree(t);
    collapse_chains(again, {});
    CHECK(again.nodes().size() == 5);
  }

  SUBCASE("a chain below a non-matching parent keeps its top frame") {
    auto u = make_thread(2, {{kEnter, "lib.x.A()"}, {kEnter, "lib.x.B()"},
                             {kEnter, "app.Leaf()"}, {kExit, "app.Leaf()"},
                             {kExit, "lib.x.B()"}, {kExit, "lib.x.A()"}});
    CallTree chain = build_call_tree(u);
    collapse_chains(chain, prefixes);
    REQUIRE(chain.nodes().size() == 3);  // root, A (with B folded in), Leaf
    std::size_t a = chain.root().children.at(0);
    CHECK(chain.nodes()[a].method_id == "lib.x.A()");
    REQUIRE(chain.nodes()[a].children.size() == 1);
    CHECK(chain.nodes()[chain.nodes()[a].children[0]].method_id == "app.Leaf()");
  }
}

TEST_CASE("bundled fixture aggregates traffic onto the socket calls") {
  Bundle b = load_bundle();
  REQUIRE(b.trees.size() == 2);
  const CallTree& t1 = b.trees[0];

  // root -> onClick -> get -> {connect, write, read}
  REQUIRE(t1.nodes().size() == 6);
  CHECK(t1.attributed_packets() == std::vector<std::size_t>{0, 1, 2, 3, 4});

  auto node_by_method = [&](const std::string& id) -> const CallNode& {
    for (const CallNode& n : t1.nodes()) {
      if (n.method_id == id) return n;
    }
    REQUIRE(false);
    return t1.root();
  };

  const CallNode& connect = node_by_method("java.net.Socket.connect()");
  CHECK(connect.own_packets == std::vector<std::size_t>{0});
  CHECK(connect.agg_bytes == 74);
  CHECK(connect.bounds.e_min_j == doctest::Approx(0.240).epsilon(1e-9));
  CHECK(connect.bounds.e_max_j == doctest::Approx(9.520).epsilon(1e-9));

  const CallNode& write = node_by_method("java.net.Socket.write(byte[])");
  CHECK(write.agg_bytes == 210);
  CHECK(write.bounds.e_min_j == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(write.bounds.e_max_j == doctest::Approx(9.520).epsilon(1e-9));

  const CallNode& read = node_by_method("java.net.Socket.read()");
  CHECK(read.own_packets == std::vector<std::size_t>{2, 3, 4});
  CHECK(read.agg_bytes == 2066);
  CHECK(read.bounds.e_min_j == doctest::Approx(0.392).epsilon(1e-9));
  CHECK(read.bounds.e_max_j == doctest::Approx(9.584).epsilon(1e-9));

  const CallNode& get = node_by_method("app.Http.get(java.lang.String)");
  CHECK(get.own_packets.empty());
  CHECK(get.agg_packets == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(get.agg_bytes == 2350);

  // The whole thread pinned to one subtree: bounds collapse to the total.
  CHECK(t1.root().bounds.e_min_j == doctest::Approx(10.152).epsilon(1e-9));
  CHECK(t1.root().bounds.e_max_j == doctest::Approx(10.152).epsilon(1e-9));
  CHECK(get.bounds.e_min_j == doctest::Approx(get.bounds.e_max_j).epsilon(1e-12));

  // Parent aggregates are exactly the union of own and child packets.
  for (const CallNode& n : t1.nodes()) {
    std::vector<std::size_t> expect = n.own_packets;
    for (std::size_t c : n.children) {
      expect.insert(expect.end(), t1.nodes()[c].agg_packets.begin(),
                    t1.nodes()[c].agg_packets.end());
    }
    std::sort(expect.begin(), expect.end());
    CHECK(n.agg_packets == expect);
  }

  // The finalizer thread exists but carries no traffic.
  const CallTree& t2 = b.trees[1];
  CHECK(t2.attributed_packets().empty());
  CHECK(t2.root().agg_bytes == 0);
  CHECK(t2.root().bounds.e_max_j == 0.0);
}

TEST_CASE("aggregate_traffic rejects associations to unknown events") {
  auto t = make_thread(3, {{kEnter, "m.A()"}, {kExit, "m.A()"}});
  CallTree tree = build_call_tree(t);

  PacketTrace trace;
  PacketRecord p;
  p.timestamp_us = 5;
  p.size_bytes = 1;
  p.src_addr = "a";
  p.src_port = 1;
  p.dst_addr = "b";
  p.dst_port = 2;
  trace.packets.push_back(p);

  FlowAssignment assignment;
  assignment.packets.push_back(PacketCallAssoc{3, 17});  // no such event
  CHECK_THROWS_AS(aggregate_traffic(tree, assignment, trace, EnergyModel{RrcModelParams{}},
                                    Horizon{0, 20'000'000}),
                  std::invalid_argument);
}

TEST_CASE("emit_dot renders aggregated trees with byte filtering") {
  Bundle b = load_bundle();
  std::string dot = emit_dot(b.trees);

  oracle::DotSummary summary = oracle::parse_dot(dot);
  CHECK(summary.ok);
  CHECK(summary.error.empty());
  // Thread 1 keeps all six nodes; thread 2's finalize subtree is below the
  // default 1-byte filter, leaving just its root.
  CHECK(summary.node_statements == 7);
  CHECK(summary.edge_statements == 5);
  CHECK(dot.find("digraph network_usage {") == 0);
  CHECK(dot.find("t1_n0 [label=\"<thread:1>") != std::string::npos);
  CHECK(dot.find("\\ncalls=1\\nbytes=2350\\nE=[10.152000,10.152000] J") != std::string::npos);
  CHECK(dot.find("t1_n0 -> t1_n1;") != std::string::npos);
  CHECK(dot.find("t2_n1") == std::string::npos);

  SUBCASE("raising the filter prunes small subtrees") {
    oracle::DotSummary filtered = oracle::parse_dot(emit_dot(b.trees, 100));
    CHECK(filtered.ok);
    CHECK(filtered.node_statements == 6);  // connect (74 bytes) drops out
    CHECK(filtered.edge_statements == 4);
  }
  SUBCASE("a zero filter keeps every node") {
    oracle::DotSummary full = oracle::parse_dot(emit_dot(b.trees, 0));
    CHECK(full.ok);
    CHECK(full.node_statements == 8);
    CHECK(full.edge_statements == 6);
  }
  SUBCASE("label text escapes quotes and backslashes") {
    auto t = make_thread(4, {{kEnter, "m.weird(\"x\\y\")"}, {kExit, "m.weird(\"x\\y\")"}});
    CallTree tree = build_call_tree(t);
    FlowAssignment empty;
    aggregate_traffic(tree, empty, PacketTrace{}, EnergyModel{RrcModelParams{}}, Horizon{0, 1});
    std::string weird = emit_dot(tree, 0);
    CHECK(oracle::parse_dot(weird).ok);
    CHECK(weird.find("m.weird(\\\"x\\\\y\\\")") != std::string::npos);
  }
  SUBCASE("negative thread ids stay valid identifiers") {
    auto t = make_thread(-12, {{kEnter, "m.A()"}, {kExit, "m.A()"}});
    CallTree tree = build_call_tree(t);
    FlowAssignment empty;
    aggregate_traffic(tree, empty, PacketTrace{}, EnergyModel{RrcModelParams{}}, Horizon{0, 1});
    std::string dot_neg = emit_dot(tree, 0);
    CHECK(oracle::parse_dot(dot_neg).ok);
    CHECK(dot_neg.find("tm12_n0") != std::string::npos);
  }
}

TEST_CASE("emit_report rolls methods up across threads") {
  Bundle b = load_bundle();
  std::string report = emit_report(b.trees, b.trace, b.model, b.horizon);
  CHECK(report ==
        "method_id,calls,packets,bytes,e_min_j,e_max_j\n"
        "app.Http.get(java.lang.String),1,5,2350,10.152000,10.152000\n"
        "ui.Main.onClick(android.view.View),1,5,2350,10.152000,10.152000\n"
        "java.net.Socket.read(),1,3,2066,0.392000,9.584000\n"
        "java.net.Socket.connect(),1,1,74,0.240000,9.520000\n"
        "java.net.Socket.write(byte[]),1,1,210,0.000000,9.520000\n"
        "java.net.PlainSocketImpl.finalize(),1,0,0,0.000000,0.000000\n");

  SUBCASE("no trees yields just the header") {
    CHECK(emit_report({}, b.trace, b.model, b.horizon) ==
          "method_id,calls,packets,bytes,e_min_j,e_max_j\n");
  }

  SUBCASE("one method on two threads gets a single merged row") {
    PacketTrace trace;
    for (std::int64_t ts : {100, 200}) {
      PacketRecord p;
      p.timestamp_us = ts;
      p.size_bytes = 50;
      p.src_addr = "a";
      p.src_port = 1;
      p.dst_addr = "b";
      p.dst_port = 2;
      trace.packets.push_back(p);
    }
    auto ta = make_thread(1, {{kEnter, "m.Shared()"}, {kExit, "m.Shared()"}});
    auto tb = make_thread(2, {{kEnter, "m.Shared()"}, {kExit, "m.Shared()"}});
    FlowAssignment assignment;
    assignment.packets = {PacketCallAssoc{1, 0}, PacketCallAssoc{2, 0}};

    std::vector<CallTree> trees{build_call_tree(ta), build_call_tree(tb)};
    Horizon hz{0, 20'000'000};
    EnergyModel model = RrcModelParams{};
    aggregate_traffic(trees[0], assignment, trace, model, hz);
    aggregate_traffic(trees[1], assignment, trace, model, hz);

    std::string merged = emit_report(trees, trace, model, hz);
    CHECK(merged.find("m.Shared(),2,2,100,") != std::string::npos);
  }
}

}  // TEST_SUITE
