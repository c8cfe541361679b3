#pragma once

// Hand-classified expectations for every method in facts_corpus.json,
// written down before the analyzer ran on it. Columns: owner, method name,
// directly migratable, convertible with minor changes, hardware reach,
// filesystem reach ('n' none / 'd' direct / 't' transitive).

#include <cstddef>

namespace labels {

struct MethodLabel {
  const char* owner;
  const char* name;
  bool direct;
  bool minor;
  char hardware;
  char filesystem;
};

inline constexpr MethodLabel kCorpusLabels[] = {
    {"app.Timeline", "refresh", true, true, 'n', 'n'},
    {"app.Timeline", "entryAt", true, true, 'n', 'n'},
    {"app.Timeline", "merge", true, true, 'n', 'n'},
    {"app.Timeline", "attach", false, false, 'n', 'n'},
    {"app.Timeline", "clear", true, true, 'n', 'n'},
    {"app.Timeline", "size", true, true, 'n', 'n'},
    {"app.Entry", "text", true, true, 'n', 'n'},
    {"app.Entry", "len", true, true, 'n', 'n'},
    {"app.Entry", "at", true, true, 'n', 'n'},
    {"app.Session", "connect", false, false, 'n', 'n'},
    {"app.Session", "close", false, false, 'n', 'n'},
    {"app.Session", "id", false, false, 'n', 'n'},
    {"app.Session", "token", false, false, 'n', 't'},
    {"app.Account", "loadToken", false, false, 'n', 'd'},
    {"app.Account", "sync", false, false, 'n', 't'},
    {"app.Account", "name", false, false, 'n', 'n'},
    {"app.CycleA", "ping", false, true, 'n', 'n'},
    {"app.CycleA", "pingHw", false, true, 't', 'n'},
    {"app.CycleA", "self", false, true, 'n', 'n'},
    {"app.CycleB", "pong", false, true, 'n', 'n'},
    {"app.CycleB", "pongHw", false, true, 't', 'n'},
    {"app.Node", "append", false, true, 'n', 'n'},
    {"app.Node", "value", false, true, 'n', 'n'},
    {"app.Config", "path", false, true, 'n', 'n'},
    {"app.Config", "withPath", false, true, 'n', 'n'},
    {"app.Config", "empty", false, true, 'n', 'n'},
    {"app.Config", "clone2", false, true, 'n', 'n'},
    {"app.BadParent", "draw", false, false, 'd', 'n'},
    {"app.GoodChild", "get", false, true, 'n', 'n'},
    {"app.GoodChild", "set", false, true, 'n', 'n'},
    {"app.BadChild", "run", false, false, 'n', 'n'},
    {"app.BadChild", "stop", false, false, 'n', 'n'},
    {"app.Mixed", "both", false, false, 'n', 'n'},
    {"app.Mixed", "entry", false, false, 'n', 'n'},
    {"app.SerializableButOddField", "use", true, true, 'n', 'n'},
    {"app.SerializableButOddField", "client", false, false, 'n', 'n'},
    {"app.UiHelper", "vibrate", false, true, 'd', 'n'},
    {"app.UiHelper", "notify", false, true, 'd', 'n'},
    {"app.UiHelper", "render", false, true, 'd', 'n'},
    {"app.UiHelper", "quiet", false, true, 'n', 'n'},
    {"app.UiHelper", "buzzViaLib", false, true, 't', 'n'},
    {"app.Net", "fetch", false, false, 'n', 'n'},
    {"app.Net", "openSocket", false, false, 'n', 'n'},
    {"app.Net", "ping", false, false, 'n', 'n'},
    {"app.Worker", "run", false, true, 't', 'n'},
    {"app.Worker", "runQuiet", false, true, 'n', 'n'},
    {"app.Worker", "persist", false, true, 'n', 't'},
    {"app.Worker", "compute", false, true, 'n', 'n'},
    {"app.Worker", "describe", false, true, 'n', 'n'},
    {"app.Storage", "save", false, true, 'n', 'd'},
    {"app.Storage", "load", false, true, 'n', 'd'},
    {"app.Storage", "wipe", false, true, 'n', 'd'},
    {"app.Primitives", "add", false, true, 'n', 'n'},
    {"app.Primitives", "scale", false, true, 'n', 'n'},
    {"app.Primitives", "check", false, true, 'n', 'n'},
    {"app.GenericHolder", "first", false, true, 'n', 'n'},
    {"app.GenericHolder", "add", false, true, 'n', 'n'},
    {"app.Island", "touch", true, true, 'n', 'n'},
    {"app.Island", "copy", true, true, 'n', 'n'},
    {"app.Island", "hop", true, true, 'n', 'n'},
    {"app.CallbackImpl", "call", false, false, 'n', 'n'},
    {"app.Deep", "start", false, true, 't', 'n'},
    {"app.Deep", "idle", false, true, 'n', 'n'},
    {"app.Deep", "chain", false, true, 't', 'n'},
    {"lib.hw.Vibrator", "buzz", false, false, 'd', 'n'},
};

inline constexpr std::size_t kCorpusMethodCount = sizeof(kCorpusLabels) / sizeof(kCorpusLabels[0]);

// Expected summary over the table above: 12/65 direct, 46/65 minor,
// 11/65 hardware (5 direct + 6 transitive), 7/65 filesystem (4 + 3).
inline constexpr const char* kExpectedStatsRows[] = {
    "Number of methods,65",
    "Directly migratable,18.5%",
    "Migratable with minor changes,70.8%",
    "Hardware access constraints,16.9%",
    "Potential unexpected behavior,10.8%",
};

}  // namespace labels
