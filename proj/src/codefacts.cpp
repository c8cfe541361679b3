#include "offprof/codefacts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "util.hpp"

namespace offprof {

namespace {

using nlohmann::json;

const char* const kPrimitives[] = {"void", "boolean", "byte",  "char",  "short",
                                   "int",  "long",    "float", "double"};

std::string method_display(const std::string& name, std::span<const std::string> params) {
  std::string out = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ';';
    out += params[i];
  }
  out += ')';
  return out;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError("facts: " + where + ": missing or non-string '" + key + "'");
  }
  return it->get<std::string>();
}

bool optional_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ParseError("facts: " + where + ": '" + key + "' must be boolean");
  return it->get<bool>();
}

std::vector<std::string> optional_string_array(const json& obj, const char* key,
                                               const std::string& where) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw ParseError("facts: " + where + ": '" + key + "' must be an array");
  for (const json& item : *it) {
    if (!item.is_string()) {
      throw ParseError("facts: " + where + ": '" + key + "' entries must be strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

const TypeFact* CodeFactsDb::find_type(const std::string& name) const {
  auto it = type_index_.find(name);
  return it == type_index_.end() ? nullptr : &types_[it->second];
}

std::span<const std::size_t> CodeFactsDb::callees_of(std::size_t method_index) const {
  return call_edges_.at(method_index);
}

bool is_primitive_type(const std::string& name) {
  for (const char* p : kPrimitives) {
    if (name == p) return true;
  }
  return false;
}

CodeFactsDb load_facts(const std::string& json_text,
                       const std::vector<std::string>* allowed_tags) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("facts: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("facts: top level must be an object");

  CodeFactsDb db;

  auto register_type = [&db](TypeFact t) -> std::size_t {
    std::size_t idx = db.types_.size();
    db.type_index_[t.name] = idx;
    db.types_.push_back(std::move(t));
    return idx;
  };

  auto types_it = doc.find("types");
  if (types_it != doc.end()) {
    if (!types_it->is_array()) throw ParseError("facts: 'types' must be an array");
    for (const json& tj : *types_it) {
      if (!tj.is_object()) throw ParseError("facts: type entries must be objects");
      TypeFact t;
      t.name = require_string(tj, "name", "type entry");
      if (db.type_index_.count(t.name)) {
        throw ParseError("facts: duplicate type name '" + t.name + "'");
      }
      auto kind_it = tj.find("kind");
      if (kind_it != tj.end()) {
        if (!kind_it->is_string()) throw ParseError("facts: " + t.name + ": 'kind' must be a string");
        t.kind = kind_it->get<std::string>();
        if (t.kind != "class-like" && t.kind != "interface-like") {
          throw ParseError("facts: " + t.name + ": bad kind '" + t.kind + "'");
        }
      }
      t.is_library = optional_bool(tj, "is_library", false, t.name);
      t.declares_serializable = optional_bool(tj, "declares_serializable", false, t.name);
      t.supertypes = optional_string_array(tj, "supertypes", t.name);
      auto fields_it = tj.find("fields");
      if (fields_it != tj.end()) {
        if (!fields_it->is_array()) throw ParseError("facts: " + t.name + ": 'fields' must be an array");
        for (const json& fj : *fields_it) {
          if (!fj.is_object()) throw ParseError("facts: " + t.name + ": field entries must be objects");
          FieldFact f;
          f.name = require_string(fj, "name", t.name + " field");
          f.type = require_string(fj, "type", t.name + " field");
          t.fields.push_back(std::move(f));
        }
      }

      auto methods_it = tj.find("methods");
      if (methods_it != tj.end()) {
        if (!methods_it->is_array()) {
          throw ParseError("facts: " + t.name + ": 'methods' must be an array");
        }
        for (const json& mj : *methods_it) {
          if (!mj.is_object()) throw ParseError("facts: " + t.name + ": method entries must be objects");
          MethodFact m;
          m.owner = t.name;
          m.name = require_string(mj, "name", t.name + " method");
          std::string where = t.name + "." + m.name;
          m.params = optional_string_array(mj, "params", where);
          auto ret_it = mj.find("return");
          if (ret_it != mj.end()) {
            if (!ret_it->is_string()) throw ParseError("facts: " + where + ": 'return' must be a string");
            m.return_type = ret_it->get<std::string>();
          }
          auto calls_it = mj.find("calls");
          if (calls_it != mj.end()) {
            if (!calls_it->is_array()) throw ParseError("facts: " + where + ": 'calls' must be an array");
            for (const json& cj : *calls_it) {
              if (!cj.is_object()) throw ParseError("facts: " + where + ": call entries must be objects");
              CallRef c;
              c.owner = require_string(cj, "owner", where + " call");
              c.method = require_string(cj, "method", where + " call");
              m.calls.push_back(std::move(c));
            }
          }
          auto acc_it = mj.find("api_accesses");
          if (acc_it != mj.end()) {
            if (!acc_it->is_array()) {
              throw ParseError("facts: " + where + ": 'api_accesses' must be an array");
            }
            for (const json& aj : *acc_it) {
              if (!aj.is_object()) {
                throw ParseError("facts: " + where + ": api_access entries must be objects");
              }
              ApiAccess a;
              a.subsystem = require_string(aj, "subsystem", where + " api_access");
              auto site_it = aj.find("site");
              if (site_it != aj.end()) {
                if (!site_it->is_string()) {
                  throw ParseError("facts: " + where + ": 'site' must be a string");
                }
                a.site = site_it->get<std::string>();
              }
              if (allowed_tags &&
                  std::find(allowed_tags->begin(), allowed_tags->end(), a.subsystem) ==
                      allowed_tags->end()) {
                throw ParseError("facts: " + where + ": unknown subsystem tag '" + a.subsystem +
                                 "'");
              }
              m.api_accesses.push_back(std::move(a));
            }
          }
          db.methods_.push_back(std::move(m));
        }
      }
      register_type(std::move(t));
    }
  }

  // Second pass: resolve every referenced type name, synthesizing external
  // library placeholders for the unknown ones. Arguments are by value: the
  // register_type call can reallocate types_ under any reference into it.
  auto resolve = [&](std::string name, std::string referrer) {
    if (name.empty() || is_primitive_type(name) || db.type_index_.count(name)) return;
    TypeFact t;
    t.name = name;
    t.is_library = true;
    t.auto_registered = true;
    register_type(std::move(t));
    db.warnings_.push_back("unknown type '" + name + "' referenced by " + referrer +
                           "; registered as external library type");
  };

  for (std::size_t i = 0, n = db.types_.size(); i < n; ++i) {
    // Iterate by index: resolve() may grow the vector, but only appends.
    for (const std::string& s : std::vector<std::string>(db.types_[i].supertypes)) {
      resolve(s, db.types_[i].name);
    }
    for (const FieldFact& f : std::vector<FieldFact>(db.types_[i].fields)) {
      resolve(f.type, db.types_[i].name + "." + f.name);
    }
  }
  for (const MethodFact& m : db.methods_) {
    std::string where = m.owner + "." + m.name;
    for (const std::string& p : m.params) resolve(p, where);
    resolve(m.return_type, where);
    for (const CallRef& c : m.calls) resolve(c.owner, where);
  }

  // Call edges: a call reference fans out to every overload of the target.
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_owner_name;
  for (std::size_t i = 0; i < db.methods_.size(); ++i) {
    by_owner_name[{db.methods_[i].owner, db.methods_[i].name}].push_back(i);
  }
  db.call_edges_.resize(db.methods_.size());
  for (std::size_t i = 0; i < db.methods_.size(); ++i) {
    for (const CallRef& c : db.methods_[i].calls) {
      auto it = by_owner_name.find({c.owner, c.method});
      if (it == by_owner_name.end()) {
        db.warnings_.push_back("unresolved call target '" + c.owner + "." + c.method + "' from " +
                               db.methods_[i].owner + "." + db.methods_[i].name +
                               "; edge ignored");
        continue;
      }
      for (std::size_t callee : it->second) db.call_edges_[i].push_back(callee);
    }
  }

  return db;
}

CodeFactsDb load_facts_file(const std::string& path, const std::vector<std::string>* allowed_tags) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open facts document: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_facts(buf.str(), allowed_tags);
}

const char* to_string(Reach r) {
  switch (r) {
    case Reach::kDirect:
      return "direct";
    case Reach::kTransitive:
      return "transitive";
    default:
      return "none";
  }
}

bool is_serializable(const CodeFactsDb& db, const std::string& type_name,
                     const AnalysisOptions& opt) {
  if (is_primitive_type(type_name)) return true;
  if (std::find(opt.always_serializable.begin(), opt.always_serializable.end(), type_name) !=
      opt.always_serializable.end()) {
    return true;
  }
  const TypeFact* t = db.find_type(type_name);
  return t && t->declares_serializable;
}

std::set<std::string> convertible_set(const CodeFactsDb& db, const AnalysisOptions& opt) {
  std::set<std::string> s;
  for (const TypeFact& t : db.types()) {
    if (!t.is_library || is_serializable(db, t.name, opt)) s.insert(t.name);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const TypeFact& t : db.types()) {
      if (t.is_library || !s.count(t.name)) continue;
      auto blocked_by = [&](const std::string& dep) {
        return !is_serializable(db, dep, opt) && !s.count(dep);
      };
      bool blocked = std::any_of(t.supertypes.begin(), t.supertypes.end(), blocked_by) ||
                     std::any_of(t.fields.begin(), t.fields.end(),
                                 [&](const FieldFact& f) { return blocked_by(f.type); });
      if (blocked) {
        s.erase(t.name);
        changed = true;
      }
    }
  }
  return s;
}

namespace {

void check_signature(const CodeFactsDb& db, const MethodFact& method, const AnalysisOptions& opt,
                     const std::set<std::string>* convertible, bool& ok,
                     std::vector<Blocker>* blockers, const char* blocker_kind) {
  auto passes = [&](const std::string& name) {
    if (is_serializable(db, name, opt)) return true;
    return convertible && convertible->count(name) > 0;
  };
  auto check = [&](const std::string& name, const std::string& role) {
    if (passes(name)) return;
    ok = false;
    if (blockers) blockers->push_back(Blocker{blocker_kind, name, role});
  };
  check(method.owner, "owner type");
  for (std::size_t i = 0; i < method.params.size(); ++i) {
    check(method.params[i], "parameter " + std::to_string(i + 1));
  }
  check(method.return_type, "return type");
}

Reach reach_for_tags(const CodeFactsDb& db, std::size_t method_index,
                     std::span<const std::string> tags, const char* blocker_kind,
                     std::vector<Blocker>* blockers) {
  auto tagged = [&](const ApiAccess& a) {
    return std::find(tags.begin(), tags.end(), a.subsystem) != tags.end();
  };
  auto collect = [&](std::size_t mi) {
    bool any = false;
    const MethodFact& m = db.methods()[mi];
    for (const ApiAccess& a : m.api_accesses) {
      if (!tagged(a)) continue;
      any = true;
      if (blockers) {
        blockers->push_back(Blocker{blocker_kind,
                                    m.owner + "." + method_display(m.name, m.params),
                                    a.subsystem + (a.site.empty() ? "" : " at " + a.site)});
      }
    }
    return any;
  };

  if (collect(method_index)) return Reach::kDirect;

  // Depth-first over call edges; the visited set keeps cycles finite.
  std::vector<bool> visited(db.methods().size(), false);
  visited[method_index] = true;
  std::vector<std::size_t> stack(db.callees_of(method_index).begin(),
                                 db.callees_of(method_index).end());
  bool found = false;
  while (!stack.empty()) {
    std::size_t mi = stack.back();
    stack.pop_back();
    if (visited[mi]) continue;
    visited[mi] = true;
    if (collect(mi)) found = true;
    for (std::size_t callee : db.callees_of(mi)) {
      if (!visited[callee]) stack.push_back(callee);
    }
  }
  return found ? Reach::kTransitive : Reach::kNone;
}

}  // namespace

bool directly_migratable(const CodeFactsDb& db, const MethodFact& method,
                         const AnalysisOptions& opt, std::vector<Blocker>* blockers) {
  bool ok = true;
  check_signature(db, method, opt, nullptr, ok, blockers, "not-serializable");
  return ok;
}

bool migratable_with_minor_changes(const CodeFactsDb& db, const MethodFact& method,
                                   const std::set<std::string>& convertible,
                                   const AnalysisOptions& opt, std::vector<Blocker>* blockers) {
  bool ok = true;
  check_signature(db, method, opt, &convertible, ok, blockers, "not-convertible");
  return ok;
}

Reach hardware_constraints(const CodeFactsDb& db, std::size_t method_index,
                           std::span<const std::string> catalog,
                           std::vector<Blocker>* blockers) {
  return reach_for_tags(db, method_index, catalog, "hardware", blockers);
}

Reach filesystem_constraints(const CodeFactsDb& db, std::size_t method_index,
                             std::span<const std::string> filesystem_tags,
                             std::vector<Blocker>* blockers) {
  return reach_for_tags(db, method_index, filesystem_tags, "filesystem", blockers);
}

ConstraintFinding analyze_method(const CodeFactsDb& db, std::size_t method_index,
                                 const std::set<std::string>& convertible,
                                 const AnalysisOptions& opt) {
  const MethodFact& m = db.methods().at(method_index);
  ConstraintFinding f;
  f.owner = m.owner;
  f.name = m.name;
  f.params = m.params;
  f.directly_migratable = directly_migratable(db, m, opt, &f.blockers);
  f.convertible_minor = migratable_with_minor_changes(db, m, convertible, opt, &f.blockers);
  f.hardware = hardware_constraints(db, method_index, opt.hardware_catalog, &f.blockers);
  f.filesystem = filesystem_constraints(db, method_index, opt.filesystem_tags, &f.blockers);
  std::sort(f.blockers.begin(), f.blockers.end());
  f.blockers.erase(std::unique(f.blockers.begin(), f.blockers.end()), f.blockers.end());
  return f;
}

std::vector<ConstraintFinding> analyze_all(const CodeFactsDb& db, const AnalysisOptions& opt) {
  std::set<std::string> convertible = convertible_set(db, opt);
  std::vector<ConstraintFinding> findings;
  findings.reserve(db.methods().size());
  for (std::size_t i = 0; i < db.methods().size(); ++i) {
    findings.push_back(analyze_method(db, i, convertible, opt));
  }
  return findings;
}

SummaryStats summarize_stats(const CodeFactsDb& db, std::span<const ConstraintFinding> findings) {
  SummaryStats stats;
  stats.method_count = db.methods().size();
  if (stats.method_count == 0 || findings.empty()) {
    stats.empty = true;
    return stats;
  }
  std::size_t direct = 0, minor = 0, hw = 0, fs = 0;
  for (const ConstraintFinding& f : findings) {
    direct += f.directly_migratable ? 1 : 0;
    minor += f.convertible_minor ? 1 : 0;
    hw += f.hardware != Reach::kNone ? 1 : 0;
    fs += f.filesystem != Reach::kNone ? 1 : 0;
  }
  double denom = static_cast<double>(findings.size());
  stats.pct_directly_migratable = 100.0 * static_cast<double>(direct) / denom;
  stats.pct_convertible_minor = 100.0 * static_cast<double>(minor) / denom;
  stats.pct_hardware = 100.0 * static_cast<double>(hw) / denom;
  stats.pct_filesystem = 100.0 * static_cast<double>(fs) / denom;
  return stats;
}

std::string format_findings(std::span<const ConstraintFinding> findings) {
  std::vector<const ConstraintFinding*> order;
  order.reserve(findings.size());
  for (const ConstraintFinding& f : findings) order.push_back(&f);
  std::sort(order.begin(), order.end(), [](const ConstraintFinding* a, const ConstraintFinding* b) {
    if (a->owner != b->owner) return a->owner < b->owner;
    if (a->name != b->name) return a->name < b->name;
    return a->params < b->params;
  });

  std::ostringstream out;
  out << "# owner,method,directly_migratable,convertible_minor,hardware,filesystem,blocker_count\n";
  for (const ConstraintFinding* f : order) {
    out << f->owner << ',' << method_display(f->name, f->params) << ','
        << (f->directly_migratable ? "true" : "false") << ','
        << (f->convertible_minor ? "true" : "false") << ',' << to_string(f->hardware) << ','
        << to_string(f->filesystem) << ',' << f->blockers.size() << '\n';
  }
  return out.str();
}

std::string format_stats(const SummaryStats& stats) {
  std::ostringstream out;
  out << "# hardware and filesystem rows count direct and transitive access together\n";
  out << "# convertibility follows declared supertypes and field types only\n";
  out << "statistic,value\n";
  out << "Number of methods," << stats.method_count << '\n';
  out << "Directly migratable," << detail::format_fixed1(stats.pct_directly_migratable) << "%\n";
  out << "Migratable with minor changes," << detail::format_fixed1(stats.pct_convertible_minor)
      << "%\n";
  out << "Hardware access constraints," << detail::format_fixed1(stats.pct_hardware) << "%\n";
  out << "Potential unexpected behavior," << detail::format_fixed1(stats.pct_filesystem) << "%\n";
  if (stats.empty) out << "# empty: no methods analyzed\n";
  return out.str();
}

}  // namespace offprof
