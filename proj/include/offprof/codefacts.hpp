#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "offprof/errors.hpp"

namespace offprof {

// One recorded API access, e.g. {subsystem: "hw.vibrate", site: "Vibrator.vibrate(long)"}.
struct ApiAccess {
  std::string subsystem;
  std::string site;
};

struct FieldFact {
  std::string name;
  std::string type;
};

// A type as recorded by the facts producer. declares_serializable already
// accounts for markers inherited through supertypes; this analysis does not
// re-propagate it.
struct TypeFact {
  std::string name;
  std::string kind = "class-like";  // class-like | interface-like
  bool is_library = false;
  bool declares_serializable = false;
  std::vector<std::string> supertypes;
  std::vector<FieldFact> fields;
  bool auto_registered = false;  // synthesized for an unresolved reference
};

struct CallRef {
  std::string owner;
  std::string method;
};

struct MethodFact {
  std::string owner;
  std::string name;
  std::vector<std::string> params;
  std::string return_type = "void";
  std::vector<CallRef> calls;
  std::vector<ApiAccess> api_accesses;
};

// Immutable after load. Call edges are resolved up front: one edge per
// (caller, overload of the referenced owner/method name) pair.
class CodeFactsDb {
 public:
  const std::vector<TypeFact>& types() const { return types_; }
  const std::vector<MethodFact>& methods() const { return methods_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const TypeFact* find_type(const std::string& name) const;
  std::span<const std::size_t> callees_of(std::size_t method_index) const;

  friend CodeFactsDb load_facts(const std::string& json_text,
                                const std::vector<std::string>* allowed_tags);

 private:
  std::vector<TypeFact> types_;
  std::vector<MethodFact> methods_;
  std::map<std::string, std::size_t> type_index_;
  std::vector<std::vector<std::size_t>> call_edges_;  // parallel to methods_
  std::vector<std::string> warnings_;
};

// Parses a facts document: top-level types[] with name, kind, is_library,
// declares_serializable, supertypes[], fields[]{name,type} and nested
// methods[] with name, params[], return, calls[]{owner,method},
// api_accesses[]{subsystem,site}. Types referenced but not declared are
// auto-registered as external library types with a warning. When
// allowed_tags is given, any api_access subsystem outside it is an error.
CodeFactsDb load_facts(const std::string& json_text,
                       const std::vector<std::string>* allowed_tags = nullptr);
CodeFactsDb load_facts_file(const std::string& path,
                            const std::vector<std::string>* allowed_tags = nullptr);

enum class Reach { kNone, kDirect, kTransitive };
const char* to_string(Reach r);

struct Blocker {
  std::string kind;     // not-serializable | not-convertible | hardware | filesystem
  std::string subject;  // offending type name, or owner.method of the access
  std::string detail;

  friend bool operator==(const Blocker&, const Blocker&) = default;
  auto operator<=>(const Blocker&) const = default;
};

struct ConstraintFinding {
  std::string owner;
  std::string name;
  std::vector<std::string> params;
  bool directly_migratable = false;
  bool convertible_minor = false;
  Reach hardware = Reach::kNone;
  Reach filesystem = Reach::kNone;
  std::vector<Blocker> blockers;
};

struct AnalysisOptions {
  // Type names treated as serializable regardless of recorded facts
  // (value-ish platform types the migration layer handles natively).
  std::vector<std::string> always_serializable;
  std::vector<std::string> hardware_catalog;
  std::vector<std::string> filesystem_tags;
};

bool is_primitive_type(const std::string& name);

// Serializable for verdict purposes: primitive, configured as always
// serializable, or recorded with the serializable marker.
bool is_serializable(const CodeFactsDb& db, const std::string& type_name,
                     const AnalysisOptions& opt);

// Greatest fixed point of the convertibility rule: start from every
// serializable type plus every non-library type, then repeatedly drop any
// non-library type with a supertype or field type that is neither
// serializable nor still in the set. Cycles without an external blocker
// survive, which is the optimistic reading the removal rule implies.
std::set<std::string> convertible_set(const CodeFactsDb& db, const AnalysisOptions& opt);

// True iff owner, every parameter, and the return type are serializable.
bool directly_migratable(const CodeFactsDb& db, const MethodFact& method,
                         const AnalysisOptions& opt, std::vector<Blocker>* blockers = nullptr);

// True iff owner, parameters, and return are each serializable or in the
// convertible set (direct migratability implies this).
bool migratable_with_minor_changes(const CodeFactsDb& db, const MethodFact& method,
                                   const std::set<std::string>& convertible,
                                   const AnalysisOptions& opt,
                                   std::vector<Blocker>* blockers = nullptr);

// Direct when the method's own api_accesses hit the catalog; transitive when
// any method reachable over call edges does; none otherwise.
Reach hardware_constraints(const CodeFactsDb& db, std::size_t method_index,
                           std::span<const std::string> catalog,
                           std::vector<Blocker>* blockers = nullptr);

// Same reachability semantics restricted to the filesystem tags.
Reach filesystem_constraints(const CodeFactsDb& db, std::size_t method_index,
                             std::span<const std::string> filesystem_tags,
                             std::vector<Blocker>* blockers = nullptr);

ConstraintFinding analyze_method(const CodeFactsDb& db, std::size_t method_index,
                                 const std::set<std::string>& convertible,
                                 const AnalysisOptions& opt);
std::vector<ConstraintFinding> analyze_all(const CodeFactsDb& db, const AnalysisOptions& opt);

struct SummaryStats {
  std::size_t method_count = 0;
  double pct_directly_migratable = 0.0;
  double pct_convertible_minor = 0.0;
  double pct_hardware = 0.0;     // direct or transitive
  double pct_filesystem = 0.0;   // direct or transitive
  bool empty = false;
};

SummaryStats summarize_stats(const CodeFactsDb& db, std::span<const ConstraintFinding> findings);

// One line per method:
// owner,method(params),directly_migratable,convertible_minor,hardware,filesystem,blocker_count
// sorted by owner, then name, then parameter list.
std::string format_findings(std::span<const ConstraintFinding> findings);

// Percentage table with one row per summary statistic.
std::string format_stats(const SummaryStats& stats);

}  // namespace offprof
