#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlar/util.hpp"

namespace mlar {

// Insertion-ordered JSON keeps serialized field order identical to the type
// definitions, which is what the canonical on-disk format requires.
using Json = nlohmann::ordered_json;

// Content hash of the raw document bytes: 64 lowercase hex chars (SHA-256).
struct DocumentId {
  std::string value;

  static DocumentId of_bytes(std::string_view bytes) {
    return DocumentId{sha256_hex(bytes)};
  }

  bool operator==(const DocumentId&) const = default;
  auto operator<=>(const DocumentId&) const = default;
};

enum class DocKind { Job, Resume };

std::string to_string(DocKind kind);
DocKind parse_doc_kind(const std::string& s);

struct RawDocument {
  DocumentId id;
  DocKind kind = DocKind::Resume;
  std::filesystem::path source_path;
  std::string text;
  UtcSeconds received_at{};
};

// The 24 profession categories; a closed set.
enum class Department {
  HR,
  Designer,
  InformationTechnology,
  Teacher,
  Advocate,
  BusinessDevelopment,
  Healthcare,
  Fitness,
  Agriculture,
  BPO,
  Sales,
  Consultant,
  DigitalMedia,
  Automobile,
  Chef,
  Finance,
  Apparel,
  Engineering,
  Accountant,
  Construction,
  PublicRelations,
  Banking,
  Arts,
  Aviation,
};

inline constexpr int kDepartmentCount = 24;

const std::vector<Department>& all_departments();
std::string to_label(Department d);

// Case-insensitive; runs of whitespace collapse and "-" and " " are
// interchangeable. Unknown labels throw Error("unknown department").
Department parse_department(const std::string& label);

// Lowercase, trimmed, internal whitespace runs collapsed to single spaces.
// Idempotent. Throws Error("empty skill") when nothing is left.
std::string normalize_skill(std::string_view raw);

// Exactly one '@', non-empty local and domain parts, no whitespace.
bool is_valid_email(std::string_view s);

struct JobFeatures {
  DocumentId job_id;
  std::string title;
  std::set<std::string> required_skills;  // normalized, deduplicated
  std::string experience_level;
  std::string education;
  std::vector<std::string> preferences;
  Department department = Department::HR;
  std::optional<std::string> hr_notify_email;

  bool operator==(const JobFeatures&) const = default;
};

struct ExperienceEntry {
  std::string role_title;
  std::string description;
  std::optional<double> years;

  bool operator==(const ExperienceEntry&) const = default;
};

struct EducationEntry {
  std::string degree;
  std::optional<std::string> institution;

  bool operator==(const EducationEntry&) const = default;
};

struct ResumeFeatures {
  DocumentId resume_id;
  std::string candidate_name;
  std::optional<std::string> email;
  std::optional<std::string> phone;
  std::set<std::string> skills;  // normalized, deduplicated
  std::vector<ExperienceEntry> experience;
  std::vector<EducationEntry> education;
  Department predicted_department = Department::HR;

  bool operator==(const ResumeFeatures&) const = default;
};

enum class ScorerKind { LLM, Baseline };

std::string to_string(ScorerKind kind);
ScorerKind parse_scorer_kind(const std::string& s);

struct SimilarityScore {
  DocumentId job_id;
  DocumentId resume_id;
  double value = 0.0;  // always in [0, 100]
  ScorerKind scorer = ScorerKind::Baseline;
  UtcSeconds computed_at{};

  // The only way to build one; out-of-range values are an error, never
  // clamped.
  static SimilarityScore checked(DocumentId job_id, DocumentId resume_id,
                                 double value, ScorerKind scorer,
                                 UtcSeconds computed_at);
};

struct RankEntry {
  DocumentId resume_id;
  double value = 0.0;

  bool operator==(const RankEntry&) const = default;
};

struct Ranking {
  DocumentId job_id;
  std::vector<RankEntry> entries;  // score desc, received_at asc, id asc
};

struct SelectedCandidates {
  DocumentId job_id;
  std::vector<DocumentId> selected;  // prefix of the ranking order
  int k = 3;
};

struct NotificationMessage {
  DocumentId job_id;
  DocumentId resume_id;
  std::string recipient;
  std::string subject;
  std::string body;
  bool dry_run = false;

  bool operator==(const NotificationMessage&) const = default;
};

enum class AuditOutcome { Ok, Skipped, Error };

std::string to_string(AuditOutcome o);
AuditOutcome parse_audit_outcome(const std::string& s);

struct AuditLogEntry {
  UtcSeconds timestamp{};
  std::string operation;
  std::vector<std::string> document_ids;
  AuditOutcome outcome = AuditOutcome::Ok;
  std::string detail;
};

// Canonical JSON (snake_case fields, RFC 3339 timestamps). Optional scalar
// fields are omitted when absent; list fields are always present.
void to_json(Json& j, const DocumentId& id);
void from_json(const Json& j, DocumentId& id);
void to_json(Json& j, const RawDocument& d);
void from_json(const Json& j, RawDocument& d);
void to_json(Json& j, const JobFeatures& f);
void from_json(const Json& j, JobFeatures& f);
void to_json(Json& j, const ExperienceEntry& e);
void from_json(const Json& j, ExperienceEntry& e);
void to_json(Json& j, const EducationEntry& e);
void from_json(const Json& j, EducationEntry& e);
void to_json(Json& j, const ResumeFeatures& f);
void from_json(const Json& j, ResumeFeatures& f);
void to_json(Json& j, const SimilarityScore& s);
void from_json(const Json& j, SimilarityScore& s);
void to_json(Json& j, const Ranking& r);
void from_json(const Json& j, Ranking& r);
void to_json(Json& j, const SelectedCandidates& s);
void from_json(const Json& j, SelectedCandidates& s);
void to_json(Json& j, const NotificationMessage& m);
void from_json(const Json& j, NotificationMessage& m);
void to_json(Json& j, const AuditLogEntry& e);
void from_json(const Json& j, AuditLogEntry& e);

}  // namespace mlar
