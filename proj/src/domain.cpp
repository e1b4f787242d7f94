#include "mlar/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace mlar {

std::string to_string(DocKind kind) {
  return kind == DocKind::Job ? "job" : "resume";
}

DocKind parse_doc_kind(const std::string& s) {
  if (s == "job") return DocKind::Job;
  if (s == "resume") return DocKind::Resume;
  throw Error("bad document kind", s);
}

namespace {

constexpr std::array<const char*, kDepartmentCount> kDepartmentLabels = {
    "HR",           "Designer",     "Information-Technology",
    "Teacher",      "Advocate",     "Business-Development",
    "Healthcare",   "Fitness",      "Agriculture",
    "BPO",          "Sales",        "Consultant",
    "Digital-Media", "Automobile",  "Chef",
    "Finance",      "Apparel",      "Engineering",
    "Accountant",   "Construction", "Public-Relations",
    "Banking",      "Arts",         "Aviation",
};

// Lowercased with whitespace runs collapsed and spaces mapped to '-', so
// "information technology" and "Information-Technology" compare equal.
std::string canonical_department_key(std::string_view label) {
  std::string out;
  bool pending_sep = false;
  for (char c : label) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '-') {
      if (!out.empty()) pending_sep = true;
      continue;
    }
    if (pending_sep) {
      out.push_back('-');
      pending_sep = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

}  // namespace

const std::vector<Department>& all_departments() {
  static const std::vector<Department> all = [] {
    std::vector<Department> v;
    v.reserve(kDepartmentCount);
    for (int i = 0; i < kDepartmentCount; ++i) {
      v.push_back(static_cast<Department>(i));
    }
    return v;
  }();
  return all;
}

std::string to_label(Department d) {
  return kDepartmentLabels[static_cast<int>(d)];
}

Department parse_department(const std::string& label) {
  const std::string key = canonical_department_key(label);
  for (int i = 0; i < kDepartmentCount; ++i) {
    if (key == canonical_department_key(kDepartmentLabels[i])) {
      return static_cast<Department>(i);
    }
  }
  throw Error("unknown department", label);
}

std::string normalize_skill(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  if (out.empty()) throw Error("empty skill", "nothing left after normalization");
  return out;
}

bool is_valid_email(std::string_view s) {
  auto at = s.find('@');
  if (at == std::string_view::npos || at == 0 || at + 1 == s.size()) {
    return false;
  }
  if (s.find('@', at + 1) != std::string_view::npos) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
}

std::string to_string(ScorerKind kind) {
  return kind == ScorerKind::LLM ? "llm" : "baseline";
}

ScorerKind parse_scorer_kind(const std::string& s) {
  if (s == "llm") return ScorerKind::LLM;
  if (s == "baseline") return ScorerKind::Baseline;
  throw Error("bad scorer kind", s);
}

SimilarityScore SimilarityScore::checked(DocumentId job_id,
                                         DocumentId resume_id, double value,
                                         ScorerKind scorer,
                                         UtcSeconds computed_at) {
  if (!(value >= 0.0 && value <= 100.0)) {
    throw Error("score out of range", std::to_string(value));
  }
  return SimilarityScore{std::move(job_id), std::move(resume_id), value,
                         scorer, computed_at};
}

std::string to_string(AuditOutcome o) {
  switch (o) {
    case AuditOutcome::Ok: return "ok";
    case AuditOutcome::Skipped: return "skipped";
    case AuditOutcome::Error: return "error";
  }
  return "error";
}

AuditOutcome parse_audit_outcome(const std::string& s) {
  if (s == "ok") return AuditOutcome::Ok;
  if (s == "skipped") return AuditOutcome::Skipped;
  if (s == "error") return AuditOutcome::Error;
  throw Error("bad audit outcome", s);
}

void to_json(Json& j, const DocumentId& id) { j = id.value; }

void from_json(const Json& j, DocumentId& id) {
  id.value = j.get<std::string>();
}

void to_json(Json& j, const RawDocument& d) {
  j = Json{{"id", d.id.value},
           {"kind", to_string(d.kind)},
           {"source_path", d.source_path.string()},
           {"text", d.text},
           {"received_at", format_rfc3339(d.received_at)}};
}

void from_json(const Json& j, RawDocument& d) {
  d.id.value = j.at("id").get<std::string>();
  d.kind = parse_doc_kind(j.at("kind").get<std::string>());
  d.source_path = j.at("source_path").get<std::string>();
  d.text = j.at("text").get<std::string>();
  d.received_at = parse_rfc3339(j.at("received_at").get<std::string>());
}

void to_json(Json& j, const JobFeatures& f) {
  j = Json{{"job_id", f.job_id.value},
           {"title", f.title},
           {"required_skills", f.required_skills},
           {"experience_level", f.experience_level},
           {"education", f.education},
           {"preferences", f.preferences},
           {"department", to_label(f.department)}};
  if (f.hr_notify_email) j["hr_notify_email"] = *f.hr_notify_email;
}

void from_json(const Json& j, JobFeatures& f) {
  f.job_id.value = j.at("job_id").get<std::string>();
  f.title = j.at("title").get<std::string>();
  f.required_skills = j.at("required_skills").get<std::set<std::string>>();
  f.experience_level = j.value("experience_level", std::string{});
  f.education = j.value("education", std::string{});
  f.preferences = j.value("preferences", std::vector<std::string>{});
  f.department = parse_department(j.at("department").get<std::string>());
  if (j.contains("hr_notify_email")) {
    f.hr_notify_email = j.at("hr_notify_email").get<std::string>();
  } else {
    f.hr_notify_email.reset();
  }
}

void to_json(Json& j, const ExperienceEntry& e) {
  j = Json{{"role_title", e.role_title}, {"description", e.description}};
  if (e.years) j["years"] = *e.years;
}

void from_json(const Json& j, ExperienceEntry& e) {
  e.role_title = j.at("role_title").get<std::string>();
  e.description = j.value("description", std::string{});
  if (j.contains("years") && !j.at("years").is_null()) {
    e.years = j.at("years").get<double>();
  } else {
    e.years.reset();
  }
}

void to_json(Json& j, const EducationEntry& e) {
  j = Json{{"degree", e.degree}};
  if (e.institution) j["institution"] = *e.institution;
}

void from_json(const Json& j, EducationEntry& e) {
  e.degree = j.at("degree").get<std::string>();
  if (j.contains("institution") && !j.at("institution").is_null()) {
    e.institution = j.at("institution").get<std::string>();
  } else {
    e.institution.reset();
  }
}

void to_json(Json& j, const ResumeFeatures& f) {
  j = Json{{"resume_id", f.resume_id.value},
           {"candidate_name", f.candidate_name}};
  if (f.email) j["email"] = *f.email;
  if (f.phone) j["phone"] = *f.phone;
  j["skills"] = f.skills;
  j["experience"] = f.experience;
  j["education"] = f.education;
  j["predicted_department"] = to_label(f.predicted_department);
}

void from_json(const Json& j, ResumeFeatures& f) {
  f.resume_id.value = j.at("resume_id").get<std::string>();
  f.candidate_name = j.at("candidate_name").get<std::string>();
  if (j.contains("email")) {
    f.email = j.at("email").get<std::string>();
  } else {
    f.email.reset();
  }
  if (j.contains("phone")) {
    f.phone = j.at("phone").get<std::string>();
  } else {
    f.phone.reset();
  }
  f.skills = j.value("skills", std::set<std::string>{});
  f.experience = j.value("experience", std::vector<ExperienceEntry>{});
  f.education = j.value("education", std::vector<EducationEntry>{});
  f.predicted_department =
      parse_department(j.at("predicted_department").get<std::string>());
}

void to_json(Json& j, const SimilarityScore& s) {
  j = Json{{"job_id", s.job_id.value},
           {"resume_id", s.resume_id.value},
           {"value", s.value},
           {"scorer", to_string(s.scorer)},
           {"computed_at", format_rfc3339(s.computed_at)}};
}

void from_json(const Json& j, SimilarityScore& s) {
  s = SimilarityScore::checked(
      DocumentId{j.at("job_id").get<std::string>()},
      DocumentId{j.at("resume_id").get<std::string>()},
      j.at("value").get<double>(),
      parse_scorer_kind(j.at("scorer").get<std::string>()),
      parse_rfc3339(j.at("computed_at").get<std::string>()));
}

void to_json(Json& j, const Ranking& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json::array({e.resume_id.value, e.value}));
  }
  j = Json{{"job_id", r.job_id.value}, {"entries", std::move(entries)}};
}

void from_json(const Json& j, Ranking& r) {
  r.job_id.value = j.at("job_id").get<std::string>();
  r.entries.clear();
  for (const auto& e : j.at("entries")) {
    r.entries.push_back(
        RankEntry{DocumentId{e.at(0).get<std::string>()}, e.at(1).get<double>()});
  }
}

void to_json(Json& j, const SelectedCandidates& s) {
  Json ids = Json::array();
  for (const auto& id : s.selected) ids.push_back(id.value);
  j = Json{{"job_id", s.job_id.value}, {"selected", std::move(ids)}, {"k", s.k}};
}

void from_json(const Json& j, SelectedCandidates& s) {
  s.job_id.value = j.at("job_id").get<std::string>();
  s.selected.clear();
  for (const auto& id : j.at("selected")) {
    s.selected.push_back(DocumentId{id.get<std::string>()});
  }
  s.k = j.at("k").get<int>();
}

void to_json(Json& j, const NotificationMessage& m) {
  j = Json{{"job_id", m.job_id.value}, {"resume_id", m.resume_id.value},
           {"recipient", m.recipient},  {"subject", m.subject},
           {"body", m.body},            {"dry_run", m.dry_run}};
}

void from_json(const Json& j, NotificationMessage& m) {
  m.job_id.value = j.at("job_id").get<std::string>();
  m.resume_id.value = j.at("resume_id").get<std::string>();
  m.recipient = j.at("recipient").get<std::string>();
  m.subject = j.at("subject").get<std::string>();
  m.body = j.at("body").get<std::string>();
  m.dry_run = j.at("dry_run").get<bool>();
}

void to_json(Json& j, const AuditLogEntry& e) {
  j = Json{{"timestamp", format_rfc3339(e.timestamp)},
           {"operation", e.operation},
           {"document_ids", e.document_ids},
           {"outcome", to_string(e.outcome)},
           {"detail", e.detail}};
}

void from_json(const Json& j, AuditLogEntry& e) {
  e.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
  e.operation = j.at("operation").get<std::string>();
  e.document_ids = j.at("document_ids").get<std::vector<std::string>>();
  e.outcome = parse_audit_outcome(j.at("outcome").get<std::string>());
  e.detail = j.at("detail").get<std::string>();
}

}  // namespace mlar
