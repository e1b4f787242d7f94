#include "mlar/extract.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <thread>

#include "httplib.h"

namespace mlar {

std::string to_string(ExtractorKind kind) {
  return kind == ExtractorKind::Remote ? "remote" : "rules";
}

ExtractorKind parse_extractor_kind(const std::string& s) {
  if (s == "remote") return ExtractorKind::Remote;
  if (s == "rules") return ExtractorKind::Rules;
  throw Error("bad extractor kind", s);
}

void ExtractorConfig::validate() const {
  if (provider == ExtractorKind::Remote) {
    if (endpoint_url.empty()) {
      throw Error("configuration error", "remote extractor needs endpoint_url");
    }
    if (api_key_env_var.empty()) {
      throw Error("configuration error",
                  "remote extractor needs api_key_env_var");
    }
  }
  if (max_retries < 0) {
    throw Error("configuration error", "max_retries must be >= 0");
  }
  if (timeout_s <= 0) {
    throw Error("configuration error", "timeout must be positive");
  }
  if (max_concurrent_requests < 1) {
    throw Error("configuration error", "max_concurrent_requests must be >= 1");
  }
}

Json ExtractorConfig::to_json() const {
  return Json{{"provider", to_string(provider)},
              {"endpoint_url", endpoint_url},
              {"api_key_env_var", api_key_env_var},
              {"max_retries", max_retries},
              {"timeout_s", timeout_s},
              {"max_concurrent_requests", max_concurrent_requests}};
}

ExtractorConfig ExtractorConfig::from_json(const Json& j) {
  ExtractorConfig c;
  c.provider = parse_extractor_kind(j.value("provider", "rules"));
  c.endpoint_url = j.value("endpoint_url", std::string{});
  c.api_key_env_var = j.value("api_key_env_var", std::string{"MLAR_API_KEY"});
  c.max_retries = j.value("max_retries", 2);
  c.timeout_s = j.value("timeout_s", 30.0);
  c.max_concurrent_requests = j.value("max_concurrent_requests", 4);
  return c;
}

namespace {

std::string load_template_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error("configuration error", "missing template " + path.string());
  }
  return read_file_bytes(path);
}

}  // namespace

Templates Templates::load(const std::filesystem::path& dir) {
  Templates t;
  t.job_prompt = load_template_file(dir / "job_extract.prompt");
  t.resume_prompt = load_template_file(dir / "resume_extract.prompt");
  t.score_prompt = load_template_file(dir / "score.prompt");
  t.notification_body = load_template_file(dir / "notification_body.txt");
  return t;
}

std::string render_template(
    std::string text,
    const std::vector<std::pair<std::string, std::string>>& vars) {
  for (const auto& [name, value] : vars) {
    const std::string placeholder = "{{" + name + "}}";
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
      text.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return text;
}

ExtractionRequest make_extraction_request(const RawDocument& document,
                                          SchemaKind schema,
                                          const Templates& templates) {
  std::string labels;
  for (Department d : all_departments()) {
    if (!labels.empty()) labels += ", ";
    labels += to_label(d);
  }
  const std::string& tpl = schema == SchemaKind::JobSchema
                               ? templates.job_prompt
                               : templates.resume_prompt;
  ExtractionRequest req;
  req.document = document;
  req.schema = schema;
  req.prompt = render_template(
      tpl, {{"document_text", document.text}, {"departments", labels}});
  return req;
}

Json repair_json(const std::string& text) {
  std::size_t start = text.find('{');
  if (start == std::string::npos) {
    throw Error("unrepairable output", "no JSON object found");
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        try {
          return Json::parse(text.substr(start, i - start + 1));
        } catch (const Json::parse_error& e) {
          throw Error("unrepairable output", e.what());
        }
      }
    }
  }
  throw Error("unrepairable output", "unbalanced JSON object");
}

namespace {

const std::set<std::string> kKnownLabels = {
    "title",      "name",      "email",     "phone",      "department",
    "skills",     "experience", "education", "preferences"};

struct ParsedLines {
  std::map<std::string, std::string> scalars;           // last wins
  std::map<std::string, std::vector<std::string>> lists;  // accumulate
};

ParsedLines parse_labeled_lines(const std::string& text) {
  ParsedLines out;
  for (const std::string& line : split_lines(text)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string label = to_lower_ascii(trim(line.substr(0, colon)));
    if (!kKnownLabels.count(label)) continue;
    std::string value = trim(line.substr(colon + 1));
    if (value.empty()) continue;
    if (label == "skills" || label == "preferences" ||
        label == "experience" || label == "education") {
      out.lists[label].push_back(value);
    } else {
      out.scalars[label] = value;
    }
  }
  return out;
}

Json experience_entry_from_line(const std::string& value) {
  // "role | years | description"; years and description optional.
  std::vector<std::string> parts = split_trimmed(value, '|');
  Json entry{{"role_title", parts.empty() ? value : parts[0]},
             {"description", parts.size() > 2 ? parts[2] : ""}};
  if (parts.size() > 1) {
    char* end = nullptr;
    double years = std::strtod(parts[1].c_str(), &end);
    if (end && *end == '\0' && end != parts[1].c_str()) {
      entry["years"] = years;
    }
  }
  return entry;
}

Json education_entry_from_line(const std::string& value) {
  std::vector<std::string> parts = split_trimmed(value, '|');
  Json entry{{"degree", parts.empty() ? value : parts[0]}};
  if (parts.size() > 1) entry["institution"] = parts[1];
  return entry;
}

}  // namespace

Json rules_extract(const RawDocument& document, SchemaKind schema) {
  ParsedLines lines = parse_labeled_lines(document.text);
  auto scalar = [&](const char* label) -> std::optional<std::string> {
    auto it = lines.scalars.find(label);
    if (it == lines.scalars.end()) return std::nullopt;
    return it->second;
  };
  auto list_values = [&](const char* label) {
    auto it = lines.lists.find(label);
    return it == lines.lists.end() ? std::vector<std::string>{} : it->second;
  };
  auto comma_list = [&](const char* label) {
    std::vector<std::string> out;
    for (const std::string& line : list_values(label)) {
      for (std::string& piece : split_trimmed(line, ',')) {
        out.push_back(std::move(piece));
      }
    }
    return out;
  };

  std::vector<std::string> missing;
  if (schema == SchemaKind::JobSchema) {
    if (!scalar("title")) missing.push_back("Title");
    if (!scalar("department")) missing.push_back("Department");
  } else {
    if (!scalar("name")) missing.push_back("Name");
    if (!scalar("department")) missing.push_back("Department");
  }
  if (!missing.empty()) {
    std::string what = "missing labels:";
    for (const auto& m : missing) what += " " + m;
    throw Error("extraction invalid", what + " in " +
                                          document.source_path.string());
  }

  if (schema == SchemaKind::JobSchema) {
    Json raw{{"title", *scalar("title")},
             {"required_skills", comma_list("skills")},
             {"department", *scalar("department")}};
    // Job Experience/Education lines are free-form level descriptions.
    auto experience = list_values("experience");
    raw["experience_level"] = experience.empty() ? "" : experience.front();
    auto education = list_values("education");
    raw["education"] = education.empty() ? "" : education.front();
    raw["preferences"] = comma_list("preferences");
    if (auto email = scalar("email")) raw["hr_notify_email"] = *email;
    return raw;
  }

  Json raw{{"candidate_name", *scalar("name")},
           {"predicted_department", *scalar("department")},
           {"skills", comma_list("skills")}};
  if (auto email = scalar("email")) raw["email"] = *email;
  if (auto phone = scalar("phone")) raw["phone"] = *phone;
  Json experience = Json::array();
  for (const std::string& line : list_values("experience")) {
    experience.push_back(experience_entry_from_line(line));
  }
  raw["experience"] = std::move(experience);
  Json education = Json::array();
  for (const std::string& line : list_values("education")) {
    education.push_back(education_entry_from_line(line));
  }
  raw["education"] = std::move(education);
  return raw;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("configuration error", "endpoint_url must be a full URL");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool status_is_retryable(int status) { return status >= 500; }

}  // namespace

LlmClient::LlmClient(ExtractorConfig config) : config_(std::move(config)) {
  config_.validate();
}

namespace {

struct AttemptResult {
  bool ok = false;
  bool retryable = false;
  std::string text;   // response text on success
  std::string error;  // failure detail otherwise
};

AttemptResult post_once(const ExtractorConfig& config,
                        const std::string& prompt) {
  ParsedUrl url = split_url(config.endpoint_url);
  httplib::Client client(url.base);
  auto timeout = std::chrono::duration<double>(config.timeout_s);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env_var.c_str());
      key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  Json body{{"prompt", prompt}};
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    return {false, true, "", "transport: " + httplib::to_string(res.error())};
  }
  if (res->status >= 200 && res->status < 300) {
    try {
      Json parsed = Json::parse(res->body);
      return {true, false, parsed.at("text").get<std::string>(), ""};
    } catch (const std::exception& e) {
      return {false, true, "", std::string("invalid response JSON: ") + e.what()};
    }
  }
  return {false, status_is_retryable(res->status), "",
          "HTTP " + std::to_string(res->status)};
}

void backoff_sleep(int attempt) {
  // fixed schedule: 1 s, 2 s, then a 4 s cap
  int slot = std::min(attempt - 1, 2);
  std::this_thread::sleep_for(std::chrono::seconds(1 << slot));
}

}  // namespace

std::string LlmClient::complete(const std::string& prompt) const {
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) backoff_sleep(attempt);
    AttemptResult r = post_once(config_, prompt);
    if (r.ok) return r.text;
    if (!r.retryable) {
      throw Error("extractor failure", r.error + " (non-retryable)");
    }
    last_error = r.error;
  }
  throw Error("extractor failure", "retries exhausted: " + last_error);
}

Json LlmClient::extract(const ExtractionRequest& request) const {
  // One request budget covers transport failures and unparseable output,
  // so a document never blocks longer than timeout * (max_retries + 1).
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) backoff_sleep(attempt);
    AttemptResult r = post_once(config_, request.prompt);
    if (!r.ok) {
      if (!r.retryable) {
        throw Error("extractor failure", r.error + " (non-retryable)");
      }
      last_error = r.error;
      continue;
    }
    try {
      return repair_json(r.text);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error("extractor failure", "retries exhausted: " + last_error);
}

namespace {

std::set<std::string> normalized_skills(const Json& raw, const char* field,
                                        const std::string& context) {
  std::set<std::string> out;
  for (const auto& item : raw.value(field, Json::array())) {
    if (!item.is_string()) {
      throw Error("extraction invalid", context + ": non-string skill");
    }
    try {
      out.insert(normalize_skill(item.get<std::string>()));
    } catch (const Error& e) {
      throw Error("extraction invalid", context + ": " + e.what());
    }
  }
  return out;
}

[[noreturn]] void invalid(const std::string& context, const std::string& why,
                          const Json& raw) {
  // carries raw extractor output for the audit log
  throw Error("extraction invalid", context + ": " + why + "; raw=" +
                                        raw.dump());
}

}  // namespace

JobFeatures validate_job(const Json& raw, const DocumentId& id) {
  const std::string context = "job " + id.value.substr(0, 12);
  JobFeatures f;
  f.job_id = id;
  f.title = trim(raw.value("title", std::string{}));
  if (f.title.empty()) invalid(context, "missing title", raw);
  f.required_skills = normalized_skills(raw, "required_skills", context);
  f.experience_level = trim(raw.value("experience_level", std::string{}));
  f.education = trim(raw.value("education", std::string{}));
  for (const auto& p : raw.value("preferences", Json::array())) {
    if (!p.is_string()) invalid(context, "non-string preference", raw);
    std::string pref = trim(p.get<std::string>());
    if (!pref.empty()) f.preferences.push_back(std::move(pref));
  }
  if (!raw.contains("department") || !raw.at("department").is_string()) {
    invalid(context, "missing department", raw);
  }
  try {
    f.department = parse_department(raw.at("department").get<std::string>());
  } catch (const Error& e) {
    invalid(context, e.what(), raw);
  }
  if (raw.contains("hr_notify_email") && !raw.at("hr_notify_email").is_null()) {
    std::string email = trim(raw.at("hr_notify_email").get<std::string>());
    if (!is_valid_email(email)) invalid(context, "bad hr_notify_email", raw);
    f.hr_notify_email = std::move(email);
  }
  return f;
}

ResumeFeatures validate_resume(const Json& raw, const DocumentId& id) {
  const std::string context = "resume " + id.value.substr(0, 12);
  ResumeFeatures f;
  f.resume_id = id;
  f.candidate_name = trim(raw.value("candidate_name", std::string{}));
  if (f.candidate_name.empty()) invalid(context, "missing candidate_name", raw);
  if (raw.contains("email") && !raw.at("email").is_null()) {
    std::string email = trim(raw.at("email").get<std::string>());
    if (!is_valid_email(email)) invalid(context, "bad email", raw);
    f.email = std::move(email);
  }
  if (raw.contains("phone") && !raw.at("phone").is_null()) {
    std::string phone = trim(raw.at("phone").get<std::string>());
    if (!phone.empty()) f.phone = std::move(phone);
  }
  f.skills = normalized_skills(raw, "skills", context);
  for (const auto& e : raw.value("experience", Json::array())) {
    ExperienceEntry entry;
    entry.role_title = trim(e.value("role_title", std::string{}));
    if (entry.role_title.empty()) invalid(context, "experience without role_title", raw);
    entry.description = trim(e.value("description", std::string{}));
    if (e.contains("years") && !e.at("years").is_null()) {
      double years = e.at("years").get<double>();
      if (years < 0) invalid(context, "negative years", raw);
      entry.years = years;
    }
    f.experience.push_back(std::move(entry));
  }
  for (const auto& e : raw.value("education", Json::array())) {
    EducationEntry entry;
    entry.degree = trim(e.value("degree", std::string{}));
    if (entry.degree.empty()) invalid(context, "education without degree", raw);
    if (e.contains("institution") && !e.at("institution").is_null()) {
      entry.institution = trim(e.at("institution").get<std::string>());
    }
    f.education.push_back(std::move(entry));
  }
  if (!raw.contains("predicted_department") ||
      !raw.at("predicted_department").is_string()) {
    invalid(context, "missing predicted_department", raw);
  }
  try {
    f.predicted_department =
        parse_department(raw.at("predicted_department").get<std::string>());
  } catch (const Error& e) {
    invalid(context, e.what(), raw);
  }
  return f;
}

namespace {

Json run_extractor(const RawDocument& document, SchemaKind schema,
                   const ExtractorConfig& extractor,
                   const Templates& templates) {
  if (extractor.provider == ExtractorKind::Rules) {
    return rules_extract(document, schema);
  }
  LlmClient client(extractor);
  return client.extract(make_extraction_request(document, schema, templates));
}

}  // namespace

JobFeatures parse_job(const RawDocument& document,
                      const ExtractorConfig& extractor,
                      const Templates& templates) {
  if (document.kind != DocKind::Job) {
    throw Error("extraction invalid", "document is not a job posting");
  }
  Json raw = run_extractor(document, SchemaKind::JobSchema, extractor,
                           templates);
  return validate_job(raw, document.id);
}

ResumeFeatures parse_resume(const RawDocument& document,
                            const ExtractorConfig& extractor,
                            const Templates& templates) {
  if (document.kind != DocKind::Resume) {
    throw Error("extraction invalid", "document is not a resume");
  }
  Json raw = run_extractor(document, SchemaKind::ResumeSchema, extractor,
                           templates);
  return validate_resume(raw, document.id);
}

}  // namespace mlar
