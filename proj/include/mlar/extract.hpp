#pragma once

#include <filesystem>
#include <string>

#include "mlar/domain.hpp"

namespace mlar {

enum class ExtractorKind { Remote, Rules };

std::string to_string(ExtractorKind kind);
ExtractorKind parse_extractor_kind(const std::string& s);

enum class SchemaKind { JobSchema, ResumeSchema };

struct ExtractorConfig {
  ExtractorKind provider = ExtractorKind::Rules;
  std::string endpoint_url;  // Remote only
  std::string api_key_env_var = "MLAR_API_KEY";
  int max_retries = 2;
  double timeout_s = 30.0;
  int max_concurrent_requests = 4;

  void validate() const;
  Json to_json() const;
  static ExtractorConfig from_json(const Json& j);
};

// Prompt and message templates are files in the repo, loaded once.
// Placeholders use {{name}} syntax.
struct Templates {
  std::string job_prompt;
  std::string resume_prompt;
  std::string score_prompt;
  std::string notification_body;

  static Templates load(const std::filesystem::path& dir);
};

std::string render_template(std::string text,
                            const std::vector<std::pair<std::string,
                                                        std::string>>& vars);

struct ExtractionRequest {
  RawDocument document;
  SchemaKind schema = SchemaKind::ResumeSchema;
  std::string prompt;  // embeds the document text and the field list
};

ExtractionRequest make_extraction_request(const RawDocument& document,
                                          SchemaKind schema,
                                          const Templates& templates);

// Strips anything before the first top-level JSON object (code fences,
// prose) and anything after it, then parses. No other repair.
Json repair_json(const std::string& text);

// Deterministic line-oriented extractor: `Label: value` lines with
// case-insensitive labels {Title, Name, Email, Phone, Department, Skills,
// Experience, Education, Preferences}; unknown labels are ignored.
Json rules_extract(const RawDocument& document, SchemaKind schema);

// HTTP adapter for a remote model: POST {"prompt": ...} -> {"text": ...},
// bearer auth from the configured environment variable, retries with
// 1s/2s/4s backoff on transport errors, 5xx and invalid JSON.
class LlmClient {
 public:
  explicit LlmClient(ExtractorConfig config);

  std::string complete(const std::string& prompt) const;
  Json extract(const ExtractionRequest& request) const;

 private:
  ExtractorConfig config_;
};

// Schema validation applied after any extractor.
JobFeatures validate_job(const Json& raw, const DocumentId& id);
ResumeFeatures validate_resume(const Json& raw, const DocumentId& id);

JobFeatures parse_job(const RawDocument& document,
                      const ExtractorConfig& extractor,
                      const Templates& templates);
ResumeFeatures parse_resume(const RawDocument& document,
                            const ExtractorConfig& extractor,
                            const Templates& templates);

}  // namespace mlar
