#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlar/extract.hpp"
#include "mlar/ingest.hpp"
#include "mlar/match.hpp"
#include "mlar/notify.hpp"
#include "mlar/store.hpp"

namespace mlar {

struct PipelineConfig {
  std::filesystem::path store_root = "store";
  std::filesystem::path jobs_dir = "inbox/jobs";
  std::filesystem::path resumes_dir = "inbox/resumes";
  double poll_interval_s = 5.0;
  ExtractorConfig extractor;
  ScorerConfig scorer;
  MailTransportConfig mail;
  int k = 3;
  bool match_all_departments = false;
  bool notify_hr = false;
  std::filesystem::path templates_dir = "templates";

  void validate() const;
  Json to_json() const;
  static PipelineConfig from_json(const Json& j);
  static PipelineConfig load_file(const std::filesystem::path& path);
  void save_file(const std::filesystem::path& path) const;
};

struct NotificationCounts {
  int sent = 0;
  int dry_run = 0;
  int skipped = 0;
  int failed = 0;

  int total() const { return sent + dry_run + skipped + failed; }
};

struct RunReport {
  int jobs_processed = 0;     // jobs matched this pass (new or re-matched)
  int resumes_processed = 0;  // new resumes parsed this pass
  int matches_computed = 0;   // similarity scores computed
  NotificationCounts notifications;
  std::vector<std::string> errors;
  double wall_time_s = 0.0;
  double per_resume_time_s = 0.0;

  Json to_json() const;
};

// Algorithm: watch inboxes, parse new documents, score affected jobs,
// rank, select top k, notify selected candidates once, audit everything.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  RunReport run_once();

  // Polls until `stop` is set; a pass in flight always completes. Returns 0
  // on graceful shutdown, 2 after five consecutive failed passes.
  int run_loop(const std::atomic<bool>& stop);

  Store& store() { return store_; }
  const PipelineConfig& config() const { return config_; }

  // Stage entry points used by run_once and the benchmark harness.
  struct ParsedBatch {
    std::vector<Store::StoredJob> new_jobs;
    std::vector<Store::StoredResume> new_resumes;
    std::vector<std::string> errors;
  };
  struct MatchOutcome {
    struct JobMatch {
      Store::StoredJob job;
      Ranking ranking;
      SelectedCandidates selected;
      std::vector<ResumeFeatures> selected_resumes;  // aligned with selected
    };
    std::vector<JobMatch> matches;
    int jobs_considered = 0;
    int scores_computed = 0;
    std::vector<std::string> errors;
  };

  ParsedBatch ingest_and_parse();
  MatchOutcome match_affected(const ParsedBatch& batch);
  NotificationCounts notify_selected(const MatchOutcome& outcome);

 private:
  void audit(const std::string& operation, std::vector<std::string> ids,
             AuditOutcome outcome, std::string detail);
  bool ledger_contains(const std::string& job_id,
                       const std::string& resume_id) const;
  void ledger_add(const std::string& job_id, const std::string& resume_id,
                  const std::string& status);
  std::vector<Store::StoredResume> candidates_for(const JobFeatures& job) const;

  PipelineConfig config_;
  Store store_;
  Templates templates_;
  InboxState inbox_;
  std::set<std::pair<std::string, std::string>> attempted_;  // ledger cache
};

}  // namespace mlar
