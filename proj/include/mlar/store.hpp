#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mlar/domain.hpp"
#include "mlar/ingest.hpp"

namespace mlar {

// File-backed document store. Layout under the root:
//   jobs/<id>.json                    parsed job features (+ received_at)
//   resumes/<Department>/<id>.json    parsed resume features (+ received_at)
//   matches/<job_id>.json             ranking + selection per job
//   ledger/ledger.jsonl               notification attempts (at-most-once)
//   audit/audit.jsonl                 append-only operation log
//   inbox_state/state.json            persisted seen-set
//   outbox.jsonl                      dry-run mail outbox
// All writes are write-temp-then-rename; conflicting overwrites keep the
// previous version as <id>.json.v<n>.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path outbox_path() const { return root_ / "outbox.jsonl"; }

  void put(const std::string& collection, const std::string& id,
           const Json& record);
  std::optional<Json> get(const std::string& collection,
                          const std::string& id) const;
  // All current documents of a collection, sorted by id.
  std::vector<Json> list(const std::string& collection) const;

  struct StoredJob {
    JobFeatures features;
    UtcSeconds received_at{};
  };
  struct StoredResume {
    ResumeFeatures features;
    UtcSeconds received_at{};
  };

  void put_job(const JobFeatures& job, UtcSeconds received_at);
  void put_resume(const ResumeFeatures& resume, UtcSeconds received_at);
  std::vector<StoredJob> all_jobs() const;
  std::optional<StoredJob> get_job(const DocumentId& id) const;
  std::vector<StoredResume> resumes_by_department(Department d) const;
  std::vector<StoredResume> all_resumes() const;
  std::vector<ResumeFeatures> query_resumes_by_department(Department d) const;

  void put_match(const DocumentId& job_id, const Ranking& ranking,
                 const SelectedCandidates& selected);

  void append_audit(const AuditLogEntry& entry);
  std::vector<AuditLogEntry> read_audit() const;

  struct LedgerEntry {
    std::string job_id;
    std::string resume_id;  // empty for HR notifications
    std::string status;     // attempted | failed | skipped
    UtcSeconds at{};
  };
  void append_ledger(const LedgerEntry& entry);
  std::vector<LedgerEntry> read_ledger() const;

  void append_outbox(const NotificationMessage& message);

  void save_inbox_state(const InboxState& state);
  void load_inbox_state(InboxState& state) const;

 private:
  std::mutex& collection_mutex(const std::string& collection) const;
  void write_atomic(const std::filesystem::path& path,
                    const std::string& content) const;
  void append_line(const std::string& collection,
                   const std::filesystem::path& path, const Json& record);

  std::filesystem::path root_;
  mutable std::mutex registry_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> mutexes_;
};

}  // namespace mlar
