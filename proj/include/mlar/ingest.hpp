#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlar/domain.hpp"

namespace mlar {

using AuditSink = std::function<void(const AuditLogEntry&)>;

struct InboxState {
  std::set<std::string> seen;                       // DocumentId values
  std::map<std::string, std::string> known_paths;   // path -> DocumentId
  std::filesystem::path jobs_dir;
  std::filesystem::path resumes_dir;
  double poll_interval_s = 5.0;

  // Sizes observed on the previous poll; a file is ingested only once its
  // size matches across two consecutive polls. Not persisted.
  std::map<std::string, std::uintmax_t> pending_sizes;

  Json to_json() const;
  static InboxState from_json(const Json& j);
};

// .txt: decoded content; .pdf: text layer, pages joined with form feeds.
// Result is trimmed; empty results throw Error("no text").
std::string extract_text(const std::filesystem::path& path);

// One poll. Returns the new, size-stable documents in (mtime, path) order;
// defers files seen for the first time this poll, skips duplicates and
// invalid inputs (auditing them Skipped) and never returns a document twice.
std::vector<RawDocument> scan_inbox(InboxState& state, const AuditSink& audit);

// Two consecutive polls, completing the size-stability handshake within one
// pipeline pass.
std::vector<RawDocument> collect_new_documents(InboxState& state,
                                               const AuditSink& audit);

}  // namespace mlar
