#include "mlar/ingest.hpp"

#include <algorithm>

#include "mlar/pdf.hpp"

namespace mlar {

namespace fs = std::filesystem;

Json InboxState::to_json() const {
  return Json{{"seen", seen}, {"known_paths", known_paths}};
}

InboxState InboxState::from_json(const Json& j) {
  InboxState s;
  s.seen = j.value("seen", std::set<std::string>{});
  s.known_paths = j.value("known_paths", std::map<std::string, std::string>{});
  return s;
}

std::string extract_text(const fs::path& path) {
  std::string ext = to_lower_ascii(path.extension().string());
  std::string bytes = read_file_bytes(path);
  std::string text;
  if (ext == ".pdf") {
    text = extract_pdf_text(bytes);
  } else if (ext == ".txt") {
    text = trim(bytes);
  } else {
    throw Error("unsupported extension", path.string());
  }
  if (text.empty()) throw Error("no text", path.string());
  return text;
}

namespace {

struct Candidate {
  fs::path path;
  DocKind kind;
  fs::file_time_type mtime;
  std::uintmax_t size = 0;
};

void list_directory(const fs::path& dir, DocKind kind,
                    std::vector<Candidate>& out) {
  if (!fs::is_directory(dir)) {
    throw Error("configuration error", "missing directory " + dir.string());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = to_lower_ascii(entry.path().extension().string());
    if (ext != ".pdf" && ext != ".txt") continue;
    out.push_back(Candidate{entry.path(), kind, entry.last_write_time(),
                            entry.file_size()});
  }
}

UtcSeconds mtime_to_utc(fs::file_time_type t) {
  auto sys = std::chrono::file_clock::to_sys(t);
  return std::chrono::time_point_cast<std::chrono::seconds>(sys);
}

AuditLogEntry make_audit(const std::string& op, std::vector<std::string> ids,
                         AuditOutcome outcome, std::string detail) {
  return AuditLogEntry{now_utc(), op, std::move(ids), outcome,
                       std::move(detail)};
}

}  // namespace

std::vector<RawDocument> scan_inbox(InboxState& state, const AuditSink& audit) {
  std::vector<Candidate> candidates;
  list_directory(state.jobs_dir, DocKind::Job, candidates);
  list_directory(state.resumes_dir, DocKind::Resume, candidates);
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.mtime != b.mtime) return a.mtime < b.mtime;
              return a.path.string() < b.path.string();
            });

  std::vector<RawDocument> out;
  for (const Candidate& c : candidates) {
    const std::string path_key = c.path.string();
    if (state.known_paths.count(path_key)) continue;

    // Size-stability handshake: first sighting records the size, a matching
    // second sighting proceeds.
    auto pending = state.pending_sizes.find(path_key);
    if (pending == state.pending_sizes.end() || pending->second != c.size) {
      state.pending_sizes[path_key] = c.size;
      continue;
    }

    std::string bytes;
    try {
      bytes = read_file_bytes(c.path);
    } catch (const Error& e) {
      audit(make_audit("ingest", {path_key}, AuditOutcome::Skipped, e.what()));
      state.known_paths[path_key] = "";
      state.pending_sizes.erase(path_key);
      continue;
    }

    DocumentId id = DocumentId::of_bytes(bytes);
    state.pending_sizes.erase(path_key);
    if (state.seen.count(id.value)) {
      audit(make_audit("ingest", {id.value}, AuditOutcome::Skipped,
                       "duplicate content: " + path_key));
      state.known_paths[path_key] = id.value;
      continue;
    }

    std::string text;
    try {
      text = extract_text(c.path);
    } catch (const Error& e) {
      // Invalid inputs never propagate past ingestion and are not retried.
      audit(make_audit("ingest", {id.value}, AuditOutcome::Skipped,
                       std::string(e.what()) + ": " + path_key));
      state.seen.insert(id.value);
      state.known_paths[path_key] = id.value;
      continue;
    }

    state.seen.insert(id.value);
    state.known_paths[path_key] = id.value;
    audit(make_audit("ingest", {id.value}, AuditOutcome::Ok, path_key));
    out.push_back(RawDocument{std::move(id), c.kind, c.path, std::move(text),
                              mtime_to_utc(c.mtime)});
  }
  return out;
}

std::vector<RawDocument> collect_new_documents(InboxState& state,
                                               const AuditSink& audit) {
  std::vector<RawDocument> docs = scan_inbox(state, audit);
  std::vector<RawDocument> second = scan_inbox(state, audit);
  docs.insert(docs.end(), std::make_move_iterator(second.begin()),
              std::make_move_iterator(second.end()));
  std::sort(docs.begin(), docs.end(),
            [](const RawDocument& a, const RawDocument& b) {
              if (a.received_at != b.received_at) {
                return a.received_at < b.received_at;
              }
              return a.source_path.string() < b.source_path.string();
            });
  return docs;
}

}  // namespace mlar
