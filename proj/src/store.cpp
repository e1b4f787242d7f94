#include "mlar/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>

namespace mlar {

namespace fs = std::filesystem;

namespace {

constexpr int kJsonIndent = 2;

std::string dump_canonical(const Json& record) {
  return record.dump(kJsonIndent) + "\n";
}

bool is_current_document(const fs::path& p) {
  return p.extension() == ".json";  // excludes .tmp* and .v<n> files
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "jobs");
  for (Department d : all_departments()) {
    fs::create_directories(root_ / "resumes" / to_label(d));
  }
  fs::create_directories(root_ / "matches");
  fs::create_directories(root_ / "ledger");
  fs::create_directories(root_ / "audit");
  fs::create_directories(root_ / "inbox_state");
}

std::mutex& Store::collection_mutex(const std::string& collection) const {
  std::lock_guard lock(registry_mutex_);
  auto& slot = mutexes_[collection];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Store::write_atomic(const fs::path& path,
                         const std::string& content) const {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io failure", "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("io failure", "short write to " + tmp.string());
  }
  int fd = ::open(tmp.c_str(), O_RDONLY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("io failure", "rename to " + path.string() + " failed");
  }
}

void Store::put(const std::string& collection, const std::string& id,
                const Json& record) {
  if (id.empty()) throw Error("io failure", "empty document id");
  std::lock_guard lock(collection_mutex(collection));
  fs::path dir = root_ / collection;
  fs::create_directories(dir);
  fs::path file = dir / (id + ".json");
  const std::string content = dump_canonical(record);
  if (fs::exists(file)) {
    std::string existing = read_file_bytes(file);
    if (existing == content) return;  // idempotent write
    int version = 1;
    while (fs::exists(file.string() + ".v" + std::to_string(version))) {
      ++version;
    }
    fs::rename(file, file.string() + ".v" + std::to_string(version));
  }
  write_atomic(file, content);
}

std::optional<Json> Store::get(const std::string& collection,
                               const std::string& id) const {
  fs::path file = root_ / collection / (id + ".json");
  if (!fs::exists(file)) return std::nullopt;
  return Json::parse(read_file_bytes(file));
}

std::vector<Json> Store::list(const std::string& collection) const {
  fs::path dir = root_ / collection;
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_current_document(entry.path())) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Json> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(Json::parse(read_file_bytes(f)));
  return out;
}

namespace {

// Stored feature documents carry the canonical record plus one extra
// top-level key, received_at, which the ranking tie-break needs across
// restarts.
template <typename Features>
Json with_received_at(const Features& features, UtcSeconds received_at) {
  Json j = features;
  j["received_at"] = format_rfc3339(received_at);
  return j;
}

}  // namespace

void Store::put_job(const JobFeatures& job, UtcSeconds received_at) {
  put("jobs", job.job_id.value, with_received_at(job, received_at));
}

void Store::put_resume(const ResumeFeatures& resume, UtcSeconds received_at) {
  put("resumes/" + to_label(resume.predicted_department),
      resume.resume_id.value, with_received_at(resume, received_at));
}

std::vector<Store::StoredJob> Store::all_jobs() const {
  std::vector<StoredJob> out;
  for (const Json& j : list("jobs")) {
    StoredJob job;
    job.features = j.get<JobFeatures>();
    job.received_at = parse_rfc3339(j.value("received_at", "1970-01-01T00:00:00Z"));
    out.push_back(std::move(job));
  }
  return out;
}

std::optional<Store::StoredJob> Store::get_job(const DocumentId& id) const {
  std::optional<Json> j = get("jobs", id.value);
  if (!j) return std::nullopt;
  StoredJob job;
  job.features = j->get<JobFeatures>();
  job.received_at = parse_rfc3339(j->value("received_at", "1970-01-01T00:00:00Z"));
  return job;
}

std::vector<Store::StoredResume> Store::resumes_by_department(
    Department d) const {
  std::vector<StoredResume> out;
  for (const Json& j : list("resumes/" + to_label(d))) {
    StoredResume r;
    r.features = j.get<ResumeFeatures>();
    r.received_at = parse_rfc3339(j.value("received_at", "1970-01-01T00:00:00Z"));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Store::StoredResume> Store::all_resumes() const {
  std::vector<StoredResume> out;
  for (Department d : all_departments()) {
    auto chunk = resumes_by_department(d);
    out.insert(out.end(), std::make_move_iterator(chunk.begin()),
               std::make_move_iterator(chunk.end()));
  }
  return out;
}

std::vector<ResumeFeatures> Store::query_resumes_by_department(
    Department d) const {
  std::vector<ResumeFeatures> out;
  for (auto& stored : resumes_by_department(d)) {
    out.push_back(std::move(stored.features));
  }
  return out;
}

void Store::put_match(const DocumentId& job_id, const Ranking& ranking,
                      const SelectedCandidates& selected) {
  Json record{{"job_id", job_id.value}};
  Json entries = Json::array();
  for (const auto& e : ranking.entries) {
    entries.push_back(Json::array({e.resume_id.value, e.value}));
  }
  record["ranking"] = std::move(entries);
  Json chosen = Json::array();
  for (const auto& id : selected.selected) chosen.push_back(id.value);
  record["selected"] = std::move(chosen);
  record["k"] = selected.k;
  put("matches", job_id.value, record);
}

void Store::append_line(const std::string& collection, const fs::path& path,
                        const Json& record) {
  std::lock_guard lock(collection_mutex(collection));
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("io failure", "cannot open " + path.string());
  out << record.dump() << "\n";
  out.flush();
  if (!out) throw Error("io failure", "short append to " + path.string());
}

void Store::append_audit(const AuditLogEntry& entry) {
  append_line("audit", root_ / "audit" / "audit.jsonl", entry);
}

std::vector<AuditLogEntry> Store::read_audit() const {
  std::vector<AuditLogEntry> out;
  fs::path file = root_ / "audit" / "audit.jsonl";
  if (!fs::exists(file)) return out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(Json::parse(line).get<AuditLogEntry>());
  }
  return out;
}

void Store::append_ledger(const LedgerEntry& entry) {
  Json j{{"job_id", entry.job_id},
         {"resume_id", entry.resume_id},
         {"status", entry.status},
         {"at", format_rfc3339(entry.at)}};
  append_line("ledger", root_ / "ledger" / "ledger.jsonl", j);
}

std::vector<Store::LedgerEntry> Store::read_ledger() const {
  std::vector<LedgerEntry> out;
  fs::path file = root_ / "ledger" / "ledger.jsonl";
  if (!fs::exists(file)) return out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    Json j = Json::parse(line);
    out.push_back(LedgerEntry{j.at("job_id").get<std::string>(),
                              j.at("resume_id").get<std::string>(),
                              j.at("status").get<std::string>(),
                              parse_rfc3339(j.at("at").get<std::string>())});
  }
  return out;
}

void Store::append_outbox(const NotificationMessage& message) {
  append_line("outbox", outbox_path(), message);
}

void Store::save_inbox_state(const InboxState& state) {
  put("inbox_state", "state", state.to_json());
}

void Store::load_inbox_state(InboxState& state) const {
  std::optional<Json> j = get("inbox_state", "state");
  if (!j) return;
  InboxState loaded = InboxState::from_json(*j);
  state.seen = std::move(loaded.seen);
  state.known_paths = std::move(loaded.known_paths);
}

}  // namespace mlar
