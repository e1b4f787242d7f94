#include <fstream>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "mlar/corpus.hpp"
#include "mlar/pipeline.hpp"

using namespace mlar;

namespace {

PipelineConfig workspace_config(const testing::TempDir& dir) {
  PipelineConfig config;
  config.store_root = dir / "store";
  config.jobs_dir = dir / "inbox" / "jobs";
  config.resumes_dir = dir / "inbox" / "resumes";
  config.templates_dir = testing::templates_dir();
  config.mail.outbox_path = dir / "store" / "outbox.jsonl";
  config.poll_interval_s = 0.05;
  std::filesystem::create_directories(config.jobs_dir);
  std::filesystem::create_directories(config.resumes_dir);
  return config;
}

void drop(const std::filesystem::path& path, const std::string& content,
          int mtime_offset = 0) {
  write_file_bytes(path, content);
  auto base = std::chrono::sys_seconds{std::chrono::seconds{1704067200}};
  std::filesystem::last_write_time(
      path, std::chrono::file_clock::from_sys(
                base + std::chrono::seconds{mtime_offset}));
}

int outbox_lines(const PipelineConfig& config) {
  std::ifstream in(config.mail.outbox_path);
  if (!in) return 0;
  int n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) ++n;
  }
  return n;
}

std::string resume_text(const std::string& name, const std::string& email,
                        const std::string& skills,
                        const std::string& role = "") {
  std::string text = "Name: " + name + "\nDepartment: Engineering\n";
  if (!email.empty()) text += "Email: " + email + "\n";
  text += "Skills: " + skills + "\n";
  if (!role.empty()) text += "Experience: " + role + "\n";
  return text;
}

}  // namespace

TEST_CASE("a pass over empty inboxes reports all zeros") {
  testing::TempDir dir;
  Pipeline pipeline(workspace_config(dir));
  RunReport report = pipeline.run_once();
  CHECK(report.jobs_processed == 0);
  CHECK(report.resumes_processed == 0);
  CHECK(report.matches_computed == 0);
  CHECK(report.notifications.total() == 0);
  CHECK(report.errors.empty());
}

TEST_CASE("one job and five resumes give one ranking and three messages") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: Platform Engineer\nDepartment: Engineering\nSkills: sql, spark\n",
       0);
  for (int i = 0; i < 5; ++i) {
    drop(config.resumes_dir / ("r" + std::to_string(i) + ".txt"),
         resume_text("Person " + std::to_string(i),
                     "p" + std::to_string(i) + "@example.com",
                     i % 2 ? "sql, spark" : "sql"),
         i + 1);
  }

  Pipeline pipeline(config);
  RunReport report = pipeline.run_once();
  CHECK(report.jobs_processed == 1);
  CHECK(report.resumes_processed == 5);
  CHECK(report.matches_computed == 5);
  CHECK(report.notifications.dry_run == 3);
  CHECK(report.notifications.total() == 3);
  CHECK(outbox_lines(config) == 3);
  CHECK(pipeline.store().list("matches").size() == 1);

  Json match = pipeline.store().list("matches")[0];
  CHECK(match["ranking"].size() == 5);
  CHECK(match["selected"].size() == 3);
}

TEST_CASE("per-document failures never stall the pass") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Engineering\nSkills: sql\n", 0);
  drop(config.resumes_dir / "bad.txt", "no labels at all here", 1);
  drop(config.resumes_dir / "good.txt",
       resume_text("Good", "good@example.com", "sql"), 2);

  Pipeline pipeline(config);
  RunReport report = pipeline.run_once();
  CHECK(report.resumes_processed == 1);
  CHECK(report.errors.size() == 1);
  CHECK(report.notifications.dry_run == 1);

  bool saw_parse_error = false;
  for (const auto& e : pipeline.store().read_audit()) {
    if (e.operation == "parse" && e.outcome == AuditOutcome::Error) {
      saw_parse_error = true;
    }
  }
  CHECK(saw_parse_error);
}

TEST_CASE("candidates without email are skipped and not refilled") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: Platform Engineer\nDepartment: Engineering\n"
       "Skills: sql, spark, python\n",
       0);
  // the strongest candidate has no email; four weaker ones do
  drop(config.resumes_dir / "best.txt",
       resume_text("Best", "", "sql, spark, python", "Platform Engineer"), 1);
  for (int i = 0; i < 4; ++i) {
    drop(config.resumes_dir / ("r" + std::to_string(i) + ".txt"),
         resume_text("Person " + std::to_string(i),
                     "p" + std::to_string(i) + "@example.com", "sql"),
         i + 2);
  }

  Pipeline pipeline(config);
  RunReport report = pipeline.run_once();
  CHECK(report.notifications.skipped == 1);
  CHECK(report.notifications.dry_run == 2);  // the slot is not refilled
  CHECK(outbox_lines(config) == 2);
}

TEST_CASE("reruns on unchanged inputs are no-ops with one audit entry") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Sales\nSkills: closing\n", 0);
  drop(config.resumes_dir / "r.txt",
       "Name: R\nDepartment: Sales\nEmail: r@example.com\nSkills: closing\n",
       1);

  Pipeline pipeline(config);
  pipeline.run_once();
  int outbox_before = outbox_lines(config);
  std::size_t audit_before = pipeline.store().read_audit().size();

  RunReport second = pipeline.run_once();
  CHECK(second.jobs_processed == 0);
  CHECK(second.resumes_processed == 0);
  CHECK(second.notifications.total() == 0);
  CHECK(outbox_lines(config) == outbox_before);
  CHECK(pipeline.store().read_audit().size() == audit_before + 1);  // pass entry
}

TEST_CASE("notifications stay at-most-once across restarts") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Sales\nSkills: closing\n", 0);
  drop(config.resumes_dir / "r.txt",
       "Name: R\nDepartment: Sales\nEmail: r@example.com\nSkills: closing\n",
       1);

  {
    Pipeline pipeline(config);
    pipeline.run_once();
    CHECK(outbox_lines(config) == 1);
  }
  {
    // a fresh process: state reloads from the store
    Pipeline pipeline(config);
    RunReport report = pipeline.run_once();
    CHECK(report.notifications.total() == 0);
    CHECK(outbox_lines(config) == 1);
  }
}

TEST_CASE("a new resume re-ranks old jobs and only new entrants notify") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  config.k = 2;
  drop(config.jobs_dir / "job.txt",
       "Title: Platform Engineer\nDepartment: Engineering\nSkills: sql, spark\n",
       0);
  drop(config.resumes_dir / "weak1.txt",
       resume_text("Weak One", "w1@example.com", "sql"), 1);
  drop(config.resumes_dir / "weak2.txt",
       resume_text("Weak Two", "w2@example.com", "sql"), 2);

  Pipeline pipeline(config);
  RunReport first = pipeline.run_once();
  CHECK(first.notifications.dry_run == 2);

  // a stronger candidate arrives later and enters the top-2
  drop(config.resumes_dir / "strong.txt",
       resume_text("Strong", "s@example.com", "sql, spark",
                   "Platform Engineer"),
       3);
  RunReport second = pipeline.run_once();
  CHECK(second.resumes_processed == 1);
  CHECK(second.jobs_processed == 1);         // the job re-matched
  CHECK(second.notifications.dry_run == 1);  // only the new entrant
  CHECK(outbox_lines(config) == 3);

  // previously notified candidates are never un-notified
  Json match = pipeline.store().list("matches")[0];
  CHECK(match["selected"].size() == 2);
}

TEST_CASE("audit entries for a job appear in stage order") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Sales\nSkills: closing\n", 0);
  drop(config.resumes_dir / "r.txt",
       "Name: R\nDepartment: Sales\nEmail: r@example.com\nSkills: closing\n",
       1);

  Pipeline pipeline(config);
  pipeline.run_once();

  std::string job_id;
  for (const auto& j : pipeline.store().all_jobs()) {
    job_id = j.features.job_id.value;
  }
  REQUIRE_FALSE(job_id.empty());

  std::vector<std::string> stages;
  for (const auto& e : pipeline.store().read_audit()) {
    for (const auto& id : e.document_ids) {
      if (id == job_id) stages.push_back(e.operation);
    }
  }
  std::vector<std::string> expected = {"ingest", "parse", "score", "rank"};
  REQUIRE(stages.size() >= expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(stages[i] == expected[i]);
  }
}

TEST_CASE("match-all-departments widens the candidate scope") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  config.match_all_departments = true;
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Sales\nSkills: closing\n", 0);
  drop(config.resumes_dir / "other.txt",
       "Name: O\nDepartment: Chef\nEmail: o@example.com\nSkills: plating\n",
       1);

  Pipeline pipeline(config);
  RunReport report = pipeline.run_once();
  CHECK(report.matches_computed == 1);  // cross-department score
  CHECK(report.notifications.dry_run == 1);
}

TEST_CASE("hr notifications forward new postings once") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  config.notify_hr = true;
  drop(config.jobs_dir / "job.txt",
       "Title: X\nDepartment: Sales\nSkills: closing\n"
       "Email: hr-sales@corp.example\n",
       0);

  Pipeline pipeline(config);
  pipeline.run_once();
  CHECK(outbox_lines(config) == 1);
  pipeline.run_once();
  CHECK(outbox_lines(config) == 1);  // at-most-once for HR mail too

  std::ifstream in(config.mail.outbox_path);
  std::string line;
  std::getline(in, line);
  NotificationMessage m = Json::parse(line).get<NotificationMessage>();
  CHECK(m.recipient == "hr-sales@corp.example");
  CHECK(m.subject.find("X") != std::string::npos);
}

TEST_CASE("watch loop picks up files and honors the stop flag") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  Pipeline pipeline(config);

  std::atomic<bool> stop{false};
  int exit_code = -1;
  std::thread loop([&] { exit_code = pipeline.run_loop(stop); });

  std::this_thread::sleep_for(std::chrono::milliseconds(80));
  drop(config.resumes_dir / "r.txt",
       "Name: R\nDepartment: Sales\nEmail: r@example.com\nSkills: closing\n");

  // processed within two poll intervals (plus scheduling slack)
  bool seen = false;
  for (int i = 0; i < 100 && !seen; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    seen = !pipeline.store().query_resumes_by_department(Department::Sales)
                .empty();
  }
  CHECK(seen);

  stop.store(true);
  loop.join();
  CHECK(exit_code == 0);
}

TEST_CASE("five consecutive failed passes trip the circuit breaker") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  config.poll_interval_s = 0.01;
  Pipeline pipeline(config);

  // break the audit collection: its path becomes a regular file's child
  std::filesystem::remove_all(config.store_root / "audit");
  write_file_bytes(config.store_root / "audit", "not a directory");

  std::atomic<bool> stop{false};
  CHECK(pipeline.run_loop(stop) == 2);
}

TEST_CASE("config files round-trip and validate") {
  testing::TempDir dir;
  PipelineConfig config = workspace_config(dir);
  config.k = 5;
  config.match_all_departments = true;
  config.save_file(dir / "mlar.json");

  PipelineConfig loaded = PipelineConfig::load_file(dir / "mlar.json");
  CHECK(loaded.k == 5);
  CHECK(loaded.match_all_departments);
  CHECK(loaded.store_root == config.store_root);
  CHECK(loaded.scorer.w_skills == 0.5);

  write_file_bytes(dir / "broken.json", "{not json");
  CHECK_THROWS_WITH_AS(PipelineConfig::load_file(dir / "broken.json"),
                       doctest::Contains("configuration"), Error);

  PipelineConfig bad = config;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
