#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mlar/corpus.hpp"
#include "mlar/store.hpp"

using namespace mlar;

TEST_CASE("put then get round-trips the record") {
  testing::TempDir dir;
  Store store(dir.path());
  Json record{{"a", 1}, {"b", "two"}};
  store.put("matches", "doc1", record);
  auto back = store.get("matches", "doc1");
  REQUIRE(back.has_value());
  CHECK(*back == record);
  CHECK_FALSE(store.get("matches", "missing").has_value());
}

TEST_CASE("identical overwrite is a no-op, different content versions") {
  testing::TempDir dir;
  Store store(dir.path());
  Json v1{{"value", 1}};
  store.put("matches", "doc", v1);
  store.put("matches", "doc", v1);  // idempotent

  auto count_files = [&](const std::string& needle) {
    int n = 0;
    for (const auto& e :
         std::filesystem::directory_iterator(dir / "matches")) {
      if (e.path().filename().string().find(needle) != std::string::npos) ++n;
    }
    return n;
  };
  CHECK(count_files("doc") == 1);

  Json v2{{"value", 2}};
  store.put("matches", "doc", v2);
  CHECK(count_files(".v1") == 1);
  CHECK(*store.get("matches", "doc") == v2);

  store.put("matches", "doc", v1);
  CHECK(count_files(".v2") == 1);
}

TEST_CASE("resumes partition by department") {
  testing::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(3);
  for (int i = 0; i < 3; ++i) {
    auto r = make_synthetic_resume(rng, Department::Engineering, i, true);
    r.truth.resume_id = DocumentId::of_bytes(r.text);
    store.put_resume(r.truth, now_utc());
  }
  for (int i = 3; i < 5; ++i) {
    auto r = make_synthetic_resume(rng, Department::Sales, i, true);
    r.truth.resume_id = DocumentId::of_bytes(r.text);
    store.put_resume(r.truth, now_utc());
  }

  auto engineering = store.query_resumes_by_department(Department::Engineering);
  CHECK(engineering.size() == 3);
  for (std::size_t i = 1; i < engineering.size(); ++i) {
    CHECK(engineering[i - 1].resume_id.value < engineering[i].resume_id.value);
  }
  CHECK(store.query_resumes_by_department(Department::Sales).size() == 2);
  CHECK(store.query_resumes_by_department(Department::Chef).empty());
}

TEST_CASE("partitions are complete and disjoint over a synthetic corpus") {
  testing::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(17);
  std::map<Department, int> expected;
  for (int i = 0; i < 240; ++i) {
    Department d = all_departments()[i % 24];
    auto r = make_synthetic_resume(rng, d, i, true);
    r.truth.resume_id = DocumentId::of_bytes(r.text);
    store.put_resume(r.truth, now_utc());
    expected[d]++;
  }
  int total = 0;
  std::set<std::string> all_ids;
  for (Department d : all_departments()) {
    auto rs = store.query_resumes_by_department(d);
    CHECK(static_cast<int>(rs.size()) == expected[d]);
    for (const auto& r : rs) {
      CHECK(r.predicted_department == d);
      all_ids.insert(r.resume_id.value);
    }
    total += static_cast<int>(rs.size());
  }
  CHECK(total == 240);
  CHECK(all_ids.size() == 240);  // disjoint
}

TEST_CASE("stored records round-trip for random features") {
  testing::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(23);
  for (int i = 0; i < 1000; ++i) {
    Department d = all_departments()[rng() % 24];
    auto r = make_synthetic_resume(rng, d, i, i % 4 != 0);
    r.truth.resume_id = DocumentId::of_bytes(r.text);
    UtcSeconds at{std::chrono::seconds{1704067200 + i}};
    store.put_resume(r.truth, at);
    auto got = store.get("resumes/" + to_label(d), r.truth.resume_id.value);
    REQUIRE(got.has_value());
    CHECK(got->get<ResumeFeatures>() == r.truth);
    CHECK(parse_rfc3339((*got)["received_at"].get<std::string>()) == at);
  }
}

TEST_CASE("audit log is append-only and ordered") {
  testing::TempDir dir;
  {
    Store store(dir.path());
    for (int i = 0; i < 3; ++i) {
      store.append_audit(AuditLogEntry{
          UtcSeconds{std::chrono::seconds{1704067200 + i}},
          "op" + std::to_string(i),
          {},
          AuditOutcome::Ok,
          ""});
    }
    auto entries = store.read_audit();
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].operation == "op0");
    CHECK(entries[2].operation == "op2");
    CHECK(entries[0].timestamp <= entries[1].timestamp);
  }
  // a restart appends, never truncates
  Store reopened(dir.path());
  reopened.append_audit(AuditLogEntry{now_utc(), "later", {}, AuditOutcome::Ok,
                                      ""});
  CHECK(reopened.read_audit().size() == 4);
}

TEST_CASE("concurrent appends produce exactly one line each") {
  testing::TempDir dir;
  Store store(dir.path());
  constexpr int kOps = 200;
  parallel_for(kOps, 8, [&](std::size_t i) {
    store.append_audit(AuditLogEntry{
        now_utc(), "op", {std::to_string(i)}, AuditOutcome::Ok, ""});
  });
  CHECK(store.read_audit().size() == kOps);
}

TEST_CASE("ledger entries round-trip") {
  testing::TempDir dir;
  Store store(dir.path());
  store.append_ledger(Store::LedgerEntry{"job1", "res1", "dry_run", now_utc()});
  store.append_ledger(Store::LedgerEntry{"job1", "", "sent", now_utc()});
  auto entries = store.read_ledger();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].job_id == "job1");
  CHECK(entries[0].resume_id == "res1");
  CHECK(entries[0].status == "dry_run");
  CHECK(entries[1].resume_id.empty());
}

TEST_CASE("interrupted writes leave every collection readable") {
  // The only intermediate states the write discipline can leave behind are
  // a stray temp file or a versioned-away predecessor; both must be
  // invisible to readers.
  testing::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(31);
  for (int i = 0; i < 10; ++i) {
    auto r = make_synthetic_resume(rng, Department::Arts, i, true);
    r.truth.resume_id = DocumentId::of_bytes(r.text);
    store.put_resume(r.truth, now_utc());
  }

  // crash window 1: temp file written but not renamed
  write_file_bytes(dir.path() / "resumes" / "Arts" / "deadbeef.json.tmp99",
                   "{\"partial\":");
  // crash window 2: predecessor versioned away before the new write landed
  write_file_bytes(dir.path() / "resumes" / "Arts" / "gone.json.v1",
                   "{\"old\": true}");

  auto resumes = store.query_resumes_by_department(Department::Arts);
  CHECK(resumes.size() == 10);  // neither artifact surfaces
  Store reopened(dir.path());
  CHECK(reopened.query_resumes_by_department(Department::Arts).size() == 10);
}

TEST_CASE("inbox state persists through the store") {
  testing::TempDir dir;
  Store store(dir.path());
  InboxState state;
  state.seen = {"aa", "bb"};
  state.known_paths = {{"/inbox/a.txt", "aa"}};
  store.save_inbox_state(state);

  InboxState loaded;
  store.load_inbox_state(loaded);
  CHECK(loaded.seen == state.seen);
  CHECK(loaded.known_paths == state.known_paths);
}
