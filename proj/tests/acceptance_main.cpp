// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria run against fixed corpora, the published timing
// figures, independent oracles and the installed CLI binary.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "mlar/bench.hpp"
#include "mlar/corpus.hpp"
#include "mlar/extract.hpp"
#include "mlar/pdf.hpp"
#include "mlar/pipeline.hpp"
#include "oracles.hpp"

using namespace mlar;

namespace {

namespace fs = std::filesystem;

struct Criterion {
  int number;
  std::string name;
  std::function<void()> run;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw Failure(what);
}

fs::path scratch_root() {
  static fs::path root = [] {
    std::mt19937_64 rng{std::random_device{}()};
    fs::path p = fs::temp_directory_path() /
                 ("mlar_acceptance_" + std::to_string(rng()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path templates_dir() {
  if (const char* env = std::getenv("MLAR_TEMPLATES_DIR")) return env;
  return "templates";
}

// ---------------------------------------------------------------------------
// 1. delta-T reproduction

void criterion_delta_t() {
  TimingRecord uipath{"UiPath", 15258, 2400};
  TimingRecord automation_anywhere{"Automation Anywhere", 15350, 2400};
  TimingRecord mlar{"MLAR", 12414, 2400};
  auto [d1, p1] = delta_t(uipath, mlar);
  auto [d2, p2] = delta_t(automation_anywhere, mlar);
  (void)p1;
  (void)p2;
  require(d1 == 2844.0, "expected delta 2844, got " + std::to_string(d1));
  require(d2 == 2936.0, "expected delta 2936, got " + std::to_string(d2));
  require(std::abs(d1 / 60.0 - 47.4) < 0.05, "47.4 minutes check");
  require(std::abs(d2 / 60.0 - 48.9) < 0.05, "48.9 minutes check");
}

// ---------------------------------------------------------------------------
// 2. comparison-report shape against the golden file

void criterion_table_shape() {
  std::vector<TimingRecord> records = {
      {"UiPath", 15258, 2400},
      {"Automation Anywhere", 15350, 2400},
      {"MLAR (Proposed system)", 12414, 2400},
  };
  std::map<std::string, double> overrides = {
      {"UiPath", 6.45},
      {"Automation Anywhere", 6.50},
      {"MLAR (Proposed system)", 5.25},
  };
  BenchmarkReport report =
      make_report(records, "MLAR (Proposed system)", overrides);
  require(report.per_resume[0] == 6.36, "UiPath per-resume must be 6.36");
  require(report.per_resume[1] == 6.40,
          "Automation Anywhere per-resume must be 6.40");
  require(report.per_resume[2] == 5.17, "MLAR per-resume must be 5.17");

  std::string rendered = render_report_text(report);
  fs::path golden_dir = std::getenv("MLAR_GOLDEN_DIR")
                            ? fs::path(std::getenv("MLAR_GOLDEN_DIR"))
                            : fs::path("tests/golden");
  std::string expected = read_file_bytes(golden_dir / "table1.txt");
  if (rendered != expected) {
    std::ostringstream os;
    os << "rendered table differs from golden file\n--- rendered ---\n"
       << rendered << "--- golden ---\n"
       << expected;
    throw Failure(os.str());
  }
}

// ---------------------------------------------------------------------------
// 3. top-k equals brute-force subset enumeration

void criterion_top_k_oracle() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(20240101);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng() % 12);
    std::vector<SimilarityScore> scores;
    std::vector<double> values;
    for (int i = 0; i < n; ++i) {
      double value = static_cast<double>(rng() % 401) / 4.0;
      values.push_back(value);
      scores.push_back(SimilarityScore::checked(
          DocumentId{"job"}, DocumentId{"r" + std::to_string(i)}, value,
          ScorerKind::Baseline, {}));
    }
    for (int k : {1, 2, 3, 5}) {
      Ranking ranking = rank(scores, {});
      SelectedCandidates selected = select_top_k(ranking, k);
      std::vector<double> chosen;
      for (const auto& id : selected.selected) {
        for (const auto& s : scores) {
          if (s.resume_id == id) chosen.push_back(s.value);
        }
      }
      std::sort(chosen.begin(), chosen.end());
      std::vector<double> best = oracle::best_k_subset_scores(values, k);
      require(chosen == best, "top-k multiset mismatch at trial " +
                                  std::to_string(trial) + ", k=" +
                                  std::to_string(k));
    }
  }
  double elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  require(elapsed < 10.0,
          "oracle sweep took " + std::to_string(elapsed) + " s (limit 10)");
}

// ---------------------------------------------------------------------------
// 4 & 5. end-to-end desk-scale run + throughput bound

struct DeskRun {
  CorpusTruth truth;
  RunReport report;
  PipelineConfig config;
  fs::path workspace;
};

DeskRun desk_scale_run() {
  fs::path ws = scratch_root() / "desk";
  CorpusOptions options;
  options.jobs = 24;
  options.resumes = 240;
  options.seed = 424242;
  options.email_fraction = 1.0;
  CorpusTruth truth = write_corpus(ws / "corpus", options);

  PipelineConfig config;
  config.store_root = ws / "store";
  config.jobs_dir = ws / "corpus" / "jobs";
  config.resumes_dir = ws / "corpus" / "resumes";
  config.templates_dir = templates_dir();
  config.mail.outbox_path = ws / "store" / "outbox.jsonl";

  Pipeline pipeline(config);
  RunReport report = pipeline.run_once();
  return DeskRun{std::move(truth), std::move(report), std::move(config), ws};
}

const DeskRun& desk_run() {
  static DeskRun run = desk_scale_run();
  return run;
}

std::vector<std::string> oracle_selection(const CorpusTruth& truth,
                                          const JobFeatures& job,
                                          int job_count) {
  // received_at offsets follow generation order: jobs first, resumes after.
  std::vector<oracle::ScoredResume> scored;
  for (std::size_t i = 0; i < truth.resumes.size(); ++i) {
    const ResumeFeatures& resume = truth.resumes[i];
    if (resume.predicted_department != job.department) continue;
    scored.push_back(oracle::ScoredResume{
        resume.resume_id.value, oracle::baseline_score(job, resume),
        static_cast<long long>(job_count + i)});
  }
  auto sorted = oracle::reference_sort(std::move(scored));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sorted.size() && i < 3; ++i) {
    out.push_back(sorted[i].resume_id);
  }
  return out;
}

void criterion_desk_scale() {
  const DeskRun& run = desk_run();
  require(run.report.wall_time_s < 30.0, "run_once exceeded 30 s");
  require(run.report.jobs_processed == 24, "expected 24 jobs processed, got " +
                                               std::to_string(
                                                   run.report.jobs_processed));
  require(run.report.resumes_processed == 240, "expected 240 resumes");
  require(run.report.errors.empty(), "pipeline reported errors");

  Store store(run.config.store_root);
  std::vector<Json> matches = store.list("matches");
  require(matches.size() == 24, "expected 24 rankings, got " +
                                    std::to_string(matches.size()));

  // every job got exactly 3 outbox messages (all candidates are emailable)
  std::map<std::string, int> per_job;
  std::ifstream outbox(run.config.mail.outbox_path);
  std::string line;
  int total = 0;
  while (std::getline(outbox, line)) {
    if (trim(line).empty()) continue;
    Json m = Json::parse(line);
    per_job[m.at("job_id").get<std::string>()]++;
    ++total;
  }
  require(total == 72, "expected 72 outbox messages, got " +
                           std::to_string(total));
  require(per_job.size() == 24, "messages must cover all 24 jobs");
  for (const auto& [job_id, count] : per_job) {
    require(count == 3, "job " + job_id + " has " + std::to_string(count) +
                            " messages, expected 3");
  }

  // selections equal an independent recomputation from generator truth
  for (const JobFeatures& job : run.truth.jobs) {
    std::vector<std::string> expected = oracle_selection(
        run.truth, job, static_cast<int>(run.truth.jobs.size()));
    std::optional<Json> match = store.get("matches", job.job_id.value);
    require(match.has_value(), "missing match record for " + job.job_id.value);
    std::vector<std::string> got;
    for (const auto& id : match->at("selected")) {
      got.push_back(id.get<std::string>());
    }
    require(got == expected,
            "selection mismatch for job " + job.job_id.value);
  }
}

void criterion_throughput() {
  const DeskRun& run = desk_run();
  double per_resume_s =
      run.report.wall_time_s / run.report.resumes_processed;
  require(run.report.resumes_processed == 240, "expected 240 resumes");
  require(per_resume_s <= 0.050,
          "pipeline overhead " + std::to_string(per_resume_s * 1000.0) +
              " ms/resume exceeds the 50 ms bound");
}

// ---------------------------------------------------------------------------
// 6. idempotency and at-most-once across process kills

std::string shell_quote(const fs::path& p) { return "'" + p.string() + "'"; }

void criterion_idempotency() {
  const char* bin_env = std::getenv("MLAR_BIN");
  require(bin_env != nullptr, "MLAR_BIN not set");
  fs::path bin(bin_env);
  require(fs::exists(bin), "mlar binary missing at " + bin.string());

  fs::path ws = scratch_root() / "kill";
  CorpusOptions options;
  options.jobs = 8;
  options.resumes = 48;
  options.seed = 777;
  write_corpus(ws / "corpus", options);

  PipelineConfig config;
  config.store_root = ws / "store";
  config.jobs_dir = ws / "corpus" / "jobs";
  config.resumes_dir = ws / "corpus" / "resumes";
  config.templates_dir = templates_dir();
  config.mail.outbox_path = ws / "store" / "outbox.jsonl";
  config.save_file(ws / "mlar.json");

  auto run_pass = [&](int n) {
    fs::path out = ws / ("pass" + std::to_string(n) + ".json");
    // SIGKILL lands right after the pass, before any graceful teardown
    std::string cmd = shell_quote(bin) + " --config " +
                      shell_quote(ws / "mlar.json") +
                      " run-once --kill-after-pass > " + shell_quote(out) +
                      " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    (void)rc;  // the child is SIGKILLed on purpose
    return Json::parse(read_file_bytes(out));
  };

  Json first = run_pass(1);
  require(first.at("jobs_processed") == 8, "first pass parses 8 jobs");
  require(first.at("resumes_processed") == 48, "first pass parses 48 resumes");
  int notified = first.at("notifications").at("dry_run").get<int>();
  require(notified > 0, "first pass must notify someone");

  Json second = run_pass(2);
  Json third = run_pass(3);
  for (const Json* pass : {&second, &third}) {
    require(pass->at("jobs_processed") == 0, "reruns must process nothing");
    require(pass->at("resumes_processed") == 0, "reruns must parse nothing");
    require(pass->at("notifications").at("dry_run") == 0,
            "reruns must not notify");
  }

  // exact outbox and ledger counts, no duplicate parsed records
  Store store(config.store_root);
  std::ifstream outbox(config.mail.outbox_path);
  std::string line;
  std::set<std::pair<std::string, std::string>> outbox_pairs;
  int outbox_total = 0;
  while (std::getline(outbox, line)) {
    if (trim(line).empty()) continue;
    Json m = Json::parse(line);
    outbox_pairs.insert(std::make_pair(m.at("job_id").get<std::string>(),
                                       m.at("resume_id").get<std::string>()));
    ++outbox_total;
  }
  require(outbox_total == notified, "outbox count changed across reruns");
  require(static_cast<int>(outbox_pairs.size()) == outbox_total,
          "duplicate notifications in the outbox");
  require(store.read_ledger().size() == static_cast<std::size_t>(outbox_total),
          "ledger count does not match the outbox");

  require(store.all_jobs().size() == 8, "duplicate or missing parsed jobs");
  require(store.all_resumes().size() == 48,
          "duplicate or missing parsed resumes");
  int versioned = 0;
  for (const auto& entry : fs::recursive_directory_iterator(config.store_root)) {
    if (entry.is_regular_file() &&
        entry.path().filename().string().find(".json.v") != std::string::npos) {
      ++versioned;
    }
  }
  require(versioned == 0, "reruns re-wrote parsed records");
}

// ---------------------------------------------------------------------------
// 7. extraction round-trip at corpus scale

void criterion_extraction_round_trip() {
  Templates templates = Templates::load(templates_dir());
  std::mt19937 rng(31337);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    Department d = all_departments()[i % 24];

    SyntheticJob job = make_synthetic_job(rng, d, i);
    RawDocument job_doc;
    job_doc.kind = DocKind::Job;
    job_doc.text = job.text;
    job_doc.id = DocumentId::of_bytes(job.text);
    JobFeatures parsed_job = parse_job(job_doc, ExtractorConfig{}, templates);
    job.truth.job_id = job_doc.id;
    require(parsed_job == job.truth, "job round-trip failed at " +
                                         std::to_string(i));
    ++checked;

    SyntheticResume resume = make_synthetic_resume(rng, d, i, i % 7 != 0);
    std::string text = resume.text;
    if (i % 10 == 0) {  // a slice of the corpus goes through the PDF layer
      text = extract_pdf_text(make_pdf({split_lines(trim(resume.text))},
                                       i % 20 == 0));
    }
    RawDocument resume_doc;
    resume_doc.kind = DocKind::Resume;
    resume_doc.text = text;
    resume_doc.id = DocumentId::of_bytes(text);
    ResumeFeatures parsed_resume =
        parse_resume(resume_doc, ExtractorConfig{}, templates);
    resume.truth.resume_id = resume_doc.id;
    require(parsed_resume == resume.truth, "resume round-trip failed at " +
                                               std::to_string(i));
    ++checked;
  }
  require(checked == 1000, "expected 1000 documents");

  for (Department d : all_departments()) {
    require(parse_department(to_label(d)) == d, "department round-trip");
  }
}

// ---------------------------------------------------------------------------
// 8. baseline scorer bounds and frozen cases

void criterion_baseline_scorer() {
  std::mt19937 rng(90210);
  for (int i = 0; i < 1000; ++i) {
    Department jd = all_departments()[rng() % 24];
    Department rd = all_departments()[rng() % 24];
    SyntheticJob job = make_synthetic_job(rng, jd, i);
    SyntheticResume resume = make_synthetic_resume(rng, rd, i, true);
    double value = baseline_score(job.truth, resume.truth, ScorerConfig{});
    require(value >= 0.0 && value <= 100.0, "score out of bounds");
  }

  JobFeatures job;
  job.job_id = DocumentId{"job"};
  job.title = "Platform Engineer";
  job.required_skills = {"a", "b"};
  job.department = Department::Engineering;

  ResumeFeatures identical;
  identical.resume_id = DocumentId{"resume"};
  identical.candidate_name = "Same";
  identical.skills = {"a", "b"};
  identical.predicted_department = Department::Engineering;
  identical.experience.push_back(
      ExperienceEntry{"Platform Engineer", "", {}});
  require(baseline_score(job, identical, ScorerConfig{}) == 100.0,
          "identical features must score 100");

  ResumeFeatures disjoint;
  disjoint.resume_id = DocumentId{"resume"};
  disjoint.candidate_name = "Other";
  disjoint.skills = {"x", "y"};
  disjoint.predicted_department = Department::Chef;
  disjoint.experience.push_back(ExperienceEntry{"Gardener", "", {}});
  require(baseline_score(job, disjoint, ScorerConfig{}) == 0.0,
          "fully disjoint features must score 0");

  JobFeatures four;
  four.job_id = DocumentId{"job"};
  four.title = "Untitled";
  four.required_skills = {"a", "b", "c", "d"};
  four.department = Department::Engineering;
  ResumeFeatures two;
  two.resume_id = DocumentId{"resume"};
  two.candidate_name = "Half";
  two.skills = {"a", "b"};
  two.predicted_department = Department::Sales;
  require(baseline_score(four, two, ScorerConfig{}) == 25.0,
          "Jaccard 2/4 with e=d=0 must be exactly 25.0");
}

// ---------------------------------------------------------------------------

int run_all() {
  std::vector<Criterion> criteria = {
      {1, "delta-T reproduction (2844 s / 2936 s, exact)", criterion_delta_t},
      {2, "comparison report golden match (6.36/6.40/5.17 flagged)",
       criterion_table_shape},
      {3, "top-k equals brute-force subset oracle (1000 instances)",
       criterion_top_k_oracle},
      {4, "desk-scale run: 24 rankings, 3 messages per job, oracle selections",
       criterion_desk_scale},
      {5, "pipeline overhead <= 50 ms per resume at 240-resume scale",
       criterion_throughput},
      {6, "idempotency and at-most-once across process kills",
       criterion_idempotency},
      {7, "extraction round-trip: 1000 documents, 24/24 departments",
       criterion_extraction_round_trip},
      {8, "baseline scorer bounds and frozen cases", criterion_baseline_scorer},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.run();
      std::printf("PASS  criterion %d: %s\n", criterion.number,
                  criterion.name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL  criterion %d: %s\n      %s\n", criterion.number,
                  criterion.name.c_str(), e.what());
    }
  }

  // Criterion 9 is the explicit statement that the published matching
  // accuracy (63.45%) and precision (74.24%) figures are not reproducible
  // here: their metric definitions are unspecified and they require a live
  // LLM. Criteria 3-8 stand in.
  std::printf(
      "PASS  criterion 9: accuracy/precision figures stated as not "
      "reproducible (require a live LLM; replaced by criteria 3-8)\n");

  std::error_code ec;
  fs::remove_all(scratch_root(), ec);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main() { return run_all(); }
