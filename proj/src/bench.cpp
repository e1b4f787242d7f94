#include "mlar/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace mlar {

std::pair<double, double> delta_t(const TimingRecord& benchmark,
                                  const TimingRecord& mlar) {
  if (!benchmark.system_label.empty() &&
      benchmark.system_label == mlar.system_label) {
    throw Error("bench invalid", "records must have distinct labels");
  }
  double seconds = benchmark.total_seconds - mlar.total_seconds;
  double percent = benchmark.total_seconds != 0.0
                       ? seconds / benchmark.total_seconds * 100.0
                       : 0.0;
  return {seconds, percent};
}

double per_resume(const TimingRecord& record) {
  if (record.resume_count <= 0) {
    throw Error("bench invalid", "resume_count must be positive");
  }
  double raw = record.total_seconds / record.resume_count;
  return std::round(raw * 100.0) / 100.0;
}

BenchmarkReport make_report(std::vector<TimingRecord> records,
                            const std::string& subject_label,
                            std::map<std::string, double> overrides) {
  BenchmarkReport report;
  report.records = std::move(records);
  report.subject_label = subject_label;
  report.per_resume_overrides = std::move(overrides);
  report.per_resume.reserve(report.records.size());
  const TimingRecord* subject = nullptr;
  for (const auto& r : report.records) {
    report.per_resume.push_back(per_resume(r));
    if (r.system_label == subject_label) subject = &r;
  }
  if (subject) {
    for (const auto& r : report.records) {
      if (r.system_label == subject_label) continue;
      auto [seconds, percent] = delta_t(r, *subject);
      report.deltas.push_back(DeltaEntry{r.system_label, seconds, percent});
    }
  }
  return report;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string render_report_text(const BenchmarkReport& report) {
  static const std::string kTotalHeader = "Total Time Taken (s)";
  static const std::string kPerResumeHeader = "Time Per Resume (s)";
  std::size_t label_w = std::string("System").size();
  for (const auto& r : report.records) {
    label_w = std::max(label_w, r.system_label.size());
  }

  std::string out;
  out += pad_right("System", label_w) + " | " + kTotalHeader + " | " +
         kPerResumeHeader + "\n";
  const std::string separator = std::string(label_w + 1, '-') + "+" +
                                std::string(kTotalHeader.size() + 2, '-') +
                                "+" +
                                std::string(kPerResumeHeader.size() + 1, '-');
  out += separator + "\n";

  bool any_flag = false;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const TimingRecord& r = report.records[i];
    std::string cell = fixed2(report.per_resume[i]);
    auto override_it = report.per_resume_overrides.find(r.system_label);
    if (override_it != report.per_resume_overrides.end() &&
        std::abs(report.per_resume[i] - override_it->second) > 1e-9) {
      cell += " *";
      any_flag = true;
    }
    out += pad_right(r.system_label, label_w) + " | " +
           pad_left(fixed2(r.total_seconds), kTotalHeader.size()) + " | " +
           pad_left(cell, kPerResumeHeader.size()) + "\n";
  }
  out += separator + "\n";
  for (const auto& d : report.deltas) {
    out += "dT vs " + d.label + " = " + fixed2(d.seconds) + " s (" +
           fixed2(d.percent) + "%)\n";
  }
  if (any_flag) {
    out += "* computed per-resume differs from the reported value\n";
  }
  return out;
}

Json render_report_json(const BenchmarkReport& report) {
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back(Json{{"system_label", r.system_label},
                           {"total_seconds", r.total_seconds},
                           {"resume_count", r.resume_count}});
  }
  Json deltas = Json::array();
  for (const auto& d : report.deltas) {
    deltas.push_back(Json{{"label", d.label},
                          {"seconds", d.seconds},
                          {"percent", d.percent}});
  }
  return Json{{"subject", report.subject_label},
              {"records", std::move(records)},
              {"per_resume", report.per_resume},
              {"deltas", std::move(deltas)},
              {"per_resume_overrides", report.per_resume_overrides}};
}

BenchmarkReport report_from_json(const Json& j) {
  std::vector<TimingRecord> records;
  for (const auto& r : j.at("records")) {
    records.push_back(TimingRecord{r.at("system_label").get<std::string>(),
                                   r.at("total_seconds").get<double>(),
                                   r.at("resume_count").get<int>()});
  }
  std::map<std::string, double> overrides =
      j.value("per_resume_overrides", std::map<std::string, double>{});
  return make_report(std::move(records), j.value("subject", std::string{}),
                     std::move(overrides));
}

BaselineRecords load_baseline_records(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file_bytes(path));
  } catch (const std::exception& e) {
    throw Error("configuration error",
                path.string() + ": " + std::string(e.what()));
  }
  BaselineRecords out;
  for (const auto& r : j) {
    TimingRecord record{r.at("system_label").get<std::string>(),
                        r.at("total_seconds").get<double>(),
                        r.at("resume_count").get<int>()};
    if (r.contains("reported_per_resume")) {
      out.overrides[record.system_label] =
          r.at("reported_per_resume").get<double>();
    }
    out.records.push_back(std::move(record));
  }
  return out;
}

namespace {

std::filesystem::path fresh_bench_store() {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() /
             ("mlar_bench_" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

BenchResult run_bench(const PipelineConfig& base,
                      const std::filesystem::path& corpus,
                      const BenchOptions& options) {
  const std::filesystem::path jobs_dir = corpus / "jobs";
  const std::filesystem::path resumes_dir = corpus / "resumes";
  if (!std::filesystem::is_directory(resumes_dir) ||
      std::filesystem::is_empty(resumes_dir)) {
    throw Error("corpus empty", "no resumes under " + corpus.string());
  }

  const bool want_match = options.stages.count("match") > 0;
  const bool want_notify = options.stages.count("notify") > 0;

  BenchResult result;
  double total_sum = 0.0;
  for (int run = 0; run < std::max(1, options.repeat); ++run) {
    std::filesystem::path store_dir = fresh_bench_store();
    PipelineConfig config = base;
    config.store_root = store_dir;
    config.jobs_dir = jobs_dir;
    config.resumes_dir = resumes_dir;
    config.mail.mode = MailMode::DryRun;  // benchmarks never send real mail
    config.mail.outbox_path = store_dir / "outbox.jsonl";
    Pipeline pipeline(config);

    using Clock = std::chrono::steady_clock;
    StageTiming timing;

    auto t0 = Clock::now();
    Pipeline::ParsedBatch batch = pipeline.ingest_and_parse();
    timing.parse = std::chrono::duration<double>(Clock::now() - t0).count();
    result.resume_count = static_cast<int>(batch.new_resumes.size());

    Pipeline::MatchOutcome outcome;
    if (want_match || want_notify) {
      auto t1 = Clock::now();
      outcome = pipeline.match_affected(batch);
      timing.match = std::chrono::duration<double>(Clock::now() - t1).count();
    }
    if (want_notify) {
      auto t2 = Clock::now();
      pipeline.notify_selected(outcome);
      timing.notify = std::chrono::duration<double>(Clock::now() - t2).count();
    }

    double total = 0.0;
    if (options.stages.count("parse")) total += timing.parse;
    if (want_match) total += timing.match;
    if (want_notify) total += timing.notify;
    total_sum += total;
    result.runs.push_back(timing);

    std::error_code ec;
    std::filesystem::remove_all(store_dir, ec);
  }

  if (result.resume_count <= 0) {
    throw Error("corpus empty", "no resumes ingested from " + corpus.string());
  }
  result.record.system_label = options.label;
  result.record.total_seconds = total_sum / result.runs.size();
  result.record.resume_count = result.resume_count;
  return result;
}

}  // namespace mlar
