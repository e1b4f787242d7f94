#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlar/pipeline.hpp"

namespace mlar {

struct TimingRecord {
  std::string system_label;
  double total_seconds = 0.0;
  int resume_count = 0;
};

struct DeltaEntry {
  std::string label;
  double seconds = 0.0;
  double percent = 0.0;  // relative to the benchmark system's total
};

struct BenchmarkReport {
  std::vector<TimingRecord> records;
  std::vector<double> per_resume;  // derived, aligned with records
  std::vector<DeltaEntry> deltas;  // each non-subject record vs the subject
  std::string subject_label;
  // Reported per-resume values supplied with external records; computed
  // cells that differ are flagged in the rendered table.
  std::map<std::string, double> per_resume_overrides;
};

// delta seconds = benchmark.total - mlar.total; percent relative to the
// benchmark total.
std::pair<double, double> delta_t(const TimingRecord& benchmark,
                                  const TimingRecord& mlar);

// total_seconds / resume_count, reported to 2 decimals.
double per_resume(const TimingRecord& record);

BenchmarkReport make_report(std::vector<TimingRecord> records,
                            const std::string& subject_label,
                            std::map<std::string, double> overrides = {});

std::string render_report_text(const BenchmarkReport& report);
Json render_report_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(const Json& j);

// External platform timings come from a JSON file:
//   [{"system_label": ..., "total_seconds": ..., "resume_count": ...,
//     "reported_per_resume": ...(optional)}, ...]
struct BaselineRecords {
  std::vector<TimingRecord> records;
  std::map<std::string, double> overrides;
};
BaselineRecords load_baseline_records(const std::filesystem::path& path);

struct BenchOptions {
  std::set<std::string> stages = {"parse", "match", "notify"};
  int repeat = 1;
  std::string label = "MLAR";
};

struct StageTiming {
  double parse = 0.0;
  double match = 0.0;
  double notify = 0.0;
};

struct BenchResult {
  TimingRecord record;             // mean total over the selected stages
  std::vector<StageTiming> runs;   // per-repeat breakdown
  int resume_count = 0;
};

// Runs the pipeline over a corpus directory (<corpus>/jobs, <corpus>/resumes)
// against a fresh store per repeat, dry-run transport forced, timing each
// stage with a monotonic clock.
BenchResult run_bench(const PipelineConfig& base,
                      const std::filesystem::path& corpus,
                      const BenchOptions& options);

}  // namespace mlar
