#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mlar/domain.hpp"

namespace mlar {

// Deterministic synthetic fixtures in the labeled-line grammar the rules
// extractor understands. Every document comes with its ground-truth record,
// which is what the round-trip tests compare against.

struct SyntheticJob {
  std::string text;
  JobFeatures truth;  // job_id left empty until the bytes are hashed
};

struct SyntheticResume {
  std::string text;
  ResumeFeatures truth;
};

SyntheticJob make_synthetic_job(std::mt19937& rng, Department department,
                                int index);
SyntheticResume make_synthetic_resume(std::mt19937& rng, Department department,
                                      int index, bool with_email);

struct CorpusOptions {
  int jobs = 24;
  int resumes = 240;
  unsigned seed = 42;
  double email_fraction = 1.0;  // fraction of resumes given an email
  double pdf_fraction = 0.0;    // fraction of resumes written as .pdf
};

struct CorpusTruth {
  std::vector<JobFeatures> jobs;
  std::vector<ResumeFeatures> resumes;
};

// Writes <out>/jobs/*.txt and <out>/resumes/*.{txt,pdf} plus
// <out>/ground_truth.json; returns the records with ids filled in from the
// written bytes. Departments cycle so `jobs = 24` gives one per department.
CorpusTruth write_corpus(const std::filesystem::path& out,
                         const CorpusOptions& options);

}  // namespace mlar
