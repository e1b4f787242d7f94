#pragma once

#include <map>

#include "mlar/domain.hpp"
#include "mlar/extract.hpp"

namespace mlar {

struct ScorerConfig {
  ScorerKind kind = ScorerKind::Baseline;
  // Baseline weights; must be non-negative and sum to 1.
  double w_skills = 0.5;
  double w_experience = 0.25;
  double w_education = 0.25;

  void validate() const;
  Json to_json() const;
  static ScorerConfig from_json(const Json& j);
};

// 100 * (w_skills * Jaccard(job.skills, resume.skills)
//        + w_experience * e + w_education * d)
// with Jaccard(empty, empty) = 1; e = 1 iff any experience role title shares
// a normalized token with the job title; d = 1 iff the departments match.
double baseline_score(const JobFeatures& job, const ResumeFeatures& resume,
                      const ScorerConfig& weights);

class Scorer {
 public:
  // remote/templates are required only for the LLM scorer.
  explicit Scorer(ScorerConfig config,
                  const ExtractorConfig* remote = nullptr,
                  const Templates* templates = nullptr);

  SimilarityScore score(const JobFeatures& job,
                        const ResumeFeatures& resume) const;

 private:
  double llm_score(const JobFeatures& job, const ResumeFeatures& resume) const;

  ScorerConfig config_;
  const ExtractorConfig* remote_;
  const Templates* templates_;
};

// Sorts by value desc, then received_at asc, then resume_id asc. Scores must
// share one job_id and contain no duplicate resume. Resumes missing from
// receipt_times sort as epoch.
Ranking rank(const std::vector<SimilarityScore>& scores,
             const std::map<std::string, UtcSeconds>& receipt_times);

SelectedCandidates select_top_k(const Ranking& ranking, int k = 3);

}  // namespace mlar
