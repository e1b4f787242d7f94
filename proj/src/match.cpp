#include "mlar/match.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace mlar {

void ScorerConfig::validate() const {
  if (kind == ScorerKind::LLM) return;
  if (w_skills < 0 || w_experience < 0 || w_education < 0) {
    throw Error("configuration error", "weights must be non-negative");
  }
  if (std::abs(w_skills + w_experience + w_education - 1.0) > 1e-9) {
    throw Error("configuration error", "weights must sum to 1");
  }
}

Json ScorerConfig::to_json() const {
  return Json{{"kind", to_string(kind)},
              {"w_skills", w_skills},
              {"w_experience", w_experience},
              {"w_education", w_education}};
}

ScorerConfig ScorerConfig::from_json(const Json& j) {
  ScorerConfig c;
  c.kind = parse_scorer_kind(j.value("kind", "baseline"));
  c.w_skills = j.value("w_skills", 0.5);
  c.w_experience = j.value("w_experience", 0.25);
  c.w_education = j.value("w_education", 0.25);
  return c;
}

namespace {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;  // vacuous requirements
  std::size_t intersection = 0;
  for (const auto& item : a) intersection += b.count(item);
  std::size_t union_size = a.size() + b.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(union_size);
}

bool shares_title_token(const JobFeatures& job, const ResumeFeatures& resume) {
  std::set<std::string> title_tokens;
  for (const auto& t : tokens_of(to_lower_ascii(job.title))) {
    title_tokens.insert(t);
  }
  for (const auto& entry : resume.experience) {
    for (const auto& t : tokens_of(to_lower_ascii(entry.role_title))) {
      if (title_tokens.count(t)) return true;
    }
  }
  return false;
}

}  // namespace

double baseline_score(const JobFeatures& job, const ResumeFeatures& resume,
                      const ScorerConfig& weights) {
  weights.validate();
  double skills = jaccard(job.required_skills, resume.skills);
  double experience = shares_title_token(job, resume) ? 1.0 : 0.0;
  double education =
      resume.predicted_department == job.department ? 1.0 : 0.0;
  return 100.0 * (weights.w_skills * skills +
                  weights.w_experience * experience +
                  weights.w_education * education);
}

Scorer::Scorer(ScorerConfig config, const ExtractorConfig* remote,
               const Templates* templates)
    : config_(std::move(config)), remote_(remote), templates_(templates) {
  config_.validate();
  if (config_.kind == ScorerKind::LLM && (!remote_ || !templates_)) {
    throw Error("configuration error",
                "LLM scorer needs a remote extractor config and templates");
  }
}

double Scorer::llm_score(const JobFeatures& job,
                         const ResumeFeatures& resume) const {
  LlmClient client(*remote_);
  const std::string prompt = render_template(
      templates_->score_prompt,
      {{"job_json", Json(job).dump(2)}, {"resume_json", Json(resume).dump(2)}});
  // one re-ask when the reply is not a number in [0, 100]
  std::string last_error;
  for (int ask = 0; ask < 2; ++ask) {
    std::string reply = trim(client.complete(prompt));
    char* end = nullptr;
    double value = std::strtod(reply.c_str(), &end);
    if (!reply.empty() && end && *end == '\0' && value >= 0.0 &&
        value <= 100.0) {
      return value;
    }
    last_error = "non-numeric or out-of-range reply: '" + reply + "'";
  }
  throw Error("scorer failure", last_error);
}

SimilarityScore Scorer::score(const JobFeatures& job,
                              const ResumeFeatures& resume) const {
  double value = config_.kind == ScorerKind::Baseline
                     ? baseline_score(job, resume, config_)
                     : llm_score(job, resume);
  return SimilarityScore::checked(job.job_id, resume.resume_id, value,
                                  config_.kind, now_utc());
}

Ranking rank(const std::vector<SimilarityScore>& scores,
             const std::map<std::string, UtcSeconds>& receipt_times) {
  Ranking out;
  if (scores.empty()) return out;
  out.job_id = scores.front().job_id;
  std::set<std::string> ids;
  for (const auto& s : scores) {
    if (s.job_id != out.job_id) {
      throw Error("ranking invalid", "mixed job ids");
    }
    if (!ids.insert(s.resume_id.value).second) {
      throw Error("ranking invalid", "duplicate resume " + s.resume_id.value);
    }
  }
  std::vector<SimilarityScore> sorted = scores;
  auto receipt = [&](const SimilarityScore& s) {
    auto it = receipt_times.find(s.resume_id.value);
    return it == receipt_times.end() ? UtcSeconds{} : it->second;
  };
  std::sort(sorted.begin(), sorted.end(),
            [&](const SimilarityScore& a, const SimilarityScore& b) {
              if (a.value != b.value) return a.value > b.value;
              UtcSeconds ra = receipt(a);
              UtcSeconds rb = receipt(b);
              if (ra != rb) return ra < rb;
              return a.resume_id.value < b.resume_id.value;
            });
  out.entries.reserve(sorted.size());
  for (const auto& s : sorted) {
    out.entries.push_back(RankEntry{s.resume_id, s.value});
  }
  return out;
}

SelectedCandidates select_top_k(const Ranking& ranking, int k) {
  if (k < 1) throw Error("selection invalid", "k must be >= 1");
  SelectedCandidates out;
  out.job_id = ranking.job_id;
  out.k = k;
  const std::size_t n =
      std::min<std::size_t>(static_cast<std::size_t>(k), ranking.entries.size());
  out.selected.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.selected.push_back(ranking.entries[i].resume_id);
  }
  return out;
}

}  // namespace mlar
