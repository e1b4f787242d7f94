#include "mlar/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <thread>

namespace mlar {

void PipelineConfig::validate() const {
  if (k < 1) throw Error("configuration error", "k must be >= 1");
  if (poll_interval_s <= 0) {
    throw Error("configuration error", "poll_interval_s must be positive");
  }
  extractor.validate();
  scorer.validate();
  mail.validate();
  if (scorer.kind == ScorerKind::LLM &&
      extractor.provider != ExtractorKind::Remote) {
    throw Error("configuration error",
                "LLM scorer requires the remote extractor endpoint");
  }
}

Json PipelineConfig::to_json() const {
  return Json{{"store_root", store_root.string()},
              {"jobs_dir", jobs_dir.string()},
              {"resumes_dir", resumes_dir.string()},
              {"poll_interval_s", poll_interval_s},
              {"extractor", extractor.to_json()},
              {"scorer", scorer.to_json()},
              {"mail", mail.to_json()},
              {"k", k},
              {"match_all_departments", match_all_departments},
              {"notify_hr", notify_hr},
              {"templates_dir", templates_dir.string()}};
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  PipelineConfig c;
  c.store_root = j.value("store_root", std::string{"store"});
  c.jobs_dir = j.value("jobs_dir", std::string{"inbox/jobs"});
  c.resumes_dir = j.value("resumes_dir", std::string{"inbox/resumes"});
  c.poll_interval_s = j.value("poll_interval_s", 5.0);
  if (j.contains("extractor")) {
    c.extractor = ExtractorConfig::from_json(j.at("extractor"));
  }
  if (j.contains("scorer")) c.scorer = ScorerConfig::from_json(j.at("scorer"));
  if (j.contains("mail")) c.mail = MailTransportConfig::from_json(j.at("mail"));
  c.k = j.value("k", 3);
  c.match_all_departments = j.value("match_all_departments", false);
  c.notify_hr = j.value("notify_hr", false);
  c.templates_dir = j.value("templates_dir", std::string{"templates"});
  return c;
}

PipelineConfig PipelineConfig::load_file(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file_bytes(path));
  } catch (const std::exception& e) {
    throw Error("configuration error",
                path.string() + ": " + std::string(e.what()));
  }
  PipelineConfig c = from_json(j);
  c.validate();
  return c;
}

void PipelineConfig::save_file(const std::filesystem::path& path) const {
  write_file_bytes(path, to_json().dump(2) + "\n");
}

Json RunReport::to_json() const {
  return Json{{"jobs_processed", jobs_processed},
              {"resumes_processed", resumes_processed},
              {"matches_computed", matches_computed},
              {"notifications",
               Json{{"sent", notifications.sent},
                    {"dry_run", notifications.dry_run},
                    {"skipped", notifications.skipped},
                    {"failed", notifications.failed}}},
              {"errors", errors},
              {"wall_time_s", wall_time_s},
              {"per_resume_time_s", per_resume_time_s}};
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      store_(config_.store_root),
      templates_(Templates::load(config_.templates_dir)) {
  config_.validate();
  inbox_.jobs_dir = config_.jobs_dir;
  inbox_.resumes_dir = config_.resumes_dir;
  inbox_.poll_interval_s = config_.poll_interval_s;
  store_.load_inbox_state(inbox_);
  for (const auto& entry : store_.read_ledger()) {
    attempted_.insert({entry.job_id, entry.resume_id});
  }
}

void Pipeline::audit(const std::string& operation,
                     std::vector<std::string> ids, AuditOutcome outcome,
                     std::string detail) {
  store_.append_audit(AuditLogEntry{now_utc(), operation, std::move(ids),
                                    outcome, std::move(detail)});
}

bool Pipeline::ledger_contains(const std::string& job_id,
                               const std::string& resume_id) const {
  return attempted_.count({job_id, resume_id}) > 0;
}

void Pipeline::ledger_add(const std::string& job_id,
                          const std::string& resume_id,
                          const std::string& status) {
  store_.append_ledger(
      Store::LedgerEntry{job_id, resume_id, status, now_utc()});
  attempted_.insert({job_id, resume_id});
}

std::vector<Store::StoredResume> Pipeline::candidates_for(
    const JobFeatures& job) const {
  if (config_.match_all_departments) return store_.all_resumes();
  return store_.resumes_by_department(job.department);
}

Pipeline::ParsedBatch Pipeline::ingest_and_parse() {
  ParsedBatch batch;
  AuditSink sink = [this](const AuditLogEntry& e) { store_.append_audit(e); };
  std::vector<RawDocument> docs = collect_new_documents(inbox_, sink);

  struct Slot {
    std::optional<Store::StoredJob> job;
    std::optional<Store::StoredResume> resume;
    std::string error;
    std::string id;
  };
  std::vector<Slot> slots(docs.size());

  // Extraction fans out to a bounded pool; failures stay per-document.
  parallel_for(docs.size(),
               static_cast<std::size_t>(config_.extractor.max_concurrent_requests),
               [&](std::size_t i) {
                 const RawDocument& doc = docs[i];
                 slots[i].id = doc.id.value;
                 try {
                   if (doc.kind == DocKind::Job) {
                     JobFeatures job =
                         parse_job(doc, config_.extractor, templates_);
                     store_.put_job(job, doc.received_at);
                     slots[i].job =
                         Store::StoredJob{std::move(job), doc.received_at};
                   } else {
                     ResumeFeatures resume =
                         parse_resume(doc, config_.extractor, templates_);
                     store_.put_resume(resume, doc.received_at);
                     slots[i].resume = Store::StoredResume{std::move(resume),
                                                           doc.received_at};
                   }
                 } catch (const Error& e) {
                   // extraction failures are contained to the document;
                   // store failures abort the whole pass
                   if (std::string_view(e.code()) == "io failure") throw;
                   slots[i].error = e.what();
                 } catch (const std::exception& e) {
                   slots[i].error = e.what();
                 }
               });

  for (Slot& slot : slots) {
    if (!slot.error.empty()) {
      audit("parse", {slot.id}, AuditOutcome::Error, slot.error);
      batch.errors.push_back(slot.error);
    } else if (slot.job) {
      audit("parse", {slot.id}, AuditOutcome::Ok, "job");
      batch.new_jobs.push_back(std::move(*slot.job));
    } else if (slot.resume) {
      audit("parse", {slot.id}, AuditOutcome::Ok, "resume");
      batch.new_resumes.push_back(std::move(*slot.resume));
    }
  }
  store_.save_inbox_state(inbox_);
  return batch;
}

Pipeline::MatchOutcome Pipeline::match_affected(const ParsedBatch& batch) {
  MatchOutcome outcome;

  // A new job is matched against everything in scope; a new resume triggers
  // re-matching of every stored job whose scope it enters.
  std::map<std::string, Store::StoredJob> affected;
  for (const auto& job : batch.new_jobs) {
    affected.emplace(job.features.job_id.value, job);
  }
  if (!batch.new_resumes.empty()) {
    std::set<Department> touched;
    for (const auto& resume : batch.new_resumes) {
      touched.insert(resume.features.predicted_department);
    }
    for (auto& job : store_.all_jobs()) {
      if (config_.match_all_departments ||
          touched.count(job.features.department)) {
        affected.emplace(job.features.job_id.value, std::move(job));
      }
    }
  }

  Scorer scorer(config_.scorer, &config_.extractor, &templates_);
  for (auto& [job_id, stored_job] : affected) {
    ++outcome.jobs_considered;
    const JobFeatures& job = stored_job.features;
    std::vector<Store::StoredResume> candidates = candidates_for(job);
    if (candidates.empty()) continue;

    std::vector<std::optional<SimilarityScore>> scores(candidates.size());
    std::vector<std::string> score_errors(candidates.size());
    parallel_for(
        candidates.size(),
        static_cast<std::size_t>(config_.extractor.max_concurrent_requests),
        [&](std::size_t i) {
          try {
            scores[i] = scorer.score(job, candidates[i].features);
          } catch (const std::exception& e) {
            score_errors[i] = e.what();
          }
        });

    std::vector<SimilarityScore> usable;
    std::map<std::string, UtcSeconds> receipt_times;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (scores[i]) {
        usable.push_back(*scores[i]);
        receipt_times[candidates[i].features.resume_id.value] =
            candidates[i].received_at;
      } else {
        audit("score",
              {job_id, candidates[i].features.resume_id.value},
              AuditOutcome::Error, score_errors[i]);
        outcome.errors.push_back(score_errors[i]);
      }
    }
    outcome.scores_computed += static_cast<int>(usable.size());
    audit("score", {job_id}, AuditOutcome::Ok,
          std::to_string(usable.size()) + " candidates scored");
    if (usable.empty()) continue;

    MatchOutcome::JobMatch match;
    match.job = stored_job;
    match.ranking = rank(usable, receipt_times);
    match.selected = select_top_k(match.ranking, config_.k);
    for (const DocumentId& id : match.selected.selected) {
      for (const auto& candidate : candidates) {
        if (candidate.features.resume_id == id) {
          match.selected_resumes.push_back(candidate.features);
          break;
        }
      }
    }
    store_.put_match(job.job_id, match.ranking, match.selected);
    audit("rank", {job_id}, AuditOutcome::Ok,
          "top " + std::to_string(match.selected.selected.size()) +
              " of " + std::to_string(match.ranking.entries.size()));
    outcome.matches.push_back(std::move(match));
  }
  return outcome;
}

NotificationCounts Pipeline::notify_selected(const MatchOutcome& outcome) {
  NotificationCounts counts;
  for (const auto& match : outcome.matches) {
    const JobFeatures& job = match.job.features;
    for (std::size_t i = 0; i < match.selected.selected.size(); ++i) {
      const DocumentId& resume_id = match.selected.selected[i];
      if (ledger_contains(job.job_id.value, resume_id.value)) continue;
      const ResumeFeatures* resume = i < match.selected_resumes.size()
                                         ? &match.selected_resumes[i]
                                         : nullptr;
      if (!resume) continue;

      if (!resume->email) {
        ledger_add(job.job_id.value, resume_id.value, "skipped");
        audit("notify", {job.job_id.value, resume_id.value},
              AuditOutcome::Skipped,
              "no email for " + resume->candidate_name);
        ++counts.skipped;
        continue;
      }
      NotificationMessage message =
          generate_response(*resume, job, templates_.notification_body);
      // write-ahead: the pair is burned before the transport runs, so a
      // crash between send and bookkeeping can lose a message but never
      // duplicate one
      ledger_add(job.job_id.value, resume_id.value, "attempted");
      DeliveryReceipt receipt = send(message, config_.mail);
      switch (receipt.status) {
        case DeliveryStatus::Sent:
          ++counts.sent;
          audit("notify", {job.job_id.value, resume_id.value},
                AuditOutcome::Ok, "sent to " + message.recipient);
          break;
        case DeliveryStatus::DryRun:
          ++counts.dry_run;
          audit("notify", {job.job_id.value, resume_id.value},
                AuditOutcome::Ok, "dry-run to " + message.recipient);
          break;
        case DeliveryStatus::Failed:
          ++counts.failed;
          ledger_add(job.job_id.value, resume_id.value, "failed");
          audit("notify", {job.job_id.value, resume_id.value},
                AuditOutcome::Error, receipt.detail);
          break;
      }
    }
  }
  return counts;
}

RunReport Pipeline::run_once() {
  auto start = std::chrono::steady_clock::now();
  RunReport report;

  ParsedBatch batch = ingest_and_parse();
  report.resumes_processed = static_cast<int>(batch.new_resumes.size());
  report.errors = batch.errors;

  MatchOutcome outcome = match_affected(batch);
  report.jobs_processed = outcome.jobs_considered;
  report.matches_computed = outcome.scores_computed;
  report.errors.insert(report.errors.end(), outcome.errors.begin(),
                       outcome.errors.end());

  report.notifications = notify_selected(outcome);

  // HR notifications forward new postings to the address on the job.
  if (config_.notify_hr) {
    for (const auto& job : batch.new_jobs) {
      const JobFeatures& f = job.features;
      if (!f.hr_notify_email) continue;
      if (ledger_contains(f.job_id.value, "")) continue;
      NotificationMessage message;
      message.job_id = f.job_id;
      message.recipient = *f.hr_notify_email;
      message.subject = "New job posting: " + f.title;
      message.body = "A new posting was processed.\n\nTitle: " + f.title +
                     "\nDepartment: " + to_label(f.department) +
                     "\nExperience: " + f.experience_level +
                     "\nEducation: " + f.education + "\n";
      ledger_add(f.job_id.value, "", "attempted");
      DeliveryReceipt receipt = send(message, config_.mail);
      if (receipt.status == DeliveryStatus::Failed) {
        ledger_add(f.job_id.value, "", "failed");
      }
      audit("hr_notify", {f.job_id.value},
            receipt.status == DeliveryStatus::Failed ? AuditOutcome::Error
                                                     : AuditOutcome::Ok,
            "to " + message.recipient);
    }
  }

  auto end = std::chrono::steady_clock::now();
  report.wall_time_s = std::chrono::duration<double>(end - start).count();
  report.per_resume_time_s =
      report.resumes_processed > 0
          ? report.wall_time_s / report.resumes_processed
          : 0.0;

  audit("pass", {}, AuditOutcome::Ok, report.to_json().dump());
  return report;
}

int Pipeline::run_loop(const std::atomic<bool>& stop) {
  int consecutive_failures = 0;
  while (!stop.load()) {
    try {
      run_once();
      consecutive_failures = 0;
    } catch (const std::exception& e) {
      ++consecutive_failures;
      try {
        audit("pass", {}, AuditOutcome::Error, e.what());
      } catch (...) {
        // the audit log itself may be the failing component
      }
      if (consecutive_failures >= 5) return 2;
    }
    // sleep in slices so a termination signal is honored promptly
    auto remaining = std::chrono::duration<double>(config_.poll_interval_s);
    while (remaining.count() > 0 && !stop.load()) {
      auto slice = std::min(remaining, std::chrono::duration<double>(0.05));
      std::this_thread::sleep_for(slice);
      remaining -= slice;
    }
  }
  return 0;
}

}  // namespace mlar
