#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mlar/bench.hpp"
#include "mlar/corpus.hpp"
#include "mlar/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

// exit codes: 0 ok, 1 configuration error, 2 runtime failure
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

mlar::PipelineConfig load_config(const std::string& path) {
  return mlar::PipelineConfig::load_file(path);
}

int cmd_init(const std::string& root_arg, const std::string& templates_src) {
  // absolute paths keep the config usable from any working directory
  fs::path root = fs::absolute(root_arg);
  fs::create_directories(root / "inbox" / "jobs");
  fs::create_directories(root / "inbox" / "resumes");

  fs::path templates_dst = root / "templates";
  fs::path src(templates_src);
  if (!fs::is_directory(src)) {
    std::cerr << "templates directory not found: " << src
              << " (pass --templates)\n";
    return kConfigError;
  }
  fs::create_directories(templates_dst);
  for (const auto& entry : fs::directory_iterator(src)) {
    if (entry.is_regular_file()) {
      fs::copy_file(entry.path(), templates_dst / entry.path().filename(),
                    fs::copy_options::overwrite_existing);
    }
  }

  mlar::PipelineConfig config;
  config.store_root = (root / "store").string();
  config.jobs_dir = (root / "inbox" / "jobs").string();
  config.resumes_dir = (root / "inbox" / "resumes").string();
  config.templates_dir = templates_dst.string();
  config.mail.outbox_path = (root / "store" / "outbox.jsonl").string();
  config.save_file(root / "mlar.json");
  mlar::Store store(config.store_root);  // creates the collection layout

  std::cout << "initialized " << root << "\n"
            << "config: " << (root / "mlar.json") << "\n";
  return kOk;
}

void apply_global_flags(mlar::PipelineConfig& config, bool live_mail,
                        bool match_all) {
  if (match_all) config.match_all_departments = true;
  if (live_mail) {
    config.mail.mode = mlar::MailMode::Smtp;
  } else {
    config.mail.mode = mlar::MailMode::DryRun;
  }
}

int cmd_run_once(const std::string& config_path, bool live_mail,
                 bool match_all, bool kill_after_pass) {
  mlar::PipelineConfig config = load_config(config_path);
  apply_global_flags(config, live_mail, match_all);
  mlar::Pipeline pipeline(config);
  mlar::RunReport report = pipeline.run_once();
  std::cout << report.to_json().dump(2) << "\n";
  if (kill_after_pass) {
    std::fflush(nullptr);
    raise(SIGKILL);  // crash-injection hook for restart-safety tests
  }
  return kOk;
}

int cmd_watch(const std::string& config_path, bool live_mail, bool match_all) {
  mlar::PipelineConfig config = load_config(config_path);
  apply_global_flags(config, live_mail, match_all);
  mlar::Pipeline pipeline(config);
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "watching " << config.jobs_dir << " and " << config.resumes_dir
            << " every " << config.poll_interval_s << " s\n";
  return pipeline.run_loop(g_stop);
}

int cmd_parse(const std::string& config_path, const std::string& file,
              const std::string& kind) {
  mlar::PipelineConfig config = load_config(config_path);
  mlar::Templates templates = mlar::Templates::load(config.templates_dir);
  fs::path path(file);
  std::string bytes = mlar::read_file_bytes(path);
  mlar::RawDocument doc;
  doc.id = mlar::DocumentId::of_bytes(bytes);
  doc.kind = mlar::parse_doc_kind(kind);
  doc.source_path = path;
  doc.text = mlar::extract_text(path);
  doc.received_at = mlar::now_utc();
  mlar::Json out;
  if (doc.kind == mlar::DocKind::Job) {
    out = mlar::parse_job(doc, config.extractor, templates);
  } else {
    out = mlar::parse_resume(doc, config.extractor, templates);
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_match(const std::string& config_path, const std::string& job_id,
              bool match_all) {
  mlar::PipelineConfig config = load_config(config_path);
  if (match_all) config.match_all_departments = true;
  mlar::Store store(config.store_root);
  auto job = store.get_job(mlar::DocumentId{job_id});
  if (!job) {
    std::cerr << "job " << job_id << " not found in the store\n";
    return kRuntimeError;
  }
  mlar::Templates templates = mlar::Templates::load(config.templates_dir);
  mlar::Scorer scorer(config.scorer, &config.extractor, &templates);
  auto candidates = config.match_all_departments
                        ? store.all_resumes()
                        : store.resumes_by_department(job->features.department);
  std::vector<mlar::SimilarityScore> scores;
  std::map<std::string, mlar::UtcSeconds> receipts;
  for (const auto& candidate : candidates) {
    scores.push_back(scorer.score(job->features, candidate.features));
    receipts[candidate.features.resume_id.value] = candidate.received_at;
  }
  mlar::Ranking ranking = mlar::rank(scores, receipts);
  mlar::SelectedCandidates selected = mlar::select_top_k(ranking, config.k);
  store.put_match(job->features.job_id, ranking, selected);
  mlar::Json out{{"job_id", job_id}};
  mlar::Json entries = mlar::Json::array();
  for (const auto& e : ranking.entries) {
    entries.push_back(mlar::Json::array({e.resume_id.value, e.value}));
  }
  out["ranking"] = entries;
  mlar::Json chosen = mlar::Json::array();
  for (const auto& id : selected.selected) chosen.push_back(id.value);
  out["selected"] = chosen;
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_bench(const std::string& config_path, const std::string& corpus,
              const std::string& stages_arg, const std::string& baseline_file,
              int repeat, const std::string& label,
              const std::string& out_prefix) {
  mlar::PipelineConfig config = load_config(config_path);
  mlar::BenchOptions options;
  options.repeat = repeat;
  options.label = label;
  options.stages.clear();
  for (const auto& stage : mlar::split_trimmed(stages_arg, ',')) {
    if (stage != "parse" && stage != "match" && stage != "notify") {
      std::cerr << "unknown stage: " << stage << "\n";
      return kConfigError;
    }
    options.stages.insert(stage);
  }
  if (options.stages.empty()) {
    std::cerr << "no stages selected\n";
    return kConfigError;
  }

  mlar::BenchResult result = mlar::run_bench(config, corpus, options);

  std::vector<mlar::TimingRecord> records;
  std::map<std::string, double> overrides;
  if (!baseline_file.empty()) {
    mlar::BaselineRecords baseline = mlar::load_baseline_records(baseline_file);
    records = std::move(baseline.records);
    overrides = std::move(baseline.overrides);
  }
  records.push_back(result.record);
  mlar::BenchmarkReport report =
      mlar::make_report(std::move(records), result.record.system_label,
                        std::move(overrides));

  std::string text = mlar::render_report_text(report);
  mlar::Json json = mlar::render_report_json(report);
  mlar::Json stage_json = mlar::Json::array();
  std::vector<double> totals;
  for (const auto& run : result.runs) {
    stage_json.push_back(mlar::Json{{"parse", run.parse},
                                    {"match", run.match},
                                    {"notify", run.notify}});
    double total = 0;
    if (options.stages.count("parse")) total += run.parse;
    if (options.stages.count("match")) total += run.match;
    if (options.stages.count("notify")) total += run.notify;
    totals.push_back(total);
  }
  json["stage_breakdown"] = stage_json;
  json["runs"] = mlar::Json{
      {"count", totals.size()},
      {"min_total_seconds", *std::min_element(totals.begin(), totals.end())},
      {"mean_total_seconds", result.record.total_seconds},
      {"max_total_seconds", *std::max_element(totals.begin(), totals.end())}};

  mlar::write_file_bytes(out_prefix + ".txt", text);
  mlar::write_file_bytes(out_prefix + ".json", json.dump(2) + "\n");
  std::cout << text;
  std::cout << "written: " << out_prefix << ".txt, " << out_prefix
            << ".json\n";
  return kOk;
}

int cmd_report(const std::string& config_path) {
  mlar::PipelineConfig config = load_config(config_path);
  mlar::Store store(config.store_root);
  mlar::Json departments = mlar::Json::object();
  int resumes = 0;
  for (mlar::Department d : mlar::all_departments()) {
    int n = static_cast<int>(store.query_resumes_by_department(d).size());
    if (n > 0) departments[mlar::to_label(d)] = n;
    resumes += n;
  }
  mlar::Json ledger_counts = mlar::Json::object();
  for (const auto& entry : store.read_ledger()) {
    std::string key = entry.status;
    ledger_counts[key] = ledger_counts.value(key, 0) + 1;
  }
  mlar::Json out{{"jobs", store.all_jobs().size()},
                 {"resumes", resumes},
                 {"resumes_by_department", departments},
                 {"matches", store.list("matches").size()},
                 {"notifications", ledger_counts},
                 {"audit_entries", store.read_audit().size()}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_gen_corpus(const std::string& out_dir, int jobs, int resumes,
                   unsigned seed, double email_fraction, double pdf_fraction) {
  mlar::CorpusOptions options;
  options.jobs = jobs;
  options.resumes = resumes;
  options.seed = seed;
  options.email_fraction = email_fraction;
  options.pdf_fraction = pdf_fraction;
  mlar::CorpusTruth truth = mlar::write_corpus(out_dir, options);
  std::cout << "wrote " << truth.jobs.size() << " jobs and "
            << truth.resumes.size() << " resumes under " << out_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MLAR: LLM-assisted applicant tracking pipeline"};
  app.require_subcommand(1);

  std::string config_path = "mlar.json";
  bool live_mail = false;
  bool match_all = false;
  app.add_option("--config", config_path, "pipeline config file")
      ->envname("MLAR_CONFIG");
  app.add_flag("--live-mail", live_mail,
               "leave dry-run mode and submit real SMTP mail");
  app.add_flag("--match-all-departments", match_all,
               "score jobs against every stored resume");

  auto* init = app.add_subcommand("init", "create a workspace layout");
  std::string init_root;
  std::string templates_src = "templates";
  init->add_option("root", init_root, "workspace root directory")->required();
  init->add_option("--templates", templates_src,
                   "template directory to copy from");

  auto* run_once = app.add_subcommand("run-once", "run a single pipeline pass");
  bool kill_after_pass = false;
  run_once->add_flag("--kill-after-pass", kill_after_pass)->group("");

  app.add_subcommand("watch", "poll the inboxes continuously");

  auto* parse = app.add_subcommand("parse", "parse one document to features");
  std::string parse_file;
  std::string parse_kind;
  parse->add_option("file", parse_file, "document path")->required();
  parse->add_option("--kind", parse_kind, "job or resume")->required();

  auto* match = app.add_subcommand("match", "rank stored resumes for a job");
  std::string match_job_id;
  match->add_option("job-id", match_job_id, "job document id")->required();

  auto* bench = app.add_subcommand("bench", "benchmark pipeline throughput");
  std::string corpus_dir;
  std::string stages = "parse,match,notify";
  std::string baseline_file;
  std::string bench_label = "MLAR";
  std::string bench_out = "bench_report";
  int repeat = 1;
  bench->add_option("--corpus", corpus_dir, "corpus directory")->required();
  bench->add_option("--stages", stages, "comma list of parse,match,notify");
  bench->add_option("--baseline-records", baseline_file,
                    "JSON file with external platform timings");
  bench->add_option("--repeat", repeat, "number of runs")->check(CLI::PositiveNumber);
  bench->add_option("--label", bench_label, "system label for this run");
  bench->add_option("--out", bench_out, "output path prefix");

  app.add_subcommand("report", "summarize the store contents");

  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus");
  std::string gen_out;
  int gen_jobs = 24;
  int gen_resumes = 240;
  unsigned gen_seed = 42;
  double gen_email_fraction = 1.0;
  double gen_pdf_fraction = 0.0;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--jobs", gen_jobs, "job count");
  gen->add_option("--resumes", gen_resumes, "resume count");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--email-fraction", gen_email_fraction,
                  "fraction of resumes with an email");
  gen->add_option("--pdf-fraction", gen_pdf_fraction,
                  "fraction of resumes written as PDF");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (init->parsed()) return cmd_init(init_root, templates_src);
    if (run_once->parsed()) {
      return cmd_run_once(config_path, live_mail, match_all, kill_after_pass);
    }
    if (app.get_subcommand("watch")->parsed()) {
      return cmd_watch(config_path, live_mail, match_all);
    }
    if (parse->parsed()) return cmd_parse(config_path, parse_file, parse_kind);
    if (match->parsed()) return cmd_match(config_path, match_job_id, match_all);
    if (bench->parsed()) {
      return cmd_bench(config_path, corpus_dir, stages, baseline_file, repeat,
                       bench_label, bench_out);
    }
    if (app.get_subcommand("report")->parsed()) return cmd_report(config_path);
    if (gen->parsed()) {
      return cmd_gen_corpus(gen_out, gen_jobs, gen_resumes, gen_seed,
                            gen_email_fraction, gen_pdf_fraction);
    }
  } catch (const mlar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string_view(e.code()) == "configuration error" ? kConfigError
                                                               : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
