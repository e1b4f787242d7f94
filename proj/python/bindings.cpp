#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlar/bench.hpp"
#include "mlar/corpus.hpp"
#include "mlar/match.hpp"
#include "mlar/pdf.hpp"
#include "mlar/pipeline.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const mlar::Json& j) {
  switch (j.type()) {
    case mlar::Json::value_t::null:
      return py::none();
    case mlar::Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case mlar::Json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case mlar::Json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case mlar::Json::value_t::number_float:
      return py::float_(j.get<double>());
    case mlar::Json::value_t::string:
      return py::str(j.get<std::string>());
    case mlar::Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case mlar::Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default:
      return py::none();
  }
}

mlar::Json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    mlar::Json out = mlar::Json::array();
    for (const auto& item : obj) out.push_back(py_to_json(item));
    return out;
  }
  if (py::isinstance<py::dict>(obj)) {
    mlar::Json out = mlar::Json::object();
    for (const auto& [key, value] : obj.cast<py::dict>()) {
      out[key.cast<std::string>()] = py_to_json(value);
    }
    return out;
  }
  throw py::type_error("unsupported value for JSON conversion");
}

mlar::JobFeatures job_from_py(const py::dict& d) {
  mlar::Json j = py_to_json(d);
  return j.get<mlar::JobFeatures>();
}

mlar::ResumeFeatures resume_from_py(const py::dict& d) {
  mlar::Json j = py_to_json(d);
  return j.get<mlar::ResumeFeatures>();
}

mlar::ScorerConfig weights_from_args(double w_skills, double w_experience,
                                     double w_education) {
  mlar::ScorerConfig c;
  c.w_skills = w_skills;
  c.w_experience = w_experience;
  c.w_education = w_education;
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_mlar, m) {
  m.doc() = "Core operations of the mlar recruitment pipeline";

  m.def("normalize_skill",
        [](const std::string& raw) { return mlar::normalize_skill(raw); },
        py::arg("raw"),
        "Lowercase, trim and collapse internal whitespace. Raises on empty.");

  m.def("parse_department",
        [](const std::string& label) {
          return mlar::to_label(mlar::parse_department(label));
        },
        py::arg("label"), "Canonical label for one of the 24 departments.");

  m.def("departments", [] {
    std::vector<std::string> out;
    for (mlar::Department d : mlar::all_departments()) {
      out.push_back(mlar::to_label(d));
    }
    return out;
  });

  m.def("document_id",
        [](const py::bytes& data) {
          return mlar::DocumentId::of_bytes(std::string(data)).value;
        },
        py::arg("data"), "SHA-256 content hash used as the document id.");

  m.def("parse_job_text",
        [](const std::string& text) {
          mlar::RawDocument doc;
          doc.kind = mlar::DocKind::Job;
          doc.text = text;
          doc.id = mlar::DocumentId::of_bytes(text);
          mlar::Json raw = mlar::rules_extract(doc, mlar::SchemaKind::JobSchema);
          return json_to_py(mlar::Json(mlar::validate_job(raw, doc.id)));
        },
        py::arg("text"),
        "Rules-extract job features from labeled text.");

  m.def("parse_resume_text",
        [](const std::string& text) {
          mlar::RawDocument doc;
          doc.kind = mlar::DocKind::Resume;
          doc.text = text;
          doc.id = mlar::DocumentId::of_bytes(text);
          mlar::Json raw =
              mlar::rules_extract(doc, mlar::SchemaKind::ResumeSchema);
          return json_to_py(mlar::Json(mlar::validate_resume(raw, doc.id)));
        },
        py::arg("text"),
        "Rules-extract resume features from labeled text.");

  m.def("repair_json",
        [](const std::string& text) {
          return json_to_py(mlar::repair_json(text));
        },
        py::arg("text"),
        "Parse the first top-level JSON object embedded in text.");

  m.def("extract_pdf_text",
        [](const py::bytes& data) {
          return mlar::extract_pdf_text(std::string(data));
        },
        py::arg("data"), "Text layer of a PDF, form feeds between pages.");

  m.def("baseline_score",
        [](const py::dict& job, const py::dict& resume, double w_skills,
           double w_experience, double w_education) {
          return mlar::baseline_score(job_from_py(job), resume_from_py(resume),
                                      weights_from_args(w_skills, w_experience,
                                                        w_education));
        },
        py::arg("job"), py::arg("resume"), py::arg("w_skills") = 0.5,
        py::arg("w_experience") = 0.25, py::arg("w_education") = 0.25,
        "Deterministic similarity in [0, 100].");

  m.def("rank_and_select",
        [](const py::dict& job, const py::list& resumes, int k,
           double w_skills, double w_experience, double w_education) {
          mlar::JobFeatures j = job_from_py(job);
          mlar::Scorer scorer(
              mlar::ScorerConfig{mlar::ScorerKind::Baseline, w_skills,
                                 w_experience, w_education});
          std::vector<mlar::SimilarityScore> scores;
          std::map<std::string, mlar::UtcSeconds> receipts;
          for (const auto& item : resumes) {
            mlar::ResumeFeatures r =
                resume_from_py(item.cast<py::dict>());
            scores.push_back(scorer.score(j, r));
          }
          mlar::Ranking ranking = mlar::rank(scores, receipts);
          mlar::SelectedCandidates selected = mlar::select_top_k(ranking, k);
          mlar::Json out{{"job_id", j.job_id.value}};
          mlar::Json entries = mlar::Json::array();
          for (const auto& e : ranking.entries) {
            entries.push_back(mlar::Json::array({e.resume_id.value, e.value}));
          }
          out["ranking"] = entries;
          mlar::Json chosen = mlar::Json::array();
          for (const auto& id : selected.selected) chosen.push_back(id.value);
          out["selected"] = chosen;
          return json_to_py(out);
        },
        py::arg("job"), py::arg("resumes"), py::arg("k") = 3,
        py::arg("w_skills") = 0.5, py::arg("w_experience") = 0.25,
        py::arg("w_education") = 0.25,
        "Score, rank and select the top k resumes for a job.");

  m.def("delta_t",
        [](double benchmark_total, double mlar_total) {
          auto [seconds, percent] =
              mlar::delta_t(mlar::TimingRecord{"benchmark", benchmark_total, 1},
                            mlar::TimingRecord{"mlar", mlar_total, 1});
          return py::make_tuple(seconds, percent);
        },
        py::arg("benchmark_total"), py::arg("mlar_total"),
        "(delta seconds, percent of the benchmark total).");

  m.def("per_resume",
        [](double total_seconds, int resume_count) {
          return mlar::per_resume(
              mlar::TimingRecord{"", total_seconds, resume_count});
        },
        py::arg("total_seconds"), py::arg("resume_count"),
        "Per-resume seconds, rounded to 2 decimals.");

  m.def("render_report",
        [](const py::list& records, const std::string& subject,
           const py::dict& overrides) {
          std::vector<mlar::TimingRecord> rs;
          for (const auto& item : records) {
            py::dict d = item.cast<py::dict>();
            rs.push_back(mlar::TimingRecord{
                d["system_label"].cast<std::string>(),
                d["total_seconds"].cast<double>(),
                d["resume_count"].cast<int>()});
          }
          std::map<std::string, double> ov;
          for (const auto& [key, value] : overrides) {
            ov[key.cast<std::string>()] = value.cast<double>();
          }
          return mlar::render_report_text(
              mlar::make_report(std::move(rs), subject, std::move(ov)));
        },
        py::arg("records"), py::arg("subject") = std::string{},
        py::arg("overrides") = py::dict(),
        "Fixed-width comparison table for timing records.");

  m.def("run_once",
        [](const std::string& config_path) {
          mlar::PipelineConfig config =
              mlar::PipelineConfig::load_file(config_path);
          mlar::Pipeline pipeline(config);
          return json_to_py(pipeline.run_once().to_json());
        },
        py::arg("config_path"), "One pipeline pass; returns the run report.");

  m.def("write_corpus",
        [](const std::string& out_dir, int jobs, int resumes, unsigned seed,
           double email_fraction, double pdf_fraction) {
          mlar::CorpusOptions options;
          options.jobs = jobs;
          options.resumes = resumes;
          options.seed = seed;
          options.email_fraction = email_fraction;
          options.pdf_fraction = pdf_fraction;
          mlar::CorpusTruth truth = mlar::write_corpus(out_dir, options);
          return py::make_tuple(truth.jobs.size(), truth.resumes.size());
        },
        py::arg("out_dir"), py::arg("jobs") = 24, py::arg("resumes") = 240,
        py::arg("seed") = 42u, py::arg("email_fraction") = 1.0,
        py::arg("pdf_fraction") = 0.0,
        "Write a synthetic labeled corpus; returns (jobs, resumes).");

#ifdef VERSION_INFO
#define MLAR_STR2(x) #x
#define MLAR_STR(x) MLAR_STR2(x)
  m.attr("__version__") = MLAR_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
