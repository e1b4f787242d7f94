#include "mlar/corpus.hpp"

#include <algorithm>
#include <array>

#include "mlar/pdf.hpp"

namespace mlar {

namespace {

struct DepartmentProfile {
  const char* role;
  std::array<const char*, 6> skills;
};

// Indexed by Department; role names keep disjoint vocabulary from the
// generic roles below so the experience component stays predictable.
constexpr std::array<DepartmentProfile, kDepartmentCount> kProfiles = {{
    {"HR Generalist",
     {"onboarding", "payroll", "benefits administration", "recruiting",
      "hris", "employee relations"}},
    {"Product Designer",
     {"figma", "typography", "wireframing", "user research", "prototyping",
      "illustration"}},
    {"Systems Administrator",
     {"linux", "networking", "bash scripting", "virtualization", "monitoring",
      "active directory"}},
    {"Mathematics Teacher",
     {"lesson planning", "classroom management", "curriculum design",
      "grading", "tutoring", "assessment"}},
    {"Legal Advocate",
     {"litigation", "legal research", "contract drafting", "case management",
      "negotiation", "compliance law"}},
    {"Business Development Manager",
     {"lead generation", "crm", "market analysis", "partnerships",
      "cold outreach", "proposal writing"}},
    {"Registered Nurse",
     {"patient care", "triage", "medication administration", "phlebotomy",
      "charting", "infection control"}},
    {"Fitness Trainer",
     {"strength training", "nutrition planning", "group classes",
      "injury prevention", "cardio programming", "client assessment"}},
    {"Agronomy Technician",
     {"crop scouting", "irrigation", "soil sampling", "pest management",
      "harvest logistics", "farm machinery"}},
    {"Service Desk Agent",
     {"ticketing systems", "call handling", "escalation management",
      "crm tools", "sla tracking", "typing speed"}},
    {"Sales Executive",
     {"prospecting", "closing", "account management", "quota planning",
      "product demos", "objection handling"}},
    {"Strategy Consultant",
     {"stakeholder interviews", "financial modeling", "slide writing",
      "benchmarking", "workshop facilitation", "due diligence"}},
    {"Content Producer",
     {"video editing", "copywriting", "seo", "social analytics",
      "storyboarding", "audience growth"}},
    {"Automotive Mechanic",
     {"engine diagnostics", "brake service", "electrical troubleshooting",
      "preventive maintenance", "obd scanners", "transmission repair"}},
    {"Sous Chef",
     {"menu planning", "knife skills", "food safety", "inventory control",
      "plating", "sauce work"}},
    {"Financial Analyst",
     {"forecasting", "variance analysis", "excel modeling", "valuation",
      "budgeting", "sql reporting"}},
    {"Apparel Merchandiser",
     {"trend forecasting", "assortment planning", "vendor sourcing",
      "fit sessions", "markdown strategy", "textile knowledge"}},
    {"Platform Engineer",
     {"sql", "spark", "data modeling", "distributed systems", "kubernetes",
      "python"}},
    {"Staff Accountant",
     {"general ledger", "reconciliations", "accounts payable", "tax filing",
      "audit support", "gaap"}},
    {"Site Supervisor",
     {"blueprint reading", "scheduling", "safety compliance",
      "subcontractor management", "cost estimation", "quality inspection"}},
    {"Communications Specialist",
     {"press releases", "media relations", "crisis communication",
      "speech writing", "brand messaging", "event coordination"}},
    {"Credit Analyst",
     {"credit scoring", "loan underwriting", "risk assessment", "kyc",
      "financial statements", "portfolio review"}},
    {"Gallery Curator",
     {"exhibition planning", "art handling", "collection management",
      "grant writing", "installation design", "catalog writing"}},
    {"Flight Dispatcher",
     {"flight planning", "weather analysis", "fuel calculation",
      "notam review", "crew scheduling", "load planning"}},
}};

constexpr std::array<const char*, 4> kGenericRoles = {
    "Office Intern", "Warehouse Clerk", "Research Fellow",
    "Operations Assistant"};

constexpr std::array<const char*, 12> kFirstNames = {
    "Alex", "Sam",   "Jordan", "Casey", "Riley", "Morgan",
    "Avery", "Quinn", "Dana",   "Jamie", "Rowan", "Skyler"};

constexpr std::array<const char*, 12> kLastNames = {
    "Kim",    "Diaz",  "Okafor", "Novak",  "Haddad", "Larsen",
    "Fujita", "Mbeki", "Silva",  "Petrov", "Yilmaz", "Moreau"};

constexpr std::array<const char*, 5> kDegrees = {
    "BSc Computer Science", "BA Communications", "MSc Data Science",
    "Diploma in Operations", "BSc Business Administration"};

constexpr std::array<const char*, 3> kInstitutions = {
    "State University", "City College", "Polytechnic Institute"};

constexpr std::array<const char*, 4> kDescriptions = {
    "owned day to day delivery", "shipped quarterly initiatives",
    "supported a team of twelve", "ran process improvements"};

constexpr std::array<const char*, 5> kExperienceLevels = {
    "1+ years", "2+ years", "3+ years", "5+ years", "7+ years"};

constexpr std::array<const char*, 5> kPreferences = {
    "remote friendly", "hybrid schedule", "on-call rotation",
    "travel up to 20%", "shift flexibility"};

int pick(std::mt19937& rng, int bound) {
  return static_cast<int>(rng() % static_cast<unsigned>(bound));
}

bool chance(std::mt19937& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Case and spacing noise that the normalizer must undo.
std::string mangle_skill(std::mt19937& rng, const std::string& skill) {
  std::string out;
  switch (pick(rng, 3)) {
    case 0: out = skill; break;
    case 1: out = to_lower_ascii(skill); break;
    default:
      for (std::size_t i = 0; i < skill.size(); ++i) {
        char c = skill[i];
        if (i == 0 || skill[i - 1] == ' ') {
          c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        out.push_back(c);
      }
  }
  if (chance(rng, 0.3)) out = " " + out;
  if (chance(rng, 0.3)) out += "  ";
  std::size_t space = out.find(' ', 1);
  if (chance(rng, 0.25) && space != std::string::npos && space + 1 < out.size()) {
    out.insert(space, " ");
  }
  return out;
}

std::string mangle_label(std::mt19937& rng, const std::string& label) {
  switch (pick(rng, 3)) {
    case 0: return label;
    case 1: return to_lower_ascii(label);
    default: {
      std::string upper = label;
      for (char& c : upper) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      return upper;
    }
  }
}

std::string department_variant(std::mt19937& rng, Department d) {
  std::string label = to_label(d);
  switch (pick(rng, 4)) {
    case 0: return label;
    case 1: return to_lower_ascii(label);
    case 2: {
      std::string spaced = label;
      std::replace(spaced.begin(), spaced.end(), '-', ' ');
      return spaced;
    }
    default: {
      std::string upper = label;
      for (char& c : upper) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      return upper;
    }
  }
}

std::vector<std::string> pick_skills(std::mt19937& rng, Department d,
                                     int count) {
  const auto& pool = kProfiles[static_cast<int>(d)].skills;
  std::vector<int> indices(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) indices[i] = static_cast<int>(i);
  std::shuffle(indices.begin(), indices.end(), rng);
  std::vector<std::string> out;
  for (int i = 0; i < count && i < static_cast<int>(pool.size()); ++i) {
    out.emplace_back(pool[indices[i]]);
  }
  return out;
}

}  // namespace

SyntheticJob make_synthetic_job(std::mt19937& rng, Department department,
                                int index) {
  const DepartmentProfile& profile = kProfiles[static_cast<int>(department)];
  SyntheticJob job;

  static constexpr std::array<const char*, 4> kSeniority = {"", "Senior ",
                                                            "Lead ", "Junior "};
  job.truth.title = std::string(kSeniority[pick(rng, 4)]) + profile.role;
  job.truth.department = department;
  job.truth.experience_level = kExperienceLevels[pick(rng, 5)];
  job.truth.education = kDegrees[pick(rng, 5)];

  std::vector<std::string> skills = pick_skills(rng, department, 3 + pick(rng, 4));
  for (const auto& s : skills) job.truth.required_skills.insert(normalize_skill(s));

  int preference_count = pick(rng, 3);
  std::vector<int> pref_idx = {0, 1, 2, 3, 4};
  std::shuffle(pref_idx.begin(), pref_idx.end(), rng);
  for (int i = 0; i < preference_count; ++i) {
    job.truth.preferences.emplace_back(kPreferences[pref_idx[i]]);
  }

  bool with_hr_email = chance(rng, 0.5);
  if (with_hr_email) {
    job.truth.hr_notify_email =
        "hr-" + to_lower_ascii(to_label(department)) + "@corp.example";
  }

  std::string text;
  text += "Requisition JR-" + std::to_string(1000 + index) + "\n";
  text += "Join a team that ships every week and values craft.\n";
  text += mangle_label(rng, "Title") + ": " + job.truth.title + "\n";
  text += mangle_label(rng, "Department") + ": " +
          department_variant(rng, department) + "\n";
  std::string skill_line;
  for (std::size_t i = 0; i < skills.size(); ++i) {
    if (i) skill_line += ", ";
    skill_line += mangle_skill(rng, skills[i]);
  }
  if (!skills.empty() && chance(rng, 0.3)) {
    skill_line += ", " + mangle_skill(rng, skills[0]);  // duplicate on purpose
  }
  if (!skills.empty()) {
    text += mangle_label(rng, "Skills") + ": " + skill_line + "\n";
  }
  text += mangle_label(rng, "Experience") + ": " + job.truth.experience_level +
          "\n";
  text += mangle_label(rng, "Education") + ": " + job.truth.education + "\n";
  if (!job.truth.preferences.empty()) {
    std::string pref_line;
    for (std::size_t i = 0; i < job.truth.preferences.size(); ++i) {
      if (i) pref_line += ", ";
      pref_line += job.truth.preferences[i];
    }
    text += mangle_label(rng, "Preferences") + ": " + pref_line + "\n";
  }
  if (with_hr_email) {
    text += mangle_label(rng, "Email") + ": " + *job.truth.hr_notify_email +
            "\n";
  }
  text += "Benefits include learning budget and wellness days.\n";
  job.text = std::move(text);
  return job;
}

SyntheticResume make_synthetic_resume(std::mt19937& rng,
                                      Department department, int index,
                                      bool with_email) {
  const DepartmentProfile& profile = kProfiles[static_cast<int>(department)];
  SyntheticResume resume;

  std::string first = kFirstNames[pick(rng, 12)];
  std::string last = kLastNames[pick(rng, 12)];
  resume.truth.candidate_name = first + " " + last;
  resume.truth.predicted_department = department;
  resume.truth.phone =
      "+1-555-" + std::to_string(1000 + (index % 9000));
  if (with_email) {
    resume.truth.email = to_lower_ascii(first) + "." + to_lower_ascii(last) +
                         "." + std::to_string(index) + "@example.com";
  }

  std::vector<std::string> skills = pick_skills(rng, department, 2 + pick(rng, 5));
  for (const auto& s : skills) resume.truth.skills.insert(normalize_skill(s));

  int experience_count = 1 + pick(rng, 2);
  for (int i = 0; i < experience_count; ++i) {
    ExperienceEntry entry;
    bool matching_role = i == 0 && chance(rng, 0.6);
    entry.role_title =
        matching_role ? profile.role : kGenericRoles[pick(rng, 4)];
    int form = pick(rng, 3);
    if (form == 0) {
      entry.description = "";
    } else {
      entry.years = 1.0 + pick(rng, 18) * 0.5;
      entry.description = form == 2 ? kDescriptions[pick(rng, 4)] : "";
    }
    resume.truth.experience.push_back(std::move(entry));
  }

  int education_count = 1 + pick(rng, 2);
  for (int i = 0; i < education_count; ++i) {
    EducationEntry entry;
    entry.degree = kDegrees[pick(rng, 5)];
    if (chance(rng, 0.7)) entry.institution = kInstitutions[pick(rng, 3)];
    resume.truth.education.push_back(std::move(entry));
  }

  std::string text;
  text += "Candidate reference CR-" + std::to_string(1000 + index) + "\n";
  text += mangle_label(rng, "Name") + ": " + resume.truth.candidate_name + "\n";
  if (with_email) {
    text += mangle_label(rng, "Email") + ": " + *resume.truth.email + "\n";
  }
  text += mangle_label(rng, "Phone") + ": " + *resume.truth.phone + "\n";
  text += mangle_label(rng, "Department") + ": " +
          department_variant(rng, department) + "\n";
  if (!skills.empty()) {
    std::string skill_line;
    for (std::size_t i = 0; i < skills.size(); ++i) {
      if (i) skill_line += ", ";
      skill_line += mangle_skill(rng, skills[i]);
    }
    text += mangle_label(rng, "Skills") + ": " + skill_line + "\n";
  }
  for (const auto& entry : resume.truth.experience) {
    std::string line = entry.role_title;
    if (entry.years) {
      std::string years = std::to_string(*entry.years);
      years.erase(years.find_last_not_of('0') + 1);
      if (years.ends_with('.')) years.pop_back();
      line += " | " + years;
      if (!entry.description.empty()) line += " | " + entry.description;
    }
    text += mangle_label(rng, "Experience") + ": " + line + "\n";
  }
  for (const auto& entry : resume.truth.education) {
    std::string line = entry.degree;
    if (entry.institution) line += " | " + *entry.institution;
    text += mangle_label(rng, "Education") + ": " + line + "\n";
  }
  text += "Dedicated professional with a record of steady delivery.\n";
  resume.text = std::move(text);
  return resume;
}

namespace {

void set_deterministic_mtime(const std::filesystem::path& path, int offset) {
  // Deterministic receipt order: base instant plus one second per document.
  auto base = std::chrono::sys_seconds{std::chrono::seconds{1704067200}};
  auto target = base + std::chrono::seconds{offset};
  std::filesystem::last_write_time(
      path, std::chrono::file_clock::from_sys(target));
}

}  // namespace

CorpusTruth write_corpus(const std::filesystem::path& out,
                         const CorpusOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(out / "jobs");
  fs::create_directories(out / "resumes");
  std::mt19937 rng(options.seed);

  CorpusTruth truth;
  char name[64];
  for (int i = 0; i < options.jobs; ++i) {
    Department d = all_departments()[i % kDepartmentCount];
    SyntheticJob job = make_synthetic_job(rng, d, i);
    std::snprintf(name, sizeof(name), "job_%03d_%s.txt", i,
                  to_label(d).c_str());
    fs::path path = out / "jobs" / name;
    write_file_bytes(path, job.text);
    set_deterministic_mtime(path, i);
    job.truth.job_id = DocumentId::of_bytes(job.text);
    truth.jobs.push_back(std::move(job.truth));
  }

  for (int i = 0; i < options.resumes; ++i) {
    Department d = all_departments()[i % kDepartmentCount];
    bool with_email = chance(rng, options.email_fraction);
    SyntheticResume resume = make_synthetic_resume(rng, d, i, with_email);
    bool as_pdf = chance(rng, options.pdf_fraction);
    std::string bytes;
    if (as_pdf) {
      bytes = make_pdf({split_lines(trim(resume.text))}, true);
      std::snprintf(name, sizeof(name), "resume_%04d_%s.pdf", i,
                    to_label(d).c_str());
    } else {
      bytes = resume.text;
      std::snprintf(name, sizeof(name), "resume_%04d_%s.txt", i,
                    to_label(d).c_str());
    }
    fs::path path = out / "resumes" / name;
    write_file_bytes(path, bytes);
    set_deterministic_mtime(path, options.jobs + i);
    resume.truth.resume_id = DocumentId::of_bytes(bytes);
    truth.resumes.push_back(std::move(resume.truth));
  }

  Json ground_truth{{"jobs", truth.jobs}, {"resumes", truth.resumes}};
  write_file_bytes(out / "ground_truth.json", ground_truth.dump(2) + "\n");
  return truth;
}

}  // namespace mlar
