#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracvi/theorems.hpp"

namespace fracvi {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"operators", "vi", "regularity", "comparison",
                                                 "extension"};
  return names;
}

struct ExperimentConfig {
  std::string suite = "all";
  std::vector<int> sizes = {31, 63};
  std::vector<double> s_values = {0.25, 0.5, 0.75};
  std::uint64_t seed = 1;
  double tol_factor = 1.0;
  int jobs = 1;
  std::string output_dir = "out";
};

inline void validate_config(const ExperimentConfig& cfg) {
  bool known = cfg.suite == "all";
  for (const auto& name : suite_names()) known = known || cfg.suite == name;
  if (!known) throw std::invalid_argument("unknown suite '" + cfg.suite + "'");
  if (cfg.sizes.empty()) throw std::invalid_argument("need at least one grid size");
  for (int n : cfg.sizes)
    if (n < 3) throw std::invalid_argument("grid sizes must be >= 3 nodes");
  if (cfg.s_values.empty()) throw std::invalid_argument("need at least one s value");
  for (double s : cfg.s_values)
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s values must lie in (0,1]");
  if (!(cfg.tol_factor > 0.0)) throw std::invalid_argument("tolerance factor must be positive");
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"suite", cfg.suite},   {"sizes", cfg.sizes},           {"s", cfg.s_values},
          {"seed", cfg.seed},     {"tol_factor", cfg.tol_factor}, {"jobs", cfg.jobs},
          {"output_dir", cfg.output_dir}};
}

inline void config_merge_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  if (j.contains("suite")) cfg.suite = j.at("suite").get<std::string>();
  if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<int>>();
  if (j.contains("s")) cfg.s_values = j.at("s").get<std::vector<double>>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tol_factor")) cfg.tol_factor = j.at("tol_factor").get<double>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
}

inline std::vector<std::string> selected_suites(const ExperimentConfig& cfg) {
  if (cfg.suite == "all") return suite_names();
  return {cfg.suite};
}

inline std::vector<TheoremReport> run_suite(const std::string& name,
                                            const ExperimentConfig& cfg) {
  if (name == "operators") return check_operator_theorems(cfg.seed, cfg.sizes, cfg.s_values);
  if (name == "vi") return check_vi_theorems(cfg.seed, cfg.sizes, cfg.s_values);
  if (name == "regularity") return check_regularity_theorems(cfg.seed, cfg.sizes, cfg.s_values);
  if (name == "comparison") return check_navier_dirichlet(cfg.seed, cfg.sizes, cfg.s_values);
  if (name == "extension") return check_extension_identities(cfg.seed, cfg.s_values);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

/// Re-derives the status of a report after scaling its tolerance.
inline void apply_tolerance_factor(TheoremReport& r, double factor) {
  if (factor == 1.0 || r.status == CheckStatus::VacuousPass) return;
  r.tolerance *= factor;
  if (r.margin < -r.tolerance)
    r.status = CheckStatus::Fail;
  else if (r.strict_expected && r.margin < r.strictness_floor)
    r.status = CheckStatus::WeakPass;
  else
    r.status = CheckStatus::Pass;
}

namespace detail {

inline std::string format_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// One canonical obstacle-problem dump per (size, s): smooth bump obstacle,
/// zero forcing, PSOR solve.
inline void dump_solutions(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  for (int n : cfg.sizes) {
    BoxGrid grid(0.0, 1.0, n);
    DomainMask mask = full_mask(grid);
    auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(mask));
    Vector psi(static_cast<std::size_t>(n)), f(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const double x = grid.coord(0, i);
      psi[i] = std::exp(-50.0 * (x - 0.5) * (x - 0.5));
    }
    for (double s : cfg.s_values) {
      auto op = std::make_shared<const NavierOperator>(dec, s);
      ObstacleProblem prob{OperatorHandle(op), psi, f};
      const Solution sol = solve_psor(prob);
      nlohmann::json j;
      j["problem"] = {{"mask_ref", mask_to_json(mask)},
                      {"s", s},
                      {"psi", psi},
                      {"f", f},
                      {"method", "psor"},
                      {"params", {{"relax", 1.5}}}};
      j["solution"] = solution_to_json(sol);
      std::ostringstream name;
      name << "vi_n" << n << "_s" << std::fixed << std::setprecision(2) << s << "_psor.json";
      std::ofstream out(dir / name.str());
      out << j.dump(2) << '\n';
    }
  }
}

inline void dump_profiles(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  for (double s : cfg.s_values) {
    if (!(s < 1.0)) continue;
    ModeProfile prof = solve_mode_ode(s, 1.0, make_graded_mesh(s, default_extent(1.0), 200));
    std::ostringstream name;
    name << "mode_s" << std::fixed << std::setprecision(2) << s << ".csv";
    std::ofstream out(dir / name.str());
    prof.write_csv(out);
  }
}

}  // namespace detail

/// Prints the resolved plan without executing anything.
inline void describe(const ExperimentConfig& cfg, std::ostream& os) {
  validate_config(cfg);
  os << "plan\n";
  os << "  suites:";
  for (const auto& name : selected_suites(cfg)) os << ' ' << name;
  os << '\n';
  os << "  sizes: " << detail::join_ints(cfg.sizes) << '\n';
  os << "  s: " << detail::join_doubles(cfg.s_values) << '\n';
  os << "  seed: " << cfg.seed << '\n';
  os << "  tolerance factor: " << detail::format_double(cfg.tol_factor) << '\n';
  os << "  jobs: " << cfg.jobs << '\n';
  os << "  output: " << cfg.output_dir << '\n';
}

/// Executes the selected suites, writes report.json / summary.csv /
/// solutions / profiles, and returns the process exit code:
/// 0 all non-vacuous checks pass (weak-pass counts as pass, flagged),
/// 2 at least one check failed. Config errors surface as exceptions and
/// are mapped to exit 1 by the command-line frontend.
inline int run(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir / "solutions", ec);
  fs::create_directories(out_dir / "profiles", ec);
  if (!fs::is_directory(out_dir))
    throw std::invalid_argument("cannot create output directory '" + cfg.output_dir + "'");

  const std::vector<std::string> suites = selected_suites(cfg);

  // suites run as independent jobs; results are merged in the canonical
  // suite order regardless of completion order
  std::vector<std::vector<TheoremReport>> per_suite(suites.size());
  if (cfg.jobs > 1) {
    std::vector<std::future<std::vector<TheoremReport>>> futs;
    for (const auto& name : suites)
      futs.push_back(std::async(std::launch::async, [&cfg, name] { return run_suite(name, cfg); }));
    for (std::size_t k = 0; k < futs.size(); ++k) per_suite[k] = futs[k].get();
  } else {
    for (std::size_t k = 0; k < suites.size(); ++k) per_suite[k] = run_suite(suites[k], cfg);
  }

  std::vector<TheoremReport> reports;
  for (auto& chunk : per_suite)
    for (auto& r : chunk) {
      apply_tolerance_factor(r, cfg.tol_factor);
      reports.push_back(std::move(r));
    }

  int pass = 0, weak = 0, vac = 0, fail = 0;
  nlohmann::json jreports = nlohmann::json::array();
  for (const auto& r : reports) {
    jreports.push_back(report_to_json(r));
    switch (r.status) {
      case CheckStatus::Pass: ++pass; break;
      case CheckStatus::WeakPass: ++weak; break;
      case CheckStatus::VacuousPass: ++vac; break;
      case CheckStatus::Fail: ++fail; break;
    }
  }

  nlohmann::json report;
  report["header"] = {{"generated_at", detail::timestamp_now()}, {"tool", "fracvi"}};
  report["body"] = {{"config", config_to_json(cfg)},
                    {"reports", jreports},
                    {"summary",
                     {{"pass", pass}, {"weak_pass", weak}, {"vacuous_pass", vac}, {"fail", fail}}}};
  {
    std::ofstream out(out_dir / "report.json");
    out << report.dump(2) << '\n';
  }
  {
    std::ofstream csv(out_dir / "summary.csv");
    csv << "id,instance,margin,tolerance,status\n";
    for (const auto& r : reports) {
      csv << detail::csv_quote(r.id) << ',' << detail::csv_quote(r.instance) << ',' << r.margin
          << ',' << r.tolerance << ',' << status_name(r.status) << '\n';
    }
  }
  detail::dump_solutions(cfg, out_dir / "solutions");
  detail::dump_profiles(cfg, out_dir / "profiles");

  log << "checks: " << pass << " pass, " << weak << " weak-pass, " << vac << " vacuous-pass, "
      << fail << " fail\n";
  for (const auto& r : reports)
    if (r.status == CheckStatus::Fail)
      log << "FAIL " << r.id << " [" << r.instance << "] margin=" << r.margin
          << " tolerance=" << r.tolerance << '\n';
  log << "report: " << (out_dir / "report.json").string() << '\n';
  return fail == 0 ? 0 : 2;
}

}  // namespace fracvi
