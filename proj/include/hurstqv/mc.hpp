#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hurstqv/errors.hpp"
#include "hurstqv/estimators.hpp"
#include "hurstqv/log.hpp"
#include "hurstqv/quad_var.hpp"
#include "hurstqv/rng.hpp"
#include "hurstqv/sde.hpp"

namespace hurstqv {

/// Replicated-experiment description; mirrors the JSON config file
/// field-for-field. The horizon is fixed at T = 1.
struct ExperimentConfig {
  std::string process;                  ///< registry name ("I" or "II")
  std::vector<std::size_t> n_list;
  std::vector<double> h_list;
  std::size_t reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<EstimatorId> estimators;
  std::optional<double> grid_beta;
  PhiMode grid_phi_mode = PhiMode::const_one;
  double grid_alpha = 1.0;
  std::string output_dir;
};

inline void validate_config(const ExperimentConfig& config) {
  process_registry(config.process);  // throws for unknown names
  if (config.n_list.empty()) throw ConfigError("config: n_list must be non-empty");
  for (std::size_t n : config.n_list)
    if (n < 10) throw ConfigError("config: n_list entries must be >= 10");
  if (config.h_list.empty()) throw ConfigError("config: h_list must be non-empty");
  for (double h : config.h_list)
    if (!(h > 0.5 && h < 1.0)) throw ConfigError("config: h_list entries must lie in (1/2,1)");
  if (config.reps < 1) throw ConfigError("config: reps must be >= 1");
  if (config.estimators.empty()) throw ConfigError("config: estimators must be non-empty");
}

struct Moments {
  double mse = 0.0;
  double mad = 0.0;   ///< mean |estimate - H|
  double bias = 0.0;
  double sd = 0.0;    ///< sample standard deviation, divisor reps-1 (0 when reps == 1)
};

inline Moments summarize(std::span<const double> estimates, double h_true) {
  if (estimates.empty()) throw DomainError("summarize: empty estimate sequence");
  const double count = static_cast<double>(estimates.size());
  Moments m;
  double mean = 0.0;
  for (double e : estimates) {
    const double d = e - h_true;
    m.mse += d * d;
    m.mad += std::abs(d);
    mean += e;
  }
  m.mse /= count;
  m.mad /= count;
  mean /= count;
  m.bias = mean - h_true;
  if (estimates.size() > 1) {
    double ss = 0.0;
    for (double e : estimates) {
      const double d = e - mean;
      ss += d * d;
    }
    m.sd = std::sqrt(ss / (count - 1.0));
  }
  return m;
}

struct CellSummary {
  std::size_t n = 0;
  double hurst = 0.0;
  EstimatorId estimator = EstimatorId::h1;
  Moments moments;
  std::size_t failures = 0;
  std::size_t successes = 0;
  bool out_of_hypothesis = false;  ///< known_g run where 1/|g(X)| boundedness is not guaranteed
};

struct RawRecord {
  std::size_t n = 0;
  double hurst = 0.0;
  EstimatorId estimator = EstimatorId::h1;
  std::size_t rep = 0;
  double estimate = std::numeric_limits<double>::quiet_NaN();  ///< NaN when failed
  std::string status = "ok";                                   ///< "ok" or an error code
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellSummary> cells;  ///< (n, H, estimator) in config order
  std::vector<RawRecord> raw;      ///< (n, H, estimator, rep) in config order
};

namespace detail {

struct RepResult {
  double estimate = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

/// Runs every requested estimator on one replication. The driver path is
/// shared: h1..h4 reuse one WindowStats object and known_g sees the same path.
inline void run_replication(const ProcessSpec& spec, const GridDesign& design, double hurst,
                            std::uint64_t seed, std::span<const EstimatorId> estimators,
                            RepResult* out) {
  SdeResult sim;
  try {
    sim = simulate(spec, design.m_n, 1.0, hurst, seed);
  } catch (const Error& e) {
    for (std::size_t i = 0; i < estimators.size(); ++i) out[i].status = e.code();
    return;
  }
  std::optional<WindowStats> stats;
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    try {
      if (estimators[i] == EstimatorId::known_g) {
        out[i].estimate = estimate_known_g(sim.path, spec.diffusion).h_hat;
      } else {
        if (!stats) stats = window_stats(sim.path, design);
        const int method = estimators[i] == EstimatorId::h1   ? 1
                           : estimators[i] == EstimatorId::h2 ? 2
                           : estimators[i] == EstimatorId::h3 ? 3
                                                              : 4;
        const std::size_t k = select_index(*stats, method);
        out[i].estimate = estimate_hn(*stats, k);
      }
      out[i].status = "ok";
    } catch (const Error& e) {
      out[i].estimate = std::numeric_limits<double>::quiet_NaN();
      out[i].status = e.code();
    }
  }
}

}  // namespace detail

/// Runs the replicated experiment. Replication r of cell (n_i, H_j) uses the
/// seed derive_seed(base_seed, i, j, r), so results do not depend on reps,
/// worker count or scheduling. threads == 0 means hardware concurrency.
inline ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 0) {
  validate_config(config);
  const ProcessSpec& spec = process_registry(config.process);

  std::vector<GridDesign> designs;
  designs.reserve(config.n_list.size());
  for (std::size_t n : config.n_list)
    designs.push_back(GridDesign::make(n, config.grid_beta, config.grid_phi_mode,
                                       config.grid_alpha));

  const std::size_t n_count = config.n_list.size();
  const std::size_t h_count = config.h_list.size();
  const std::size_t cells = n_count * h_count;
  const std::size_t reps = config.reps;
  const std::size_t est_count = config.estimators.size();

  std::vector<detail::RepResult> results(cells * reps * est_count);
  std::atomic<std::size_t> next_item{0};
  auto worker = [&] {
    while (true) {
      const std::size_t item = next_item.fetch_add(1);
      if (item >= cells * reps) break;
      const std::size_t cell = item / reps;
      const std::size_t rep = item % reps;
      const std::size_t ni = cell / h_count;
      const std::size_t hi = cell % h_count;
      const std::uint64_t seed = derive_seed(config.base_seed, ni, hi, rep);
      detail::run_replication(spec, designs[ni], config.h_list[hi], seed, config.estimators,
                              &results[(cell * reps + rep) * est_count]);
    }
  };

  unsigned worker_count = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (worker_count == 0) worker_count = 1;
  log_info("experiment: " + std::to_string(cells) + " cells x " + std::to_string(reps) +
           " reps on " + std::to_string(worker_count) + " threads");
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < worker_count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ExperimentReport report;
  report.config = config;
  for (std::size_t ni = 0; ni < n_count; ++ni)
    for (std::size_t hi = 0; hi < h_count; ++hi) {
      const std::size_t cell = ni * h_count + hi;
      for (std::size_t ei = 0; ei < est_count; ++ei) {
        CellSummary summary;
        summary.n = config.n_list[ni];
        summary.hurst = config.h_list[hi];
        summary.estimator = config.estimators[ei];
        summary.out_of_hypothesis =
            config.estimators[ei] == EstimatorId::known_g && config.process == "I";
        std::vector<double> ok_estimates;
        ok_estimates.reserve(reps);
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const detail::RepResult& r = results[(cell * reps + rep) * est_count + ei];
          RawRecord record;
          record.n = summary.n;
          record.hurst = summary.hurst;
          record.estimator = summary.estimator;
          record.rep = rep;
          record.estimate = r.estimate;
          record.status = r.status;
          report.raw.push_back(std::move(record));
          if (r.status == "ok")
            ok_estimates.push_back(r.estimate);
          else
            ++summary.failures;
        }
        summary.successes = ok_estimates.size();
        if (!ok_estimates.empty()) summary.moments = summarize(ok_estimates, summary.hurst);
        report.cells.push_back(std::move(summary));
      }
    }
  return report;
}

// ---- JSON (config + report) -------------------------------------------------

inline std::string to_string(PhiMode mode) {
  return mode == PhiMode::const_one ? "const_one" : "log_power";
}

inline PhiMode phi_mode_from_string(const std::string& s) {
  if (s == "const_one") return PhiMode::const_one;
  if (s == "log_power") return PhiMode::log_power;
  throw ConfigError("config: unknown phi_mode '" + s + "'");
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json grid;
  grid["phi_mode"] = to_string(config.grid_phi_mode);
  if (config.grid_phi_mode == PhiMode::log_power) grid["alpha"] = config.grid_alpha;
  if (config.grid_beta) grid["beta"] = *config.grid_beta;
  nlohmann::json estimators = nlohmann::json::array();
  for (EstimatorId e : config.estimators) estimators.push_back(to_string(e));
  return nlohmann::json{{"process", config.process},     {"n_list", config.n_list},
                        {"h_list", config.h_list},       {"reps", config.reps},
                        {"base_seed", config.base_seed}, {"estimators", estimators},
                        {"grid", grid},                  {"output_dir", config.output_dir}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"process", "n_list", "h_list",    "reps",
                                              "base_seed", "estimators", "grid", "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
  }
  ExperimentConfig config;
  try {
    config.process = j.at("process").get<std::string>();
    config.n_list = j.at("n_list").get<std::vector<std::size_t>>();
    config.h_list = j.at("h_list").get<std::vector<double>>();
    config.reps = j.at("reps").get<std::size_t>();
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
    for (const auto& name : j.at("estimators"))
      config.estimators.push_back(estimator_from_string(name.get<std::string>()));
    if (j.contains("grid")) {
      const nlohmann::json& grid = j.at("grid");
      for (auto it = grid.begin(); it != grid.end(); ++it)
        if (it.key() != "phi_mode" && it.key() != "alpha" && it.key() != "beta")
          throw ConfigError("config: unknown grid key '" + it.key() + "'");
      if (grid.contains("phi_mode"))
        config.grid_phi_mode = phi_mode_from_string(grid.at("phi_mode").get<std::string>());
      if (grid.contains("alpha")) config.grid_alpha = grid.at("alpha").get<double>();
      if (grid.contains("beta")) config.grid_beta = grid.at("beta").get<double>();
    }
    config.output_dir = j.value("output_dir", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config;
}

inline nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellSummary& c : report.cells)
    cells.push_back({{"n", c.n},
                     {"H", c.hurst},
                     {"estimator", to_string(c.estimator)},
                     {"mse", c.moments.mse},
                     {"mad", c.moments.mad},
                     {"bias", c.moments.bias},
                     {"sd", c.moments.sd},
                     {"failures", c.failures},
                     {"successes", c.successes},
                     {"out_of_hypothesis", c.out_of_hypothesis}});
  nlohmann::json raw = nlohmann::json::array();
  for (const RawRecord& r : report.raw) {
    nlohmann::json row{{"n", r.n},     {"H", r.hurst},
                       {"estimator", to_string(r.estimator)}, {"rep", r.rep},
                       {"status", r.status}};
    if (std::isfinite(r.estimate))
      row["estimate"] = r.estimate;
    else
      row["estimate"] = nullptr;
    raw.push_back(std::move(row));
  }
  return nlohmann::json{
      {"config", config_to_json(report.config)}, {"cells", cells}, {"raw", raw}};
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  try {
    report.config = config_from_json(j.at("config"));
    for (const auto& c : j.at("cells")) {
      CellSummary s;
      s.n = c.at("n").get<std::size_t>();
      s.hurst = c.at("H").get<double>();
      s.estimator = estimator_from_string(c.at("estimator").get<std::string>());
      s.moments.mse = c.at("mse").get<double>();
      s.moments.mad = c.at("mad").get<double>();
      s.moments.bias = c.at("bias").get<double>();
      s.moments.sd = c.at("sd").get<double>();
      s.failures = c.at("failures").get<std::size_t>();
      s.successes = c.at("successes").get<std::size_t>();
      s.out_of_hypothesis = c.at("out_of_hypothesis").get<bool>();
      report.cells.push_back(std::move(s));
    }
    for (const auto& r : j.at("raw")) {
      RawRecord record;
      record.n = r.at("n").get<std::size_t>();
      record.hurst = r.at("H").get<double>();
      record.estimator = estimator_from_string(r.at("estimator").get<std::string>());
      record.rep = r.at("rep").get<std::size_t>();
      record.estimate = r.at("estimate").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                   : r.at("estimate").get<double>();
      record.status = r.at("status").get<std::string>();
      report.raw.push_back(std::move(record));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  return report;
}

namespace detail {

inline std::string format_display(double v, const char* fmt = "%.4g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace detail

/// Writes summary.csv (display-scaled: MSE x1e3 for h1..h4, x1e5 for known_g,
/// MAD x10, 4 significant digits), summary.json (full precision) and raw.csv
/// (per-replication estimates) into `dir`.
inline void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("write_report: cannot create '" + dir.string() + "': " + ec.message());

  {
    std::ofstream os(dir / "summary.csv");
    if (!os) throw IoError("write_report: cannot open summary.csv");
    os << "n,H,estimator,mse_scaled,mad_scaled,bias,sd,failures\n";
    for (const CellSummary& c : report.cells) {
      const double mse_scale = c.estimator == EstimatorId::known_g ? 1e5 : 1e3;
      os << c.n << ',' << detail::format_display(c.hurst, "%g") << ',' << to_string(c.estimator)
         << ',' << detail::format_display(c.moments.mse * mse_scale) << ','
         << detail::format_display(c.moments.mad * 10.0) << ','
         << detail::format_display(c.moments.bias) << ',' << detail::format_display(c.moments.sd)
         << ',' << c.failures << '\n';
    }
  }
  {
    std::ofstream os(dir / "summary.json");
    if (!os) throw IoError("write_report: cannot open summary.json");
    os << report_to_json(report).dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "raw.csv");
    if (!os) throw IoError("write_report: cannot open raw.csv");
    os << "n,H,estimator,rep,estimate,status\n";
    for (const RawRecord& r : report.raw)
      os << r.n << ',' << detail::format_display(r.hurst, "%g") << ',' << to_string(r.estimator)
         << ',' << r.rep << ',' << detail::format_display(r.estimate, "%.17g") << ','
         << r.status << '\n';
  }
}

}  // namespace hurstqv
