#pragma once

// Simulation experiments and file-based estimation. Uses nlohmann/json for
// every document this layer reads or writes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "smoothqv/designs.hpp"
#include "smoothqv/errors.hpp"
#include "smoothqv/estimators.hpp"
#include "smoothqv/grf.hpp"

namespace smoothqv {

using json = nlohmann::json;

/// Input that cannot be parsed or does not fit the requested mode (exit code 2).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class EstimationMode { line, curve, lattice };

inline EstimationMode parse_mode(const std::string& s) {
  if (s == "line") {
    return EstimationMode::line;
  }
  if (s == "curve") {
    return EstimationMode::curve;
  }
  if (s == "lattice") {
    return EstimationMode::lattice;
  }
  throw InputError("unknown mode '" + s + "' (expected line, curve or lattice)");
}

inline const char* to_string(EstimationMode m) {
  switch (m) {
    case EstimationMode::line:
      return "line";
    case EstimationMode::curve:
      return "curve";
    case EstimationMode::lattice:
      return "lattice";
  }
  return "?";
}

// ---------------------------------------------------------------- documents

struct SitesDocument {
  int dimension = 1;
  std::vector<Point> points;
  bool ordered = true;
};

inline json to_json(const SitesDocument& doc) {
  json pts = json::array();
  for (const auto& p : doc.points) {
    if (doc.dimension == 1) {
      pts.push_back(p.x);
    } else {
      pts.push_back(json::array({p.x, p.y}));
    }
  }
  return json{{"dimension", doc.dimension}, {"points", pts}, {"ordered", doc.ordered}};
}

inline SitesDocument sites_from_json(const json& j) {
  SitesDocument doc;
  try {
    doc.dimension = j.at("dimension").get<int>();
    if (doc.dimension != 1 && doc.dimension != 2) {
      throw InputError("sites: dimension must be 1 or 2");
    }
    doc.ordered = j.value("ordered", true);
    for (const auto& p : j.at("points")) {
      if (doc.dimension == 1) {
        doc.points.push_back({p.is_array() ? p.at(0).get<double>() : p.get<double>(), 0.0});
      } else {
        if (!p.is_array() || p.size() != 2) {
          throw InputError("sites: two-dimensional points must be [x, y] pairs");
        }
        doc.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("sites: ") + e.what());
  }
  return doc;
}

inline std::vector<double> observations_from_json(const json& j) {
  if (!j.is_array()) {
    throw InputError("observations: expected a JSON array of numbers");
  }
  std::vector<double> obs;
  obs.reserve(j.size());
  try {
    for (const auto& v : j) {
      obs.push_back(v.get<double>());
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("observations: ") + e.what());
  }
  return obs;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("cannot parse '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write '" + path + "'");
  }
  out << text;
}

inline json to_json(const EstimateResult& r) {
  json components = json::array();
  for (const auto& c : r.components) {
    components.push_back({{"variant", to_string(c.variant)},
                          {"ell", c.ell},
                          {"nuHat", c.nu_hat},
                          {"objective", c.objective},
                          {"domain", json::array({c.domain.lo, c.domain.hi})},
                          {"v1", c.v1},
                          {"v2", c.v2}});
  }
  return json{{"variant", to_string(r.variant)},
              {"nuHat", r.nu_hat},
              {"objective", r.objective},
              {"ellUsed", r.ell_used},
              {"intervalEstimate", r.interval_estimate ? json(*r.interval_estimate) : json(nullptr)},
              {"components", components}};
}

// ---------------------------------------------------------- file estimation

struct EstimateOptions {
  double upper_bound = 2.5;     // M, line mode
  std::optional<int> ell;       // line: fixed order instead of the adaptive rule; lattice: 1 or 2 (default 2)
  SearchConfig search;
};

inline std::size_t exact_square_root(std::size_t count) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  while (r * r > count) {
    --r;
  }
  while ((r + 1) * (r + 1) <= count) {
    ++r;
  }
  return r;
}

/// Estimation from parsed documents; throws InputError for malformed input.
inline json estimate_documents(const SitesDocument& sites, std::vector<double> obs, EstimationMode mode,
                               const EstimateOptions& options) {
  const std::size_t count = sites.points.size();
  if (obs.size() != count) {
    throw InputError("observation count mismatch: expected " + std::to_string(count) + " values (one per site), got " +
                     std::to_string(obs.size()));
  }
  json out;
  out["mode"] = to_string(mode);
  out["n"] = count;
  try {
    switch (mode) {
      case EstimationMode::line: {
        if (sites.dimension != 1) {
          throw InputError("line mode needs one-dimensional sites");
        }
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i) {
          t[i] = sites.points[i].x;
        }
        if (!sites.ordered) {
          std::vector<std::size_t> idx(count);
          for (std::size_t i = 0; i < count; ++i) {
            idx[i] = i;
          }
          std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
          std::vector<double> ts(count), os(count);
          for (std::size_t i = 0; i < count; ++i) {
            ts[i] = t[idx[i]];
            os[i] = obs[idx[i]];
          }
          t = std::move(ts);
          obs = std::move(os);
        }
        const LineTransect design(std::move(t));
        const auto r = options.ell ? estimate_line_fixed_ell(obs, design, *options.ell, options.upper_bound, options.search)
                                   : estimate_line_adaptive(obs, design, options.upper_bound, options.search);
        out["estimate"] = to_json(r);
        break;
      }
      case EstimationMode::curve: {
        if (sites.dimension != 2) {
          throw InputError("curve mode needs two-dimensional sites");
        }
        std::vector<Point> pts = sites.points;
        if (!sites.ordered) {
          const auto order = recover_order(pts);
          std::vector<Point> ps(count);
          std::vector<double> os(count);
          for (std::size_t i = 0; i < count; ++i) {
            ps[i] = pts[order[i]];
            os[i] = obs[order[i]];
          }
          pts = std::move(ps);
          obs = std::move(os);
          out["recoveredOrder"] = true;
        }
        // a curve and its reversal give the same estimate; fix one orientation so the sums round identically
        if (count > 1 && pts.back() < pts.front()) {
          std::reverse(pts.begin(), pts.end());
          std::reverse(obs.begin(), obs.end());
        }
        const CurveDesign design(std::move(pts));
        out["estimate"] = to_json(estimate_curve(obs, design, options.search));
        break;
      }
      case EstimationMode::lattice: {
        if (sites.dimension != 2) {
          throw InputError("lattice mode needs two-dimensional sites");
        }
        const std::size_t side = exact_square_root(count);
        if (side * side != count) {
          throw InputError("lattice mode needs n^2 points; got " + std::to_string(count) + ", expected " +
                           std::to_string(side * side) + " or " + std::to_string((side + 1) * (side + 1)));
        }
        const LatticeDesign design(side, sites.points);
        out["estimate"] = to_json(estimate_lattice(obs, design, options.ell.value_or(2), options.search));
        break;
      }
    }
  } catch (const DesignError& e) {
    throw InputError(e.what());
  }
  return out;
}

inline json estimate_from_files(const std::string& sites_path, const std::string& obs_path, EstimationMode mode,
                                const EstimateOptions& options) {
  const auto sites = sites_from_json(read_json_file(sites_path));
  auto obs = observations_from_json(read_json_file(obs_path));
  return estimate_documents(sites, std::move(obs), mode, options);
}

// -------------------------------------------------------------- experiments

struct ExperimentConfig {
  std::string experiment = "1";  // "1", "2", "3" or "custom"
  std::size_t n = 0;             // 0 selects the experiment default (200, 200, 40)
  std::vector<double> nu_list;   // empty selects the experiment default
  std::size_t replications = 20;
  std::uint64_t seed = 20240601;
  double upper_bound = 2.5;  // M
  double alpha = 1.0;
  double sigma = 1.0;
  std::string output_path;
  std::string format = "csv";
  bool record_timings = false;
  // custom experiments
  std::string mode;
  std::string sites_path;

  int number() const { return experiment == "custom" ? 0 : std::stoi(experiment); }

  void apply_defaults() {
    if (experiment != "1" && experiment != "2" && experiment != "3" && experiment != "custom") {
      throw InputError("experiment must be 1, 2, 3 or custom");
    }
    if (n == 0 && experiment != "custom") {
      n = experiment == "3" ? 40 : 200;
    }
    if (nu_list.empty()) {
      if (experiment == "1") {
        nu_list = {0.5, 1.5, 2.5};
      } else if (experiment == "2") {
        nu_list = {0.5, 1.5};
      } else if (experiment == "3") {
        nu_list = {0.5, 1.5, 1.9};
      } else {
        throw InputError("custom experiments need nuList");
      }
    }
  }

  void validate() const {
    if (replications < 1) {
      throw InputError("replications must be at least 1");
    }
    if (format != "csv" && format != "json") {
      throw InputError("format must be csv or json");
    }
    for (double nu : nu_list) {
      if (!(nu > 0.0)) {
        throw InputError("every nu must be positive");
      }
    }
    if (!(alpha > 0.0) || !(sigma > 0.0)) {
      throw InputError("alpha and sigma must be positive");
    }
    const int e = number();
    if (e == 1 || e == 2) {
      const std::size_t min_n = e == 1 ? 4 * (static_cast<std::size_t>(std::floor(upper_bound)) + 2) + 2 : 9;
      if (n < min_n || n > kMaxSimulationSites) {
        throw InputError("n must lie in [" + std::to_string(min_n) + ", " + std::to_string(kMaxSimulationSites) + "]");
      }
    } else if (e == 3) {
      if (n < 5 || n * n > kMaxSimulationSites) {
        throw InputError("lattice n must satisfy 5 <= n and n^2 <= " + std::to_string(kMaxSimulationSites));
      }
    } else if (mode.empty() || sites_path.empty()) {
      throw InputError("custom experiments need mode and sitesPath");
    }
    if (e == 1 || (e == 0 && mode == "line")) {
      for (double nu : nu_list) {
        if (nu > upper_bound) {
          throw InputError("every nu must be at most M for line experiments");
        }
      }
    }
  }
};

inline ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) {
      const auto& e = j.at("experiment");
      c.experiment = e.is_string() ? e.get<std::string>() : std::to_string(e.get<int>());
    }
    c.n = j.value("n", std::size_t{0});
    c.nu_list = j.value("nuList", std::vector<double>{});
    c.replications = j.value("replications", std::size_t{20});
    c.seed = j.value("seed", c.seed);
    c.upper_bound = j.value("M", c.upper_bound);
    c.alpha = j.value("alpha", c.alpha);
    c.sigma = j.value("sigma", c.sigma);
    c.output_path = j.value("outputPath", std::string{});
    c.format = j.value("format", c.format);
    c.record_timings = j.value("recordTimings", false);
    c.mode = j.value("mode", std::string{});
    c.sites_path = j.value("sitesPath", std::string{});
  } catch (const json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  c.apply_defaults();
  c.validate();
  return c;
}

struct ReplicationRecord {
  double nu_true = 0.0;
  std::size_t replication = 0;
  Variant variant = Variant::a;
  double nu_hat = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  double seconds = 0.0;
};

struct VariantSummary {
  double nu_true = 0.0;
  Variant variant = Variant::a;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mae = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> failure_reasons;
};

struct ExperimentReport {
  ExperimentConfig config;
  Variant headline = Variant::a_final;
  std::vector<ReplicationRecord> records;
  std::vector<VariantSummary> summaries;
  std::vector<double> factor_seconds;  // per nu, wall clock of assembly + Cholesky
  double total_seconds = 0.0;

  /// True when some nu has no successful replication for the headline variant.
  bool any_nu_failed() const {
    for (const auto& s : summaries) {
      if (s.variant == headline && s.successes == 0) {
        return true;
      }
    }
    return false;
  }

  const VariantSummary* find(double nu, Variant v) const {
    for (const auto& s : summaries) {
      if (s.nu_true == nu && s.variant == v) {
        return &s;
      }
    }
    return nullptr;
  }
};

/// MAE and its standard error (sample standard deviation / sqrt(successes)).
inline void summarize_errors(std::span<const double> abs_errors, double& mae, double& se) {
  const std::size_t m = abs_errors.size();
  if (m == 0) {
    mae = se = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double e : abs_errors) {
    sum += e;
  }
  mae = sum / static_cast<double>(m);
  if (m < 2) {
    se = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double ss = 0.0;
  for (double e : abs_errors) {
    ss += (e - mae) * (e - mae);
  }
  se = std::sqrt(ss / static_cast<double>(m - 1)) / std::sqrt(static_cast<double>(m));
}

/// Worker count: SMOOTHQV_THREADS when set to a positive integer, else the available cores.
inline unsigned thread_count_from_env() {
  if (const char* s = std::getenv("SMOOTHQV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) {
      return static_cast<unsigned>(v);
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, const Body& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        body(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

namespace detail {

// One estimator over a fixed design; the design and its tabulated ratios are shared by all replications.
struct ExperimentSetup {
  SiteSet sites{1, {{0.0, 0.0}}};
  std::vector<Variant> variants;
  Variant headline = Variant::a_final;
  std::variant<std::monostate, LineEstimator, CurveEstimator, LatticeEstimator> estimator;
  std::vector<std::size_t> observation_order;  // custom curve input: site index of each ordered position

  std::vector<double> run(const std::vector<double>& obs) const {
    std::vector<double> x = obs;
    if (!observation_order.empty()) {
      for (std::size_t i = 0; i < obs.size(); ++i) {
        x[i] = obs[observation_order[i]];
      }
    }
    if (const auto* e = std::get_if<LineEstimator>(&estimator)) {
      const auto r = e->adaptive(x);
      return {*r.interval_estimate, r.nu_hat, r.objective, r.components.back().objective};
    }
    if (const auto* e = std::get_if<CurveEstimator>(&estimator)) {
      const auto r = e->estimate(x);
      return {r.components.front().nu_hat, r.nu_hat, r.components.front().objective, r.objective};
    }
    const auto& e = std::get<LatticeEstimator>(estimator);
    const auto c1 = e.estimate(x, 1);
    const auto c2 = e.estimate(x, 2);
    return {c1.nu_hat, c2.nu_hat, c1.objective, c2.objective};
  }
};

inline ExperimentSetup make_setup(const ExperimentConfig& config) {
  ExperimentSetup s;
  int e = config.number();
  EstimationMode mode = EstimationMode::line;
  std::optional<SitesDocument> custom;
  if (e == 0) {
    mode = parse_mode(config.mode);
    custom = sites_from_json(read_json_file(config.sites_path));
  } else {
    mode = e == 1 ? EstimationMode::line : e == 2 ? EstimationMode::curve : EstimationMode::lattice;
  }
  try {
    switch (mode) {
      case EstimationMode::line: {
        LineTransect design = experiment_designs::line(config.n);
        if (custom) {
          std::vector<double> t;
          for (const auto& p : custom->points) {
            t.push_back(p.x);
          }
          std::sort(t.begin(), t.end());
          design = LineTransect(std::move(t));
        }
        s.sites = design.site_set();
        s.estimator.emplace<LineEstimator>(design, config.upper_bound);
        s.variants = {Variant::a0, Variant::a_final};
        s.headline = Variant::a_final;
        break;
      }
      case EstimationMode::curve: {
        std::optional<CurveDesign> design;
        if (custom) {
          s.sites = SiteSet(2, custom->points);
          if (custom->ordered) {
            design.emplace(custom->points);
          } else {
            s.observation_order = recover_order(custom->points);
            std::vector<Point> ordered;
            for (std::size_t i : s.observation_order) {
              ordered.push_back(custom->points[i]);
            }
            design.emplace(std::move(ordered));
          }
        } else {
          design.emplace(experiment_designs::arc(config.n));
          s.sites = design->site_set();
        }
        s.estimator.emplace<CurveEstimator>(*design);
        s.variants = {Variant::b2, Variant::b_final};
        s.headline = Variant::b_final;
        break;
      }
      case EstimationMode::lattice: {
        std::optional<LatticeDesign> design;
        if (custom) {
          const std::size_t side = exact_square_root(custom->points.size());
          design.emplace(side, custom->points);
        } else {
          design.emplace(experiment_designs::lattice(config.n));
        }
        s.sites = design->site_set();
        s.estimator.emplace<LatticeEstimator>(*design);
        s.variants = {Variant::c1, Variant::c2};
        s.headline = Variant::c2;
        break;
      }
    }
  } catch (const DesignError& err) {
    throw InputError(err.what());
  }
  if (s.sites.size() > kMaxSimulationSites) {
    throw InputError("too many sites for exact simulation");
  }
  return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Seed of the normal stream for the k-th entry of nuList: distinct per nu, fixed per config.
inline std::uint64_t nu_stream_seed(std::uint64_t master, std::size_t nu_index) {
  return master + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(nu_index + 1);
}

inline ExperimentReport run_experiment(ExperimentConfig config, unsigned threads = 1) {
  config.apply_defaults();
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto setup = detail::make_setup(config);

  ExperimentReport report;
  report.config = config;
  report.headline = setup.headline;
  for (std::size_t k = 0; k < config.nu_list.size(); ++k) {
    const double nu = config.nu_list[k];
    const auto t_factor = std::chrono::steady_clock::now();
    std::optional<SamplerState> state;
    std::string factor_failure;
    try {
      state = factor(MaternModel(nu, config.alpha, config.sigma), setup.sites, nu_stream_seed(config.seed, k));
    } catch (const IllConditionedError&) {
      factor_failure = "ill_conditioned";
    }
    report.factor_seconds.push_back(detail::seconds_since(t_factor));

    const std::size_t reps = config.replications;
    std::vector<std::vector<ReplicationRecord>> rows(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<double> values;
      std::string status = "ok";
      if (!state) {
        status = factor_failure;
      } else {
        try {
          values = setup.run(sample(*state, r));
        } catch (const DegenerateDataError&) {
          status = "degenerate_data";
        } catch (const DegenerateCellError&) {
          status = "degenerate_cell";
        } catch (const DomainError&) {
          status = "domain_error";
        }
      }
      const double secs = detail::seconds_since(t0);
      for (std::size_t v = 0; v < setup.variants.size(); ++v) {
        ReplicationRecord rec;
        rec.nu_true = nu;
        rec.replication = r;
        rec.variant = setup.variants[v];
        rec.status = status;
        rec.seconds = secs;
        if (status == "ok") {
          rec.nu_hat = values[v];
          rec.objective = values[v + 2];
        }
        rows[r].push_back(rec);
      }
    });

    for (const auto& variant : setup.variants) {
      VariantSummary sum;
      sum.nu_true = nu;
      sum.variant = variant;
      std::vector<double> errs;
      for (const auto& rr : rows) {
        for (const auto& rec : rr) {
          if (rec.variant != variant) {
            continue;
          }
          if (rec.status == "ok") {
            errs.push_back(std::abs(rec.nu_hat - nu));
          } else {
            ++sum.failures;
            if (std::find(sum.failure_reasons.begin(), sum.failure_reasons.end(), rec.status) ==
                sum.failure_reasons.end()) {
              sum.failure_reasons.push_back(rec.status);
            }
          }
        }
      }
      sum.successes = errs.size();
      summarize_errors(errs, sum.mae, sum.se);
      report.summaries.push_back(sum);
    }
    for (auto& rr : rows) {
      for (auto& rec : rr) {
        report.records.push_back(std::move(rec));
      }
    }
  }
  report.total_seconds = detail::seconds_since(t_start);
  return report;
}

// ------------------------------------------------------------ report output

inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Per-replication rows. The seconds column holds wall-clock time only when
/// record_timings is set, so that reruns produce identical files by default.
inline std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "nu_true,replication,variant,nu_hat,objective,status,seconds\n";
  for (const auto& r : report.records) {
    out << format_number(r.nu_true) << ',' << r.replication << ',' << to_string(r.variant) << ','
        << format_number(r.nu_hat) << ',' << format_number(r.objective) << ',' << r.status << ','
        << format_number(report.config.record_timings ? r.seconds : 0.0) << '\n';
  }
  return out.str();
}

inline json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline json summary_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& s : report.summaries) {
    rows.push_back({{"nuTrue", s.nu_true},
                    {"variant", to_string(s.variant)},
                    {"successes", s.successes},
                    {"failures", s.failures},
                    {"failureReasons", s.failure_reasons},
                    {"mae", nan_to_null(s.mae)},
                    {"se", nan_to_null(s.se)}});
  }
  json out{{"experiment", report.config.experiment},
           {"n", report.config.n},
           {"replications", report.config.replications},
           {"seed", report.config.seed},
           {"headline", to_string(report.headline)},
           {"summary", rows}};
  if (report.config.number() == 1 || report.config.mode == "line") {
    out["M"] = report.config.upper_bound;
  }
  if (report.config.record_timings) {
    out["factorSeconds"] = report.factor_seconds;
    out["totalSeconds"] = report.total_seconds;
  }
  return out;
}

inline json report_json(const ExperimentReport& report) {
  json out = summary_json(report);
  json recs = json::array();
  for (const auto& r : report.records) {
    recs.push_back({{"nu_true", r.nu_true},
                    {"replication", r.replication},
                    {"variant", to_string(r.variant)},
                    {"nu_hat", nan_to_null(r.nu_hat)},
                    {"objective", nan_to_null(r.objective)},
                    {"status", r.status},
                    {"seconds", report.config.record_timings ? r.seconds : 0.0}});
  }
  out["records"] = recs;
  return out;
}

inline std::string render_report(const ExperimentReport& report) {
  return report.config.format == "json" ? report_json(report).dump(2) + "\n" : report_csv(report);
}

// ------------------------------------------------------------------ simulate

struct SimulationRequest {
  std::string experiment = "1";  // "1", "2", "3" or "custom"
  std::size_t n = 0;
  double nu = 0.5;
  double alpha = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 20240601;
  std::uint64_t replication = 0;
  std::string sites_path;  // custom: input sites document
};

struct SimulationOutput {
  SitesDocument sites;
  std::vector<double> observations;
  double jitter_used = 0.0;
};

inline SimulationOutput simulate(const SimulationRequest& req) {
  SimulationOutput out;
  try {
    if (req.experiment == "custom") {
      out.sites = sites_from_json(read_json_file(req.sites_path));
    } else if (req.experiment == "1") {
      const auto d = experiment_designs::line(req.n == 0 ? 200 : req.n);
      out.sites.dimension = 1;
      for (double t : d.sites()) {
        out.sites.points.push_back({t, 0.0});
      }
    } else if (req.experiment == "2") {
      out.sites.dimension = 2;
      out.sites.points = experiment_designs::arc(req.n == 0 ? 200 : req.n).points();
    } else if (req.experiment == "3") {
      out.sites.dimension = 2;
      out.sites.points = experiment_designs::lattice(req.n == 0 ? 40 : req.n).points();
    } else {
      throw InputError("experiment must be 1, 2, 3 or custom");
    }
    const SiteSet sites(out.sites.dimension, out.sites.points);
    const auto state = factor(MaternModel(req.nu, req.alpha, req.sigma), sites, req.seed);
    out.observations = sample(state, req.replication);
    out.jitter_used = state.jitter_used;
  } catch (const DesignError& e) {
    throw InputError(e.what());
  }
  return out;
}

}  // namespace smoothqv
