#pragma once

// Batch front end: key=value run configuration, CSV ingestion and export,
// exact enumeration of small model spaces, and report files.

#include "parni/chain.hpp"
#include "parni/sim_data.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace parni {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct DataSchema {
  std::string response = "y";
  std::string time = "time";
  std::string event = "event";
  std::vector<std::string> fixed;
  std::vector<std::string> free;  // empty: every column not used elsewhere
  bool standardize = true;
  bool intercept = false;
};

struct RunConfig {
  std::optional<std::string> data_path;
  std::optional<SimConfig> sim;
  ModelKind kind = ModelKind::logistic;
  DataSchema schema;
  PriorConfig prior;
  ChainConfig chain;
  std::size_t chains = 1;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  std::string out_dir = "parni_out";
  std::optional<std::string> gold_path;
  std::vector<std::pair<std::string, std::string>> echo;  // settings in the order given

  void validate() const {
    if (!data_path && !sim) throw ConfigError("either data= or sim.* settings are required");
    if (chains < 1) throw ConfigError("chains must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    prior.validate();
    if (sim) sim->validate();
    if (chain.acceptance == Method::da_conditional && kind != ModelKind::logistic) {
      throw ConfigError("data augmentation is only available for logistic regression");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

inline double config_double(const std::string& key, const std::string& v) {
  const auto d = parse_double(v);
  if (!d) throw ConfigError("setting '" + key + "' expects a number, got '" + v + "'");
  return *d;
}

inline std::uint64_t config_uint(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("setting '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("setting '" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<std::string> config_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& s : split(v, ',')) {
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

inline SimConfig& sim_of(RunConfig& c) {
  if (!c.sim) c.sim = SimConfig{};
  return *c.sim;
}

}  // namespace detail

/// Applies one key=value setting.
inline void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
  using namespace detail;
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "data") {
    c.data_path = v;
  } else if (key == "model") {
    c.kind = parse_model_kind(v);
  } else if (key == "response") {
    c.schema.response = v;
  } else if (key == "time") {
    c.schema.time = v;
  } else if (key == "event") {
    c.schema.event = v;
  } else if (key == "fixed") {
    c.schema.fixed = config_list(v);
  } else if (key == "free") {
    c.schema.free = config_list(v);
  } else if (key == "standardize") {
    c.schema.standardize = config_bool(key, v);
  } else if (key == "intercept") {
    c.schema.intercept = config_bool(key, v);
  } else if (key == "g") {
    c.prior.g = config_double(key, v);
  } else if (key == "hierarchical_g") {
    c.prior.hierarchical_g = config_bool(key, v);
  } else if (key == "h") {
    c.prior.model_prior = FixedInclusion{config_double(key, v)};
  } else if (key == "bb_a" || key == "bb_b") {
    BetaBinomial bb;
    if (const auto* cur = std::get_if<BetaBinomial>(&c.prior.model_prior)) bb = *cur;
    (key == "bb_a" ? bb.a : bb.b) = config_double(key, v);
    c.prior.model_prior = bb;
  } else if (key == "sigma_alpha_sq") {
    c.prior.sigma_alpha_sq = config_double(key, v);
  } else if (key == "sigma_k_sq") {
    c.prior.sigma_k_sq = config_double(key, v);
  } else if (key == "sampler") {
    c.chain.sampler = parse_sampler(v);
  } else if (key == "proposal") {
    c.chain.proposal = parse_method(v);
  } else if (key == "acceptance") {
    c.chain.acceptance = parse_method(v);
  } else if (key == "iterations" || key == "iters") {
    c.chain.iterations = config_uint(key, v);
  } else if (key == "burn_in") {
    c.chain.burn_in = config_uint(key, v);
  } else if (key == "thin") {
    c.chain.thin = config_uint(key, v);
  } else if (key == "budget_seconds") {
    c.chain.budget_seconds = config_double(key, v);
  } else if (key == "thin_target") {
    c.chain.thin_target = config_uint(key, v);
  } else if (key == "epsilon") {
    c.chain.epsilon = config_double(key, v);
  } else if (key == "zeta_init") {
    c.chain.zeta_init = config_double(key, v);
  } else if (key == "target_accept") {
    c.chain.target_accept = config_double(key, v);
  } else if (key == "cpm_samples") {
    c.chain.cpm_samples = static_cast<Index>(config_uint(key, v));
  } else if (key == "cpm_rho") {
    c.chain.cpm_rho = config_double(key, v);
  } else if (key == "shape_init") {
    c.chain.shape_init = config_double(key, v);
  } else if (key == "adapt") {
    c.chain.adapt = config_bool(key, v);
  } else if (key == "chains") {
    c.chains = config_uint(key, v);
  } else if (key == "workers") {
    c.workers = config_uint(key, v);
  } else if (key == "seed") {
    c.seed = config_uint(key, v);
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key == "gold") {
    c.gold_path = v;
  } else if (key == "sim.n") {
    sim_of(c).n = static_cast<Index>(config_uint(key, v));
  } else if (key == "sim.p") {
    sim_of(c).p = static_cast<Index>(config_uint(key, v));
  } else if (key == "sim.rho") {
    sim_of(c).ar_rho = config_double(key, v);
  } else if (key == "sim.sigma") {
    sim_of(c).sigma = config_double(key, v);
  } else if (key == "sim.q") {
    sim_of(c).q_shape = config_double(key, v);
  } else if (key == "sim.event_fraction") {
    sim_of(c).event_fraction = config_double(key, v);
  } else if (key == "sim.censoring") {
    if (v == "none") {
      sim_of(c).censoring = Censoring::none;
    } else if (v == "administrative") {
      sim_of(c).censoring = Censoring::administrative;
    } else if (v == "uniform") {
      sim_of(c).censoring = Censoring::uniform;
    } else {
      throw ConfigError("unknown censoring rule '" + v + "'");
    }
  } else if (key == "sim.intercept") {
    sim_of(c).intercept = config_bool(key, v);
  } else if (key == "sim.seed") {
    sim_of(c).seed = config_uint(key, v);
  } else if (key == "sim.beta") {
    std::vector<double> b;
    for (const auto& s : config_list(v)) b.push_back(config_double(key, s));
    sim_of(c).beta = Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size()));
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
  c.echo.emplace_back(key, v);
}

/// Parses a flat key=value text; '#' starts a comment.
inline RunConfig parse_run_config(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    return std::nullopt;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (detail::trim(line).empty()) continue;
      for (auto& h : detail::split(line, ',')) {
        if (h.size() >= 2 && h.front() == '"' && h.back() == '"') h = h.substr(1, h.size() - 2);
        t.header.push_back(h);
      }
      have_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, ',');
    if (cells.size() != t.header.size()) {
      throw DataError("'" + path + "' row " + std::to_string(t.rows.size() + 1) + " has " +
                      std::to_string(cells.size()) + " cells, expected " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw DataError("'" + path + "' is empty");
  return t;
}

namespace detail {

inline Vector numeric_column(const CsvTable& t, const std::string& name, const std::string& path) {
  const auto c = t.column(name);
  if (!c) throw DataError("column '" + name + "' not found in '" + path + "'");
  Vector v(static_cast<Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto d = parse_double(t.rows[r][*c]);
    if (!d) {
      throw DataError("non-numeric cell '" + t.rows[r][*c] + "' in column '" + name + "' (row " +
                      std::to_string(r + 1) + ")");
    }
    v[static_cast<Index>(r)] = *d;
  }
  return v;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Reads a dataset; free columns are standardised when the schema asks for it
/// and the scaling is recorded on the dataset.
inline Dataset ingest_csv(const std::string& path, ModelKind kind, const DataSchema& schema) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw DataError("'" + path + "' has no data rows");
  std::vector<std::string> used;
  if (kind == ModelKind::logistic) {
    used.push_back(schema.response);
  } else {
    used.push_back(schema.time);
    used.push_back(schema.event);
  }
  for (const auto& f : schema.fixed) used.push_back(f);
  std::vector<std::string> free = schema.free;
  if (free.empty()) {
    for (const auto& h : t.header) {
      if (std::find(used.begin(), used.end(), h) == used.end()) free.push_back(h);
    }
  }
  if (free.empty()) throw DataError("no free covariate columns in '" + path + "'");
  const auto n = static_cast<Index>(t.rows.size());
  Matrix X(n, static_cast<Index>(free.size()));
  for (std::size_t j = 0; j < free.size(); ++j) X.col(static_cast<Index>(j)) = detail::numeric_column(t, free[j], path);
  const Index q = static_cast<Index>(schema.fixed.size()) + (schema.intercept ? 1 : 0);
  Matrix Z(n, q);
  std::vector<std::string> fixed_names;
  Index c = 0;
  if (schema.intercept) {
    Z.col(c++).setOnes();
    fixed_names.push_back("intercept");
  }
  for (const auto& f : schema.fixed) {
    Z.col(c++) = detail::numeric_column(t, f, path);
    fixed_names.push_back(f);
  }
  ColumnScaling scaling;
  if (schema.standardize) {
    scaling = standardize_columns(X, free);
  } else {
    for (Index j = 0; j < X.cols(); ++j) {
      if (X.col(j).maxCoeff() == X.col(j).minCoeff()) {
        throw DataError("column '" + free[static_cast<std::size_t>(j)] + "' is constant");
      }
    }
  }
  Dataset d = kind == ModelKind::logistic
                  ? Dataset::logistic(std::move(X), std::move(Z), detail::numeric_column(t, schema.response, path))
                  : Dataset::survival(kind, std::move(X), std::move(Z), detail::numeric_column(t, schema.time, path),
                                      detail::numeric_column(t, schema.event, path));
  if (schema.standardize) d.set_scaling(std::move(scaling));
  d.free_names = free;
  d.fixed_names = fixed_names;
  return d;
}

/// Writes the dataset in the schema ingest_csv reads: response column(s), then
/// fixed columns (an all-ones intercept is written as a column named "intercept"),
/// then free columns.
inline void write_dataset_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  auto name = [](const std::vector<std::string>& names, Index j, const char* prefix) {
    return static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                      : prefix + std::to_string(j + 1);
  };
  if (d.kind() == ModelKind::logistic) {
    out << "y";
  } else {
    out << "time,event";
  }
  for (Index j = 0; j < d.q(); ++j) out << ',' << name(d.fixed_names, j, "z");
  for (Index j = 0; j < d.p(); ++j) out << ',' << name(d.free_names, j, "x");
  out << '\n';
  for (Index i = 0; i < d.n(); ++i) {
    if (d.kind() == ModelKind::logistic) {
      out << detail::fmt(d.y()[i]);
    } else {
      out << detail::fmt(d.time()[i]) << ',' << detail::fmt(d.event()[i]);
    }
    for (Index j = 0; j < d.q(); ++j) out << ',' << detail::fmt(d.Z()(i, j));
    for (Index j = 0; j < d.p(); ++j) out << ',' << detail::fmt(d.X()(i, j));
    out << '\n';
  }
}

/// Dataset named by the run configuration: a CSV file or an in-memory simulation.
inline Dataset load_dataset(const RunConfig& c) {
  if (c.data_path) return ingest_csv(*c.data_path, c.kind, c.schema);
  if (!c.sim) throw ConfigError("either data= or sim.* settings are required");
  return simulate(*c.sim, c.kind);
}

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

struct ExactPosterior {
  std::vector<double> log_post;  // unnormalised, indexed by the bit pattern of gamma
  Vector pmp;
  Vector pip;
  double log_norm = 0.0;
  std::size_t failures = 0;
};

inline ModelIndicator model_from_index(std::uint64_t idx, std::size_t p) {
  ModelIndicator m(p);
  for (std::size_t j = 0; j < p; ++j) {
    if ((idx >> j) & 1ULL) m.set(j, true);
  }
  return m;
}

/// Every model's LA (or origin-ALA) posterior weight p(y|gamma) p(gamma),
/// normalised. Models whose estimate fails get weight zero.
inline ExactPosterior enumerate_exact(const Dataset& data, const PriorConfig& prior,
                                      std::optional<double> shape_k = std::nullopt, Index max_p = 20,
                                      Method method = Method::la) {
  if (data.p() > max_p) throw ConfigError("enumeration is limited to p <= " + std::to_string(max_p));
  if (method != Method::la && method != Method::ala) throw ConfigError("enumeration supports la or ala");
  prior.validate();
  const auto p = static_cast<std::size_t>(data.p());
  if (data.kind() == ModelKind::weibull && !shape_k) shape_k = 1.0;
  const GlmModel model(data, shape_k);
  const std::uint64_t count = 1ULL << p;
  ExactPosterior out;
  out.log_post.resize(count);
  double lnorm = kNegInf;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const ModelIndicator gamma = model_from_index(idx, p);
    double lp = kNegInf;
    try {
      const Matrix J = design_matrix(model, gamma);
      const Vector zero = Vector::Zero(J.cols());
      const MarglikResult r = method == Method::la ? log_marglik_la(model, J, gamma, prior, zero)
                                                   : log_marglik_ala(model, J, gamma, prior, zero);
      lp = r.log_value + log_model_prior(gamma, prior);
    } catch (const EstimatorFailure&) {
      ++out.failures;
    }
    out.log_post[idx] = lp;
    lnorm = log_add_exp(lnorm, lp);
  }
  if (!std::isfinite(lnorm)) throw DataError("every model failed to evaluate");
  out.log_norm = lnorm;
  out.pmp.resize(static_cast<Index>(count));
  out.pip = Vector::Zero(data.p());
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const double w = std::exp(out.log_post[idx] - lnorm);
    out.pmp[static_cast<Index>(idx)] = w;
    for (std::size_t j = 0; j < p; ++j) {
      if ((idx >> j) & 1ULL) out.pip[static_cast<Index>(j)] += w;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Mean over covariates of squared PIP deviations.
inline double average_mse(const Vector& pip, const Vector& gold) {
  if (pip.size() != gold.size()) throw DataError("PIP vectors have different lengths");
  return (pip - gold).squaredNorm() / static_cast<double>(pip.size());
}

/// Average over chains of each chain's average MSE.
inline double average_mse(const std::vector<Vector>& pips, const Vector& gold) {
  if (pips.empty()) throw DataError("no PIP vectors given");
  double s = 0.0;
  for (const auto& v : pips) s += average_mse(v, gold);
  return s / static_cast<double>(pips.size());
}

inline double relative_efficiency(double mse_baseline, double mse_other) {
  if (!(mse_other > 0.0)) return std::numeric_limits<double>::infinity();
  return mse_baseline / mse_other;
}

/// PIP column of a pip.csv file (the "mean" column, else the last column).
inline Vector read_pip_csv(const std::string& path, std::vector<std::string>* names = nullptr) {
  const CsvTable t = read_csv(path);
  std::size_t col = t.header.size() - 1;
  if (const auto m = t.column("mean")) col = *m;
  const std::string colname = t.header[col];
  Vector v = detail::numeric_column(t, colname, path);
  if (names) {
    names->clear();
    for (const auto& r : t.rows) names->push_back(r[0]);
  }
  return v;
}

struct ReportSummary {
  Vector mean_pip;
  std::vector<double> chain_mse;  // empty without gold
  std::optional<double> avg_mse;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace detail

/// Writes pip.csv, trace.csv, timing.csv and summary.csv into `dir`.
/// pip.csv and trace.csv depend only on the chains' draws; wall-clock
/// quantities go to timing.csv and summary.csv.
inline ReportSummary report(const std::vector<ChainOutput>& outputs, const std::optional<Vector>& gold,
                            const std::filesystem::path& dir, const std::vector<std::string>& names,
                            const std::string& sampler_label) {
  if (outputs.empty()) throw DataError("no chain outputs to report");
  const Index p = outputs.front().pip.size();
  for (const auto& o : outputs) {
    if (o.pip.size() != p) throw DataError("chain outputs have different numbers of covariates");
  }
  if (gold && gold->size() != p) throw DataError("gold PIP vector length does not match p");
  std::filesystem::create_directories(dir);
  const std::size_t C = outputs.size();
  ReportSummary s;
  s.mean_pip = Vector::Zero(p);
  for (const auto& o : outputs) s.mean_pip += o.pip;
  s.mean_pip /= static_cast<double>(C);

  {
    auto out = detail::open_out(dir / "pip.csv");
    out << "covariate";
    for (std::size_t c = 0; c < C; ++c) out << ",chain_" << (c + 1);
    out << ",mean\n";
    for (Index j = 0; j < p; ++j) {
      out << (static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                         : "x" + std::to_string(j + 1));
      for (const auto& o : outputs) out << ',' << detail::fmt(o.pip[j]);
      out << ',' << detail::fmt(s.mean_pip[j]) << '\n';
    }
  }
  {
    auto out = detail::open_out(dir / "trace.csv");
    out << "chain,iteration,log_post,accepted,model_size,g,shape,model\n";
    for (std::size_t c = 0; c < C; ++c) {
      const auto& o = outputs[c];
      for (std::size_t r = 0; r < o.iteration.size(); ++r) {
        out << (c + 1) << ',' << o.iteration[r] << ',' << detail::fmt(o.log_post[r]) << ','
            << static_cast<int>(o.accepted[r]) << ',' << o.models[r].size() << ',' << detail::fmt(o.g[r]) << ','
            << (std::isnan(o.shape[r]) ? std::string() : detail::fmt(o.shape[r])) << ',';
        bool first = true;
        for (Index j : o.models[r].included()) {
          out << (first ? "" : ";") << (j + 1);
          first = false;
        }
        out << '\n';
      }
    }
  }
  {
    auto out = detail::open_out(dir / "timing.csv");
    out << "chain,iteration,seconds,cumulative_seconds\n";
    for (std::size_t c = 0; c < C; ++c) {
      double cum = 0.0;
      const auto& o = outputs[c];
      for (std::size_t i = 0; i < o.iter_seconds.size(); ++i) {
        cum += o.iter_seconds[i];
        out << (c + 1) << ',' << (i + 1) << ',' << detail::fmt(o.iter_seconds[i]) << ',' << detail::fmt(cum)
            << '\n';
      }
    }
  }
  if (gold) {
    for (const auto& o : outputs) s.chain_mse.push_back(average_mse(o.pip, *gold));
    double m = 0.0;
    for (double v : s.chain_mse) m += v;
    s.avg_mse = m / static_cast<double>(C);
  }
  {
    auto out = detail::open_out(dir / "summary.csv");
    out << "chain,sampler,target,iterations,burn_in,acceptance_rate,iterations_per_second,estimator_failures,"
           "avg_mse\n";
    for (std::size_t c = 0; c < C; ++c) {
      const auto& o = outputs[c];
      const double ips = o.total_seconds > 0.0 ? static_cast<double>(o.iterations) / o.total_seconds : 0.0;
      out << (c + 1) << ',' << sampler_label << ',' << o.target << ',' << o.iterations << ',' << o.burn_in << ','
          << detail::fmt(o.acceptance_rate()) << ',' << detail::fmt(ips) << ',' << o.estimator_failures << ','
          << (gold ? detail::fmt(s.chain_mse[c]) : std::string()) << '\n';
    }
    if (gold) out << "all,,,,,,,," << detail::fmt(*s.avg_mse) << '\n';
  }
  return s;
}

/// Plain-text key=value record of the run.
inline void write_run_metadata(const RunConfig& c, const std::vector<ChainOutput>& outputs,
                               const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "model=" << to_string(c.kind) << '\n';
  out << "sampler=" << to_string(c.chain.sampler) << '\n';
  out << "proposal=" << to_string(c.chain.proposal) << '\n';
  out << "acceptance=" << to_string(c.chain.acceptance) << '\n';
  out << "target=" << target_label(c.chain.acceptance) << '\n';
  out << "chains=" << c.chains << '\n';
  out << "seed=" << c.seed << '\n';
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    out << "chain_" << (i + 1) << ".seed=" << outputs[i].seed << '\n';
    out << "chain_" << (i + 1) << ".iterations=" << outputs[i].iterations << '\n';
  }
  for (const auto& [k, v] : c.echo) out << "config." << k << '=' << v << '\n';
}

}  // namespace parni
