#ifndef CPGARMA_IO_HPP
#define CPGARMA_IO_HPP

// Data ingestion, JSON run configuration, and result persistence.
// Every output file starts with a comment line recording the tool version,
// the seed, and a hash of the effective configuration, so reruns with
// identical inputs are byte-identical.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpgarma/diagnostics.hpp"
#include "cpgarma/garma.hpp"
#include "cpgarma/mcmc.hpp"
#include "cpgarma/prediction.hpp"
#include "cpgarma/series.hpp"

namespace cpgarma {

inline constexpr const char* kVersion = "0.1.0";

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_count(const std::string& s, long& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  try {
    out = std::stol(s);
  } catch (const std::exception&) {
    return false;
  }
  return out >= 0;
}

}  // namespace detail

// One non-negative integer per line; a non-numeric first line is treated as
// a header.  Errors carry the offending line number.
inline CountSeries load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open file: " + path);
  }
  CountSeries series;
  series.source_path = path;
  series.name = path;
  std::string line;
  long line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    long value = 0;
    if (!detail::parse_count(t, value)) {
      if (first_content_line) {
        first_content_line = false;
        continue;  // header
      }
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": expected a non-negative integer, got \"" + t + "\"");
    }
    first_content_line = false;
    series.values.push_back(value);
  }
  if (series.values.empty()) {
    throw DataError(path + ": no observations found");
  }
  if (series.values.size() < 2) {
    throw DataError(path + ": a count series needs at least 2 observations");
  }
  return series;
}

struct RunConfig {
  int p = 1;
  int q = 1;
  double c = 0.1;
  PriorSpec prior;
  McmcConfig mcmc;
  Kernel kernel = Kernel::Exchange;
  long prediction_L = 1000;
  std::string output_dir = ".";
  TruncationPolicy policy;  // direct kernel / pmf oracle only
  bool seed_set = false;    // seed given explicitly (config or flag)

  ModelOrder order() const { return ModelOrder(p, q, c); }
};

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["model"] = {{"p", cfg.p}, {"q", cfg.q}, {"c", cfg.c}};
  j["prior"] = {{"sd_phi", cfg.prior.sd_phi},
                {"sd_theta", cfg.prior.sd_theta},
                {"sd_delta", cfg.prior.sd_delta}};
  j["mcmc"] = {{"iterations", cfg.mcmc.iterations},
               {"burn_in", cfg.mcmc.burn_in},
               {"thin", cfg.mcmc.thin},
               {"target_accept", cfg.mcmc.target_accept},
               {"seed", cfg.mcmc.seed},
               {"adapt_interval", cfg.mcmc.adapt_interval}};
  if (!cfg.mcmc.initial_step_sizes.empty()) {
    j["mcmc"]["initial_step_sizes"] = cfg.mcmc.initial_step_sizes;
  }
  j["kernel"] = cfg.kernel == Kernel::Exchange ? "exchange" : "direct";
  j["prediction_L"] = cfg.prediction_L;
  // output_dir is deliberately excluded: it does not affect the statistical
  // content, and keeping it out makes reruns into different directories
  // byte-identical (same config hash in every output header).
  return j;
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj,
                           const std::set<std::string>& allowed,
                           const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown config field: " + prefix + key);
    }
    (void)value;
  }
}

template <typename T>
T get_field(const nlohmann::json& obj, const std::string& key,
            const std::string& prefix, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("invalid value for config field: " + prefix + key);
  }
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  detail::reject_unknown(
      j, {"model", "prior", "mcmc", "kernel", "prediction_L", "output_dir"}, "");
  if (j.contains("model")) {
    const auto& m = j.at("model");
    detail::reject_unknown(m, {"p", "q", "c"}, "model.");
    cfg.p = detail::get_field<int>(m, "p", "model.", cfg.p);
    cfg.q = detail::get_field<int>(m, "q", "model.", cfg.q);
    cfg.c = detail::get_field<double>(m, "c", "model.", cfg.c);
  }
  if (j.contains("prior")) {
    const auto& p = j.at("prior");
    detail::reject_unknown(p, {"sd_phi", "sd_theta", "sd_delta"}, "prior.");
    cfg.prior.sd_phi = detail::get_field<double>(p, "sd_phi", "prior.", cfg.prior.sd_phi);
    cfg.prior.sd_theta =
        detail::get_field<double>(p, "sd_theta", "prior.", cfg.prior.sd_theta);
    cfg.prior.sd_delta =
        detail::get_field<double>(p, "sd_delta", "prior.", cfg.prior.sd_delta);
  }
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    detail::reject_unknown(m,
                           {"iterations", "burn_in", "thin", "target_accept",
                            "seed", "initial_step_sizes", "adapt_interval"},
                           "mcmc.");
    cfg.mcmc.iterations =
        detail::get_field<long>(m, "iterations", "mcmc.", cfg.mcmc.iterations);
    cfg.mcmc.burn_in = detail::get_field<long>(m, "burn_in", "mcmc.", cfg.mcmc.burn_in);
    cfg.mcmc.thin = detail::get_field<long>(m, "thin", "mcmc.", cfg.mcmc.thin);
    cfg.mcmc.target_accept = detail::get_field<double>(m, "target_accept", "mcmc.",
                                                       cfg.mcmc.target_accept);
    if (m.contains("seed")) {
      cfg.mcmc.seed =
          detail::get_field<std::uint64_t>(m, "seed", "mcmc.", cfg.mcmc.seed);
      cfg.seed_set = true;
    }
    cfg.mcmc.initial_step_sizes = detail::get_field<std::vector<double>>(
        m, "initial_step_sizes", "mcmc.", cfg.mcmc.initial_step_sizes);
    cfg.mcmc.adapt_interval = detail::get_field<long>(m, "adapt_interval", "mcmc.",
                                                      cfg.mcmc.adapt_interval);
  }
  if (j.contains("kernel")) {
    const std::string k = detail::get_field<std::string>(j, "kernel", "", "exchange");
    if (k == "exchange") {
      cfg.kernel = Kernel::Exchange;
    } else if (k == "direct") {
      cfg.kernel = Kernel::Direct;
    } else {
      throw ConfigError("invalid value for config field: kernel (want "
                        "\"exchange\" or \"direct\")");
    }
  }
  cfg.prediction_L =
      detail::get_field<long>(j, "prediction_L", "", cfg.prediction_L);
  cfg.output_dir = detail::get_field<std::string>(j, "output_dir", "", cfg.output_dir);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }
  return parse_config(j);
}

// FNV-1a over the canonical config dump; stable across runs and builds.
inline std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string output_header(std::uint64_t seed, std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << "# cpgarma " << kVersion << " seed=" << seed << " config=" << std::hex
     << cfg_hash << std::dec << "\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write file: " + path);
  }
  out << content;
}

inline void write_samples_csv(const std::string& path, const ChainResult& chain,
                              const ModelOrder& order, std::uint64_t seed,
                              std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash);
  os << "iteration";
  for (const std::string& n : coefficient_names(order)) os << "," << n;
  os << ",log_prior,log_q_sum\n";
  for (const PosteriorSample& s : chain.samples) {
    os << s.iteration;
    for (double v : s.coeffs.to_flat()) os << "," << format_double(v);
    os << "," << format_double(s.log_prior) << "," << format_double(s.log_q_sum)
       << "\n";
  }
  write_file(path, os.str());
}

inline void write_summary_json(const std::string& path,
                               const ChainSummary& summary,
                               const RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = cfg.mcmc.seed;
  j["config"] = config_to_json(cfg);
  j["accept_rate"] = summary.accept_rate;
  j["clamp_hits"] = summary.clamp_hits;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const CoefficientSummary& c : summary.coefficients) {
    coeffs.push_back({{"name", c.name},
                      {"mean", c.mean},
                      {"sd", c.sd},
                      {"q2.5", c.q2_5},
                      {"q50", c.q50},
                      {"q97.5", c.q97_5},
                      {"ess", c.ess},
                      {"acf", c.acf}});
  }
  j["coefficients"] = coeffs;
  write_file(path, j.dump(2) + "\n");
}

inline void write_predictive_csv(const std::string& path,
                                 const PredictivePmf& pmf, std::uint64_t seed,
                                 std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash) << "k,p\n";
  for (const auto& [k, p] : pmf.probs) {
    os << k << "," << format_double(p) << "\n";
  }
  write_file(path, os.str());
}

inline void write_mu_path_csv(const std::string& path,
                              const std::vector<MuPathPoint>& mu_path,
                              const std::vector<long>& y, std::uint64_t seed,
                              std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash) << "t,y,mu_mean,mu_lower,mu_upper\n";
  for (const MuPathPoint& pt : mu_path) {
    os << pt.t << "," << y[pt.t - 1] << "," << format_double(pt.mean) << ","
       << format_double(pt.lower) << "," << format_double(pt.upper) << "\n";
  }
  write_file(path, os.str());
}

inline void write_series_csv(const std::string& path, const CountSeries& series,
                             std::uint64_t seed, std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash) << "count\n";
  for (long v : series.values) os << v << "\n";
  write_file(path, os.str());
}

inline void write_acf_csv(const std::string& path, const ChainSummary& summary,
                          std::uint64_t seed, std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash) << "lag";
  for (const CoefficientSummary& c : summary.coefficients) os << "," << c.name;
  os << "\n";
  std::size_t max_lags = 0;
  for (const CoefficientSummary& c : summary.coefficients) {
    max_lags = std::max(max_lags, c.acf.size());
  }
  for (std::size_t k = 0; k < max_lags; ++k) {
    os << k;
    for (const CoefficientSummary& c : summary.coefficients) {
      os << ",";
      if (k < c.acf.size()) os << format_double(c.acf[k]);
    }
    os << "\n";
  }
  write_file(path, os.str());
}

inline void write_trace_csv(const std::string& path, const ChainResult& chain,
                            const ModelOrder& order, std::uint64_t seed,
                            std::uint64_t cfg_hash) {
  std::ostringstream os;
  os << output_header(seed, cfg_hash) << "sample,iteration";
  for (const std::string& n : coefficient_names(order)) os << "," << n;
  os << "\n";
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    os << i << "," << chain.samples[i].iteration;
    for (double v : chain.samples[i].coeffs.to_flat()) {
      os << "," << format_double(v);
    }
    os << "\n";
  }
  write_file(path, os.str());
}

// Reads a samples.csv produced by write_samples_csv.
inline std::vector<PosteriorSample> load_samples_csv(const std::string& path,
                                                     const ModelOrder& order) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open samples file: " + path);
  }
  std::vector<PosteriorSample> samples;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != order.dim() + 3) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": expected " + std::to_string(order.dim() + 3) +
                      " fields, got " + std::to_string(fields.size()));
    }
    try {
      PosteriorSample s{GarmaCoefficients::zeros(order), 0, 0.0, 0.0};
      s.iteration = std::stol(fields[0]);
      std::vector<double> flat(order.dim());
      for (int i = 0; i < order.dim(); ++i) flat[i] = std::stod(fields[1 + i]);
      s.coeffs = GarmaCoefficients::from_flat(flat, order);
      s.log_prior = std::stod(fields[order.dim() + 1]);
      s.log_q_sum = std::stod(fields[order.dim() + 2]);
      samples.push_back(std::move(s));
    } catch (const std::exception&) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": malformed sample row");
    }
  }
  if (samples.empty()) {
    throw DataError(path + ": no samples found");
  }
  return samples;
}

}  // namespace cpgarma

#endif  // CPGARMA_IO_HPP
