#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmt/estimators.hpp"
#include "rmt/types.hpp"

// CSV and JSON export: spectra files, prediction/verification curves, run
// manifests. Doubles are written with 17 significant digits so files
// round-trip bit-exactly; reports avoid wall-clock fields so reruns with a
// different thread count stay byte-identical.

namespace rmt {

inline constexpr const char* kToolVersion = "rmt 1.0.0";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// FNV-1a over a canonical key=value rendering of the sampling config; ties a
// spectra file to the settings that produced it.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string ensemble_param_string(const EnsembleSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      break;
    case EnsembleKind::spherical_product:
      os << "k=" << std::get<SphericalParams>(spec.params).k << ";";
      break;
    case EnsembleKind::rajan_abbott: {
      const auto& p = std::get<RajanAbbottParams>(spec.params);
      os << "f_e=" << format_double(p.f_e) << ";sigma_e=" << format_double(p.sigma_e)
         << ";sigma_i=" << format_double(p.sigma_i) << ";";
      break;
    }
    case EnsembleKind::ginibre_diffusion:
      os << "t=" << format_double(std::get<DiffusionParams>(spec.params).t) << ";";
      break;
    case EnsembleKind::regular_digraph:
      os << "k=" << std::get<GraphParams>(spec.params).k << ";";
      break;
  }
  return os.str();
}

inline std::string config_hash(const EnsembleSpec& spec, std::uint64_t seed,
                               int trials) {
  std::ostringstream os;
  os << "ensemble=" << ensemble_kind_name(spec.kind) << ";n=" << spec.n << ";"
     << ensemble_param_string(spec) << "trials=" << trials << ";seed=" << seed
     << ";";
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(os.str()));
  return buf;
}

inline nlohmann::json ensemble_to_json(const EnsembleSpec& spec) {
  nlohmann::json j;
  j["kind"] = ensemble_kind_name(spec.kind);
  j["n"] = spec.n;
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      break;
    case EnsembleKind::spherical_product:
      j["k"] = std::get<SphericalParams>(spec.params).k;
      break;
    case EnsembleKind::rajan_abbott: {
      const auto& p = std::get<RajanAbbottParams>(spec.params);
      j["f_e"] = p.f_e;
      j["sigma_e"] = p.sigma_e;
      j["sigma_i"] = p.sigma_i;
      break;
    }
    case EnsembleKind::ginibre_diffusion:
      j["t"] = std::get<DiffusionParams>(spec.params).t;
      break;
    case EnsembleKind::regular_digraph:
      j["k"] = std::get<GraphParams>(spec.params).k;
      break;
  }
  return j;
}

// --- spectra files -----------------------------------------------------------

// One row per eigenvalue: trial,re,im,is_real. Complex pairs emit both
// conjugates so each trial contributes exactly n rows.
inline void write_spectra_csv(const std::filesystem::path& path,
                              const std::vector<Spectrum>& spectra) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << "trial,re,im,is_real\n";
  for (std::size_t t = 0; t < spectra.size(); ++t) {
    for (double v : spectra[t].real_eigs)
      out << t << "," << format_double(v) << ",0,1\n";
    for (const ComplexPair& p : spectra[t].complex_pairs) {
      out << t << "," << format_double(p.x) << "," << format_double(p.y) << ",0\n";
      out << t << "," << format_double(p.x) << "," << format_double(-p.y) << ",0\n";
    }
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

inline std::vector<Spectrum> read_spectra_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spectra file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "trial,re,im,is_real")
    throw ConfigError("spectra file has unexpected header: " + path.string());
  std::map<long, Spectrum> by_trial;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long trial;
    double re, im;
    int is_real;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%d", &trial, &re, &im, &is_real) != 4)
      throw ConfigError("spectra file: bad row at line " + std::to_string(lineno));
    Spectrum& s = by_trial[trial];
    if (is_real) {
      s.real_eigs.push_back(re);
      s.n += 1;
    } else if (im > 0.0) {
      s.complex_pairs.push_back({re, im});
      s.n += 2;
    }  // negative-imaginary rows are the implicit conjugates
  }
  std::vector<Spectrum> spectra;
  spectra.reserve(by_trial.size());
  for (auto& [trial, s] : by_trial) spectra.push_back(std::move(s));
  for (const Spectrum& s : spectra)
    if (!spectra.empty() && s.n != spectra.front().n)
      throw ConfigError("spectra file: inconsistent eigenvalue count per trial");
  return spectra;
}

// --- curve tables -------------------------------------------------------------

struct CurveColumn {
  std::string name;
  const std::vector<double>* values;
};

inline void write_curve_csv(const std::filesystem::path& path,
                            const std::vector<std::string>& header_comments,
                            const std::vector<double>& xs,
                            const std::vector<CurveColumn>& columns) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  for (const auto& c : header_comments) out << "# " << c << "\n";
  out << "x";
  for (const auto& col : columns) out << "," << col.name;
  out << "\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << format_double(xs[i]);
    for (const auto& col : columns) out << "," << format_double((*col.values)[i]);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

// --- verification report -------------------------------------------------------

struct VerificationReport {
  double alpha = 0.0;
  double fit_residual = 0.0;
  double l1 = 0.0;
  double ks = 0.0;
  double excluded_mass = 0.0;
  std::int64_t excluded_pf = 0;
  std::int64_t excluded_zero = 0;
  int bins_used = 0;
  double norm_const = 0.0;

  // provenance
  EnsembleSpec ensemble;
  std::uint64_t seed = 0;
  int trials = 0;
  StripSpec strip;
  HistSpec bins;
  int trace_flagged = 0;
};

inline nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["fit_residual"] = r.fit_residual;
  j["l1"] = r.l1;
  j["ks"] = r.ks;
  j["excluded_mass"] = r.excluded_mass;
  j["bins_used"] = r.bins_used;
  j["excluded"] = {{"perron_frobenius", r.excluded_pf}, {"zero", r.excluded_zero}};
  j["norm_const"] = r.norm_const;
  j["provenance"] = {
      {"ensemble", ensemble_to_json(r.ensemble)},
      {"seed", r.seed},
      {"trials", r.trials},
      {"strip", {{"y_lo", r.strip.y_lo}, {"y_hi", r.strip.y_hi}}},
      {"bins", {{"lo", r.bins.lo}, {"hi", r.bins.hi}, {"count", r.bins.bins}}},
      {"trace_flagged", r.trace_flagged},
      {"config_hash", config_hash(r.ensemble, r.seed, r.trials)},
      {"tool_version", kToolVersion},
  };
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write failed: " + path.string());
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace rmt
