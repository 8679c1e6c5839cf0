// Command-line driver: sample ensembles, tabulate analytic predictions,
// verify the sqrt relation between real and complex eigenvalue densities,
// and run the partial-Schur property suite.
//
// Exit codes: 0 ok, 1 usage/config, 2 numerical failure, 3 invariant breach.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rmt/defaults.hpp"
#include "rmt/densities.hpp"
#include "rmt/io.hpp"
#include "rmt/runner.hpp"
#include "rmt/schur_check.hpp"

namespace fs = std::filesystem;

namespace {

struct EnsembleOpts {
  std::string ensemble = "ginibre";
  int n = 100;
  int k = 0;  // 0 = per-ensemble default (1 spherical factor, degree 2)
  double t = 1.0;
  double f_e = 0.8;
  double sigma_e = 0.15;
  double sigma_i = 0.9;

  rmt::EnsembleSpec build() const {
    rmt::EnsembleSpec spec;
    spec.kind = rmt::parse_ensemble_kind(ensemble);
    spec.n = n;
    switch (spec.kind) {
      case rmt::EnsembleKind::ginibre:
        break;
      case rmt::EnsembleKind::spherical_product:
        spec.params = rmt::SphericalParams{k > 0 ? k : 1};
        break;
      case rmt::EnsembleKind::rajan_abbott:
        spec.params = rmt::RajanAbbottParams{f_e, sigma_e, sigma_i};
        break;
      case rmt::EnsembleKind::ginibre_diffusion:
        spec.params = rmt::DiffusionParams{t};
        break;
      case rmt::EnsembleKind::regular_digraph:
        spec.params = rmt::GraphParams{k > 0 ? k : 2};
        break;
    }
    rmt::validate(spec);
    return spec;
  }
};

void add_ensemble_flags(CLI::App* cmd, EnsembleOpts& o) {
  cmd->add_option("--ensemble", o.ensemble,
                  "ginibre | spherical_product | rajan_abbott | "
                  "ginibre_diffusion | regular_digraph")
      ->capture_default_str();
  cmd->add_option("--n", o.n, "matrix dimension")->capture_default_str();
  cmd->add_option("--k", o.k,
                  "spherical factor count / digraph degree (default 1 / 2)");
  cmd->add_option("--t", o.t, "diffusion time")->capture_default_str();
  cmd->add_option("--f-e", o.f_e, "excitatory column fraction")->capture_default_str();
  cmd->add_option("--sigma-e", o.sigma_e, "excitatory std")->capture_default_str();
  cmd->add_option("--sigma-i", o.sigma_i, "inhibitory std")->capture_default_str();
}

struct GridOpts {
  int bins = 41;
  std::optional<double> xmin, xmax;

  rmt::HistSpec resolve(const rmt::EnsembleSpec& spec) const {
    const double half = rmt::default_halfwidth(spec);
    return {xmin.value_or(-half), xmax.value_or(half), bins};
  }
};

void add_grid_flags(CLI::App* cmd, GridOpts& g) {
  cmd->add_option("--bins", g.bins, "histogram bin count")->capture_default_str();
  cmd->add_option("--xmin", g.xmin, "histogram lower edge (default: ensemble support)");
  cmd->add_option("--xmax", g.xmax, "histogram upper edge (default: ensemble support)");
}

nlohmann::json base_manifest(const rmt::EnsembleSpec& spec, std::uint64_t seed,
                             int trials, double wall_time) {
  nlohmann::json m;
  m["tool_version"] = rmt::kToolVersion;
  m["ensemble"] = rmt::ensemble_to_json(spec);
  m["seed"] = seed;
  m["trials"] = trials;
  m["config_hash"] = rmt::config_hash(spec, seed, trials);
  m["wall_time_seconds"] = wall_time;
  return m;
}

int run_sample(const EnsembleOpts& eo, const GridOpts& grid, std::uint64_t seed,
               int trials, int threads, const std::string& out_dir,
               bool hist_only) {
  const rmt::EnsembleSpec spec = eo.build();
  fs::create_directories(out_dir);
  const rmt::ExclusionPolicy policy = rmt::default_exclusions(spec);

  if (hist_only) {
    const rmt::HistSpec hist = grid.resolve(spec);
    rmt::HistRun run = rmt::run_ensemble_hist(spec, seed, trials, threads, hist,
                                              policy, std::nullopt);
    const fs::path hist_path = fs::path(out_dir) / "real_hist.csv";
    {
      std::ofstream out(hist_path);
      out << "bin_lo,bin_hi,count\n";
      const rmt::Histogram1D& h = run.real.hist();
      for (int i = 0; i < h.bins(); ++i)
        out << rmt::format_double(h.edge(i)) << "," << rmt::format_double(h.edge(i + 1))
            << "," << h.count(i) << "\n";
    }
    nlohmann::json m = base_manifest(spec, seed, trials, run.elapsed_seconds);
    m["mode"] = "hist_only";
    m["bins"] = {{"lo", run.real.hist().lo()}, {"hi", run.real.hist().hi()},
                 {"count", run.real.hist().bins()}};
    m["overflow"] = run.real.hist().overflow();
    m["exclusions"] = {{"perron_frobenius", run.real.excluded_pf()},
                       {"zero", run.real.excluded_zero()}};
    m["trace_flagged"] = run.trace_flagged;
    m["outputs"] = {hist_path.filename().string()};
    rmt::write_json(fs::path(out_dir) / "real_hist.manifest.json", m);
    std::cout << "wrote " << hist_path.string() << " ("
              << run.real.hist().total_in_range() << " in-range real eigenvalues)\n";
    return 0;
  }

  rmt::EnsembleRun run = rmt::run_ensemble(spec, seed, trials, threads);
  const fs::path spectra_path = fs::path(out_dir) / "spectra.csv";
  rmt::write_spectra_csv(spectra_path, run.spectra);
  nlohmann::json m = base_manifest(spec, seed, trials, run.elapsed_seconds);
  m["mode"] = "spectra";
  m["trace_flagged"] = run.trace_flagged;
  m["outputs"] = {spectra_path.filename().string()};
  rmt::write_json(fs::path(out_dir) / "spectra.manifest.json", m);
  std::cout << "wrote " << spectra_path.string() << " (" << trials
            << " trials, n=" << spec.n << ")\n";
  return 0;
}

int run_predict(const EnsembleOpts& eo, const GridOpts& grid, int points,
                const std::string& out_dir) {
  const rmt::EnsembleSpec spec = eo.build();
  fs::create_directories(out_dir);
  const rmt::HistSpec window = grid.resolve(spec);
  const rmt::DensityCurve curve =
      rmt::predict_curve(spec, window.lo, window.hi, points);

  std::ostringstream support;
  for (std::size_t i = 0; i < curve.support.size(); ++i) {
    if (i) support << " U ";
    support << "[" << rmt::format_double(curve.support[i].lo) << ", "
            << rmt::format_double(curve.support[i].hi) << "]";
  }
  const fs::path path = fs::path(out_dir) / "prediction.csv";
  rmt::write_curve_csv(
      path,
      {std::string("ensemble=") + rmt::ensemble_kind_name(spec.kind) +
           " n=" + std::to_string(spec.n) + " " + rmt::ensemble_param_string(spec),
       "norm_const=" + rmt::format_double(curve.norm_const),
       "support=" + support.str()},
      curve.xs,
      {{"rho_r_pred", &curve.rho_r}, {"rho_c_axis_pred", &curve.rho_c_axis}});

  nlohmann::json m = base_manifest(spec, 0, 0, 0.0);
  m["mode"] = "predict";
  m["norm_const"] = curve.norm_const;
  m["points"] = points;
  m["window"] = {{"lo", window.lo}, {"hi", window.hi}};
  m["outputs"] = {path.filename().string()};
  rmt::write_json(fs::path(out_dir) / "prediction.manifest.json", m);
  std::cout << "wrote " << path.string() << " (norm_const="
            << rmt::format_double(curve.norm_const) << ")\n";
  return 0;
}

int run_verify(const EnsembleOpts& eo, const GridOpts& grid, std::uint64_t seed,
               int trials, int threads, const std::string& out_dir,
               std::optional<double> strip_lo, std::optional<double> strip_hi,
               const std::string& spectra_in, std::optional<bool> exclude_zero) {
  const rmt::EnsembleSpec spec = eo.build();
  fs::create_directories(out_dir);

  std::vector<rmt::Spectrum> spectra;
  int trace_flagged = 0;
  double wall = 0.0;
  if (!spectra_in.empty()) {
    // Refuse spectra files whose manifest does not match this configuration.
    fs::path manifest_path = spectra_in;
    manifest_path.replace_extension(".manifest.json");
    const nlohmann::json m = rmt::read_json(manifest_path);
    const std::string want = rmt::config_hash(spec, seed, trials);
    const std::string have = m.value("config_hash", "");
    if (have != want)
      throw rmt::ConfigError("spectra manifest hash " + have +
                             " does not match the requested config " + want +
                             " (" + manifest_path.string() + ")");
    spectra = rmt::read_spectra_csv(spectra_in);
    if (static_cast<int>(spectra.size()) != trials ||
        (!spectra.empty() && spectra.front().n != spec.n))
      throw rmt::ConfigError("spectra file contents disagree with the manifest");
  } else {
    rmt::EnsembleRun run = rmt::run_ensemble(spec, seed, trials, threads);
    spectra = std::move(run.spectra);
    trace_flagged = run.trace_flagged;
    wall = run.elapsed_seconds;
  }

  rmt::ExclusionPolicy policy = rmt::default_exclusions(spec);
  if (exclude_zero) policy.exclude_zero = *exclude_zero;

  const rmt::HistSpec hist = grid.resolve(spec);
  rmt::StripSpec strip = rmt::default_strip(spec);
  if (strip_lo) strip.y_lo = *strip_lo;
  if (strip_hi) strip.y_hi = *strip_hi;

  const rmt::RealAxisAccumulator racc = rmt::accumulate_rho_r(spectra, hist, policy);
  const rmt::DensitySamples rho_r_hat = racc.density();
  const rmt::DensitySamples rho_c_hat = rmt::estimate_rho_c_axis(spectra, strip, hist);
  const rmt::FitResult fit = rmt::fit_sqrt_relation(rho_r_hat, rho_c_hat);
  const rmt::Score score = rmt::score_against_catalog(
      racc.hist(), [&](double x) { return rmt::rho_r_prediction(spec, x); });

  rmt::VerificationReport report;
  report.alpha = fit.alpha;
  report.fit_residual = fit.residual;
  report.l1 = score.l1;
  report.ks = score.ks;
  report.excluded_mass = racc.excluded_mass();
  report.excluded_pf = racc.excluded_pf();
  report.excluded_zero = racc.excluded_zero();
  report.bins_used = fit.bins_used;
  report.norm_const = rmt::sqrt_relation_const(spec);
  report.ensemble = spec;
  report.seed = seed;
  report.trials = trials;
  report.strip = strip;
  report.bins = hist;
  report.trace_flagged = trace_flagged;
  rmt::write_json(fs::path(out_dir) / "report.json", rmt::report_to_json(report));

  // Plot data: empirical and predicted densities on the bin centers.
  std::vector<double> rho_r_pred(rho_r_hat.x.size()), rho_c_pred(rho_r_hat.x.size());
  for (std::size_t i = 0; i < rho_r_hat.x.size(); ++i) {
    rho_r_pred[i] = rmt::rho_r_prediction(spec, rho_r_hat.x[i]);
    rho_c_pred[i] = rmt::rho_c_axis_prediction(spec, rho_r_hat.x[i]);
  }
  rmt::write_curve_csv(fs::path(out_dir) / "curves.csv",
                       {std::string("ensemble=") + rmt::ensemble_kind_name(spec.kind) +
                            " n=" + std::to_string(spec.n),
                        "norm_const=" + rmt::format_double(report.norm_const)},
                       rho_r_hat.x,
                       {{"rho_r_hat", &rho_r_hat.rho},
                        {"rho_r_pred", &rho_r_pred},
                        {"rho_c_hat", &rho_c_hat.rho},
                        {"rho_c_pred", &rho_c_pred}});

  nlohmann::json m = base_manifest(spec, seed, trials, wall);
  m["mode"] = "verify";
  m["bins"] = {{"lo", hist.lo}, {"hi", hist.hi}, {"count", hist.bins}};
  m["strip"] = {{"y_lo", strip.y_lo}, {"y_hi", strip.y_hi}};
  m["exclusions"] = {{"perron_frobenius", racc.excluded_pf()}, {"zero", racc.excluded_zero()}};
  m["normalization_constants"] = {{"sqrt_relation", report.norm_const}};
  m["trace_flagged"] = trace_flagged;
  m["outputs"] = {"report.json", "curves.csv"};
  rmt::write_json(fs::path(out_dir) / "verify.manifest.json", m);

  std::cout << "alpha=" << rmt::format_double(fit.alpha)
            << " fit_residual=" << rmt::format_double(fit.residual)
            << " l1=" << rmt::format_double(score.l1)
            << " ks=" << rmt::format_double(score.ks)
            << " excluded_mass=" << rmt::format_double(racc.excluded_mass()) << "\n";
  return 0;
}

int run_schur_check(int n, int trials, std::uint64_t seed) {
  const rmt::SchurCheckReport rep = rmt::schur_check(n, trials, seed);
  std::cout << "schur-check n=" << rep.n << " trials=" << rep.trials << "\n"
            << "  real pairs tested:       " << rep.real_pairs_tested << "\n"
            << "  complex pairs tested:    " << rep.complex_pairs_tested << "\n"
            << "  max reconstruction rel:  " << rmt::format_double(rep.max_reconstruction_rel) << "\n"
            << "  max orthogonality:       " << rmt::format_double(rep.max_orthogonality_defect) << "\n"
            << "  max |y^2-bc|/y^2:        " << rmt::format_double(rep.max_y2_bc_rel) << "\n"
            << "  max spectral mismatch:   " << rmt::format_double(rep.max_spectral_mismatch) << "\n"
            << "  degeneracy identities:   " << (rep.degeneracies_exact ? "exact" : "VIOLATED") << "\n";
  if (!rep.ok()) {
    std::cerr << "schur-check: invariant breach at stream " << rep.worst_stream
              << " (seed " << seed << ")\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"real asymmetric random matrices: spectra, densities, and the "
               "sqrt relation between them"};
  app.set_config("--config", "", "config file (INI sections, flags override)");
  app.require_subcommand(1);

  EnsembleOpts eo;
  GridOpts grid;
  std::uint64_t seed = 1;
  int trials = 10;
  int threads = 0;
  std::string out_dir = ".";
  bool hist_only = false;
  int points = 401;
  std::optional<double> strip_lo, strip_hi;
  std::string spectra_in;
  std::optional<bool> exclude_zero;
  int sc_n = 8, sc_trials = 100;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--trials", trials, "number of sampled matrices")->capture_default_str();
    cmd->add_option("--seed", seed, "master seed; trial i uses stream i")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0 = RMT_THREADS or hardware)")
        ->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  };

  CLI::App* sample = app.add_subcommand("sample", "sample spectra to CSV");
  add_ensemble_flags(sample, eo);
  add_run_flags(sample);
  add_grid_flags(sample, grid);
  sample->add_flag("--hist-only", hist_only,
                   "accumulate real-axis histogram online, do not write raw spectra");

  CLI::App* predict = app.add_subcommand("predict", "tabulate analytic densities");
  add_ensemble_flags(predict, eo);
  add_grid_flags(predict, grid);
  predict->add_option("--points", points, "grid points")->capture_default_str();
  predict->add_option("--out-dir", out_dir, "output directory")->capture_default_str();

  CLI::App* verify = app.add_subcommand(
      "verify", "sample, estimate densities, fit the sqrt relation, score");
  add_ensemble_flags(verify, eo);
  add_run_flags(verify);
  add_grid_flags(verify, grid);
  verify->add_option("--strip-lo", strip_lo, "strip lower edge (default 3/sqrt(n))");
  verify->add_option("--strip-hi", strip_hi,
                     "strip upper edge (default max(6/sqrt(n), 0.1 support height))");
  verify->add_option("--spectra-in", spectra_in,
                     "reuse a spectra CSV (its manifest must match this config)");
  verify->add_option("--exclude-zero", exclude_zero,
                     "override the zero-eigenvalue point-mass exclusion");

  CLI::App* schur = app.add_subcommand("schur-check", "partial Schur property suite");
  schur->add_option("--n", sc_n, "matrix dimension")->capture_default_str();
  schur->add_option("--trials", sc_trials, "matrices to test")->capture_default_str();
  schur->add_option("--seed", seed, "master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sample->parsed())
      return run_sample(eo, grid, seed, trials, threads, out_dir, hist_only);
    if (predict->parsed()) return run_predict(eo, grid, points, out_dir);
    if (verify->parsed())
      return run_verify(eo, grid, seed, trials, threads, out_dir, strip_lo,
                        strip_hi, spectra_in, exclude_zero);
    if (schur->parsed()) return run_schur_check(sc_n, sc_trials, seed);
  } catch (const rmt::ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return 1;
  } catch (const rmt::InvariantError& e) {
    std::cerr << "error (invariant): " << e.what() << "\n";
    return 3;
  } catch (const rmt::NumericalError& e) {
    std::cerr << "error (numerical): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
