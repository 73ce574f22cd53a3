#include "gbspec/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gbspec/version.hpp"

namespace gbspec {

namespace {

std::vector<std::string> provenance(const ExperimentConfig& cfg,
                                    const std::string& subcommand, int workers) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  return {
      "subcommand=" + subcommand,
      "config_hash=" + std::string(hash),
      "version=" + std::string(kVersion),
      "workers=" + std::to_string(workers),
      "timestamp=" + std::to_string(secs),
  };
}

SpectralGap gap_or_throw(const PeriodicPotential& v, double h, int momentum_grid,
                         int nbands, int workers) {
  auto gap = find_gap(v, h, momentum_grid, nbands, workers);
  if (!gap)
    throw NumericError("no spectral gap found for this potential at h = " +
                       fmt_f17(h) + "; gap-based experiments cannot run");
  return *gap;
}

std::string residual_cell(double r) { return r < 0.0 ? std::string() : fmt_f17(r); }

}  // namespace

PeriodicPotential potential_from(const ExperimentConfig& cfg) {
  const std::string family = cfg.get_string("potential", "family", "cosine");
  if (family == "flat") return PeriodicPotential::flat();
  const double amplitude = cfg.get_double("potential", "amplitude", 30.0);
  if (family == "muffin") {
    if (!cfg.has("potential", "radius") || !cfg.has("potential", "ramp"))
      throw ConfigError("potential.family = muffin requires potential.radius and potential.ramp");
    return PeriodicPotential::smooth_muffin(amplitude,
                                            cfg.get_double("potential", "radius", 0.0),
                                            cfg.get_double("potential", "ramp", 0.0));
  }
  return PeriodicPotential::cosine_sum(amplitude);
}

EigOptions eig_from(const ExperimentConfig& cfg) {
  EigOptions eig;
  eig.residual_tol = cfg.get_double("eig", "residual_tol", 1e-8);
  eig.max_iter = static_cast<int>(cfg.get_int("eig", "max_iter", 2000));
  return eig;
}

BandsResult run_bands(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto v = potential_from(cfg);
  const double h = cfg.get_mesh("grid", "h", 0.0625);
  const int M = static_cast<int>(cfg.get_int("bands", "momentum_grid", 12));
  const int nb = static_cast<int>(cfg.get_int("bands", "nbands", 8));

  BandsResult res;
  res.sweep = band_sweep(v, h, M, nb, opts.workers);

  CsvWriter csv(opts.out_path, "bands", {"k_x", "k_y", "band_index", "lambda"},
                provenance(cfg, "bands", opts.workers));
  for (const auto& row : res.sweep.rows)
    csv.row({fmt_f17(row.kx), fmt_f17(row.ky), fmt_i(row.band), fmt_f17(row.lambda)});
  csv.finalize();
  return res;
}

FlowResult run_flow(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto v = potential_from(cfg);
  const double h = cfg.get_mesh("grid", "h", 0.05);
  const int n = static_cast<int>(cfg.get_int("flow", "n", 2));
  const int M = static_cast<int>(cfg.get_int("bands", "momentum_grid", 12));
  const int nb = static_cast<int>(cfg.get_int("bands", "nbands", 8));

  const auto gap = gap_or_throw(v, h, M, nb, opts.workers);

  FlowOptions fo;
  fo.t_steps = static_cast<int>(cfg.get_int("flow", "t_steps", 33));
  fo.workers = opts.workers;
  fo.eig = eig_from(cfg);
  fo.eig.residual_tol = std::min(fo.eig.residual_tol, 1e-10);
  fo.crossing_tol_rel = cfg.get_double("flow", "crossing_tol", 1e-6);
  const long n_e = cfg.get_int("flow", "energies", 5);
  if (n_e < 1) throw ConfigError("flow.energies must be >= 1");
  const double w = gap.b - gap.a;
  for (long i = 0; i < n_e; ++i) {
    const double frac_pos =
        n_e == 1 ? 0.5 : 0.25 + 0.5 * static_cast<double>(i) / static_cast<double>(n_e - 1);
    fo.energies.push_back(gap.a + frac_pos * w);
  }

  FlowResult res;
  res.record = dislocation_flow(v, gap, n, fo);

  CsvWriter csv(opts.out_path, "flow", {"t", "branch", "lambda", "count_below_a"},
                provenance(cfg, "flow", opts.workers));
  for (const auto& bp : res.record.branch_points) {
    const auto it = std::lower_bound(res.record.t_grid.begin(), res.record.t_grid.end(),
                                     bp.t - 1e-15);
    const auto ti = static_cast<std::size_t>(it - res.record.t_grid.begin());
    csv.row({fmt_f17(bp.t), fmt_i(bp.branch), fmt_f17(bp.lambda),
             fmt_i(res.record.count_below_a[ti])});
  }
  csv.finalize();

  CsvWriter cross(opts.out_path + ".crossings.csv", "crossings",
                  {"energy", "t_E", "lambda"}, provenance(cfg, "flow", opts.workers));
  for (const auto& c : res.record.crossings)
    cross.row({fmt_f17(c.energy), fmt_f17(c.t_E), fmt_f17(c.lambda_at_tE)});
  cross.finalize();
  return res;
}

FillResult run_fill(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto v = potential_from(cfg);
  const double h = cfg.get_mesh("grid", "h", 0.0625);
  const int M = static_cast<int>(cfg.get_int("bands", "momentum_grid", 12));
  const int nb = static_cast<int>(cfg.get_int("bands", "nbands", 8));
  const int n = static_cast<int>(cfg.get_int("fill", "n", 8));

  FillResult res;
  res.gap = gap_or_throw(v, h, M, nb, opts.workers);
  const double w = res.gap.b - res.gap.a;
  res.eps = cfg.get_double("fill", "eps", w / 8.0);

  const auto thetas = cfg.get_list("fill", "thetas",
                                   {0.5, 0.4, 0.3, 0.22, 0.16, 0.12, 0.09, 0.07, 0.05});

  // Approximate eigenfunction from the dislocation flow at a commensurate
  // mesh near grid.h.
  const int nf = static_cast<int>(cfg.get_int("flow", "n", 2));
  const long qf = std::max(1l, std::lround(1.0 / h / (2 * nf + 1)));
  const double hf = 1.0 / (static_cast<double>(qf) * (2 * nf + 1));
  const auto gap_f = gap_or_throw(v, hf, M, nb, opts.workers);
  const double lo = std::max(res.gap.a, gap_f.a), hi = std::min(res.gap.b, gap_f.b);
  if (!(lo < hi))
    throw NumericError("run_fill: gaps at the box and flow meshes do not overlap");
  const double efrac = cfg.get_double("fill", "energy_frac", 0.5);
  const double energy = lo + efrac * (hi - lo);

  FlowOptions fo;
  fo.t_steps = static_cast<int>(cfg.get_int("flow", "t_steps", 33));
  fo.workers = opts.workers;
  fo.eig = eig_from(cfg);
  fo.eig.residual_tol = std::min(fo.eig.residual_tol, 1e-10);
  fo.energies = {energy};
  const auto flow = dislocation_flow(v, gap_f, nf, fo);

  const int apx_n = static_cast<int>(cfg.get_int("fill", "apx_n", 8));
  res.apx = build_approximate_eigenfunction(v, flow, energy, apx_n, fo.eig);

  FillOptions fopts;
  fopts.m_max = cfg.get_int("fill", "m_max", 200000);
  fopts.eig = eig_from(cfg);
  fopts.workers = opts.workers;
  res.report = rotation_gap_fill(v, res.gap, res.eps, thetas, n, &*res.apx, fopts);

  CsvWriter csv(opts.out_path, "fill", {"theta", "n", "alpha", "beta", "count", "residual"},
                provenance(cfg, "fill", opts.workers));
  for (const auto& row : res.report.rows)
    csv.row({fmt_f17(row.theta), fmt_i(row.n), fmt_f17(row.alpha), fmt_f17(row.beta),
             fmt_i(row.count), residual_cell(row.residual)});
  csv.finalize();
  return res;
}

ScalingResult run_scaling(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto v = potential_from(cfg);
  const double h = cfg.get_mesh("grid", "h", 0.0625);
  const int M = static_cast<int>(cfg.get_int("bands", "momentum_grid", 12));
  const int nb = static_cast<int>(cfg.get_int("bands", "nbands", 8));

  ScalingResult res;
  res.gap = gap_or_throw(v, h, M, nb, opts.workers);
  const double w = res.gap.b - res.gap.a;
  const double alpha = cfg.get_double("scaling", "alpha", res.gap.a + 0.25 * w);
  const double beta = cfg.get_double("scaling", "beta", res.gap.b - 0.25 * w);

  const std::string kind = cfg.get_string("scaling", "kind", "rotation");
  const double theta = cfg.get_double("scaling", "theta", 0.15);
  GrainPotential grain =
      kind == "two-sided"
          ? GrainPotential::two_sided(v, v)
          : GrainPotential::rotation(v, RotationAngle(theta));
  if (kind != "two-sided" && kind != "rotation")
    throw ConfigError("scaling.kind must be rotation or two-sided");

  const auto n_list_d = cfg.get_list("scaling", "n_list", {6, 8, 10, 12});
  std::vector<int> n_list;
  for (double x : n_list_d) n_list.push_back(static_cast<int>(x));

  ScalingOptions so;
  so.eig = eig_from(cfg);
  so.workers = opts.workers;
  res.report = count_scaling(grain, res.gap, alpha, beta, n_list, so);

  // Localization profiles of the counted states (side table).
  for (int n : n_list) {
    const GridSpec grid = GridSpec::box(n, res.gap.h);
    auto A = assemble(grain, grid);
    auto pairs = eigen_range(A, alpha, beta, so.eig);
    const Axis1D ax = grid.x_axis();
    const std::size_t ny = grid.y_axis().count;
    for (const auto& p : pairs) {
      double total = 0.0, in = 0.0;
      for (std::size_t ix = 0; ix < ax.count; ++ix) {
        double col = 0.0;
        for (std::size_t iy = 0; iy < ny; ++iy) col += p.vector[ix * ny + iy] * p.vector[ix * ny + iy];
        total += col;
        if (std::abs(ax.pos(ix)) < n / 2.0) in += col;
      }
      if (in >= 0.5 * total)
        res.profiles.emplace_back(n, localization_profile(p, grid, res.gap));
    }
  }

  CsvWriter csv(opts.out_path, "scaling",
                {"n", "theta", "alpha", "beta", "N", "N_over_n", "N_over_nlogn"},
                provenance(cfg, "scaling", opts.workers));
  for (const auto& row : res.report.rows)
    csv.row({fmt_i(row.n), fmt_f17(row.theta), fmt_f17(row.alpha), fmt_f17(row.beta),
             fmt_i(row.count), fmt_f17(row.count_over_n), fmt_f17(row.count_over_nlogn)});
  csv.finalize();

  CsvWriter loc(opts.out_path + ".localization.csv", "localization",
                {"n", "theta", "lambda", "alpha_hat", "mass_quarter"},
                provenance(cfg, "scaling", opts.workers));
  for (const auto& [n, prof] : res.profiles)
    loc.row({fmt_i(n), fmt_f17(grain.kind() == GrainPotential::Kind::rotation ? grain.parameter() : 0.0),
             fmt_f17(prof.energy), fmt_f17(prof.alpha_hat), fmt_f17(prof.mass_quarter)});
  loc.finalize();
  return res;
}

AlignResult run_align(const ExperimentConfig& cfg, const RunOptions& opts,
                      const AlignOverrides& ov) {
  const double theta = ov.theta ? *ov.theta : cfg.get_double("align", "theta", 0.05);
  const double t = ov.t ? *ov.t : cfg.get_double("align", "t", 0.5);
  const double eps = ov.eps ? *ov.eps : cfg.get_double("align", "eps", 0.2);
  const long mmax = ov.mmax ? *ov.mmax : cfg.get_int("align", "mmax", 1000000);

  AlignResult res;
  res.solution = find_alignment(RotationAngle(theta), t, eps, mmax);

  CsvWriter csv(opts.out_path, "align", {"m", "N", "res_x", "res_y"},
                provenance(cfg, "align", opts.workers));
  if (res.solution)
    csv.row({fmt_i(res.solution->m), fmt_i(res.solution->N),
             fmt_f17(res.solution->residual_x), fmt_f17(res.solution->residual_y)});
  csv.finalize();
  return res;
}

MuffinResult run_muffin(const ExperimentConfig& cfg, const RunOptions& opts) {
  const double r = cfg.get_double("muffin", "r", 0.25);
  const double theta = cfg.get_double("muffin", "theta", 0.32175055439664219);
  const double ymax = cfg.get_double("muffin", "ymax", 60.0);
  const double h = cfg.get_mesh("muffin", "h", 1.0 / 256);
  const std::string scheme_name = cfg.get_string("muffin", "scheme", "ghost");
  const MaskScheme scheme =
      scheme_name == "staircase" ? MaskScheme::staircase : MaskScheme::ghost;

  MuffinResult res;
  res.disc = disc_spectrum(r, 2);
  res.gap_a = res.disc.values[0];
  res.gap_b = res.disc.values[1];

  const RotationAngle angle(theta);
  res.surface = muffin_surface_spectrum(r, angle, res.gap_a, res.gap_b, ymax, h, scheme);

  CsvWriter csv(opts.out_path, "muffin", {"j", "xi", "eta", "k", "lambda"},
                provenance(cfg, "muffin", opts.workers));
  for (const auto& row : res.surface.rows)
    csv.row({fmt_i(row.j), fmt_f17(row.xi), fmt_f17(row.eta), fmt_i(row.k),
             fmt_f17(row.lambda)});
  csv.finalize();

  if (cfg.has("muffin", "heights")) {
    const auto heights = cfg.get_list("muffin", "heights", {});
    const int box = static_cast<int>(cfg.get_int("muffin", "box", 5));
    const double hb = cfg.get_mesh("grid", "h", 1.0 / 32);
    const double w = res.gap_b - res.gap_a;
    const double lo = res.gap_a + cfg.get_double("muffin", "track_lo", 0.02) * w;
    const double hi = res.gap_a + cfg.get_double("muffin", "track_hi", 0.55) * w;
    // The writer exists while the sweep runs, so an aborted run leaves a
    // partial file with the trailing INCOMPLETE marker.
    CsvWriter hc(opts.out_path + ".heights.csv", "muffin_heights",
                 {"height", "k", "lambda"}, provenance(cfg, "muffin", opts.workers));
    res.heights = finite_height_convergence(r, angle, heights, lo, hi, hb, box,
                                            eig_from(cfg));
    for (const auto& row : res.heights)
      for (std::size_t k = 0; k < row.lambdas.size(); ++k)
        hc.row({fmt_f17(row.height), fmt_i(static_cast<long long>(k) + 1),
                fmt_f17(row.lambdas[k])});
    hc.finalize();
  }
  return res;
}

DecoupleResult run_decouple(const ExperimentConfig& cfg, const RunOptions& opts) {
  const double r = cfg.get_double("decouple", "r", 0.25);
  const double theta = cfg.get_double("decouple", "theta", 0.39269908169872414);
  const int box = static_cast<int>(cfg.get_int("decouple", "box", 4));
  const double h = cfg.get_mesh("decouple", "h", 0.0625);
  const auto heights = cfg.get_list("decouple", "heights", {10.0, 100.0, 1000.0, 10000.0});

  DecoupleResult res;
  const auto geom = muffin_decouple_geometry(r, RotationAngle(theta), box, h);
  res.norms = decoupling_check(geom, heights);

  CsvWriter csv(opts.out_path, "decouple", {"height", "norm"},
                provenance(cfg, "decouple", opts.workers));
  for (const auto& [height, norm] : res.norms)
    csv.row({fmt_f17(height), fmt_f17(norm)});
  csv.finalize();
  return res;
}

}  // namespace gbspec
