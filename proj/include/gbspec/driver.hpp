#pragma once

#include <optional>
#include <string>

#include "gbspec/config.hpp"
#include "gbspec/csv.hpp"
#include "gbspec/experiments.hpp"
#include "gbspec/muffin.hpp"

namespace gbspec {

// Shared experiment drivers: the CLI and the acceptance suite both run
// through these, so their CSV bodies are identical by construction.
struct RunOptions {
  std::string out_path;
  int workers = 1;
  long seed = 0;  // reserved for randomized test-matrix tooling; experiments
                  // never read it
};

PeriodicPotential potential_from(const ExperimentConfig& cfg);
EigOptions eig_from(const ExperimentConfig& cfg);

struct BandsResult {
  BandSweep sweep;
};
BandsResult run_bands(const ExperimentConfig& cfg, const RunOptions& opts);

struct FlowResult {
  FlowRecord record;
};
FlowResult run_flow(const ExperimentConfig& cfg, const RunOptions& opts);

struct FillResult {
  FillReport report;
  SpectralGap gap;
  double eps = 0.0;
  std::optional<ApproxEigenfunction> apx;
};
FillResult run_fill(const ExperimentConfig& cfg, const RunOptions& opts);

struct ScalingResult {
  ScalingReport report;
  SpectralGap gap;
  std::vector<std::pair<int, LocalizationProfile>> profiles;
};
ScalingResult run_scaling(const ExperimentConfig& cfg, const RunOptions& opts);

struct AlignOverrides {
  std::optional<double> theta, t, eps;
  std::optional<long> mmax;
};
struct AlignResult {
  std::optional<AlignmentSolution> solution;
};
AlignResult run_align(const ExperimentConfig& cfg, const RunOptions& opts,
                      const AlignOverrides& ov = {});

struct MuffinResult {
  DiscSpectrum disc;
  double gap_a = 0.0, gap_b = 0.0;
  SurfaceSpectrum surface;
  std::vector<HeightRow> heights;
};
MuffinResult run_muffin(const ExperimentConfig& cfg, const RunOptions& opts);

struct DecoupleResult {
  std::vector<std::pair<double, double>> norms;
};
DecoupleResult run_decouple(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace gbspec
