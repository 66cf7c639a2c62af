#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbm/analysis.hpp"
#include "sbm/blockmodel.hpp"

namespace sbm {

enum class SweepKind { kGrowS, kGrowK, kShrinkTau };

std::string sweep_kind_name(SweepKind kind);

// A replicated parameter sweep over the four-parameter model.
//  kGrowS:     grid holds block sizes s; k, p, r fixed.
//  kGrowK:     grid holds block counts k; s, p, r fixed.
//  kShrinkTau: grid holds τ values; k fixed, p = p_over_r * r with r chosen
//              so that p/k + r = τ; one curve per entry of block_sizes.
struct SweepSpec {
  SweepKind kind = SweepKind::kGrowS;
  int k = 5;
  int s = 50;
  double p = 0.2;
  double r = 0.1;
  double p_over_r = 2.0;
  std::vector<int> block_sizes;
  std::vector<double> grid;
  int replicates = 5;
  std::uint64_t base_seed = 1;
  int max_restarts = 100;
  // Worker threads; results do not depend on it.
  int threads = 1;

  // Throws InvalidParameter unless the grid is nonempty and strictly
  // monotone, replicates >= 1 and every grid point gives a valid model.
  void validate() const;
};

// Rounded geometric grid of distinct integers from lo to hi inclusive.
std::vector<double> geometric_integer_grid(int lo, int hi, int points);
// Geometric grid from `from` to `to` (either direction), both included.
std::vector<double> geometric_grid(double from, double to, int points);

SweepSpec default_simulation_1();
// k up to 60, or up to 110 when full is set.
SweepSpec default_simulation_2(bool full = false);
SweepSpec default_simulation_3();
// Reduced grids and replicate counts for smoke runs.
SweepSpec quick_simulation(int index);

// Four-parameter settings of one grid cell.
FourParameter cell_parameters(const SweepSpec& spec, int design, int grid_index);

// base_seed XOR a hash of (design, grid index, replicate). Distinct cells get
// distinct seeds.
std::uint64_t replicate_seed(std::uint64_t base_seed, int design, int grid_index, int replicate);

// Sample, embed, cluster with certification against ZμO, and diagnose one
// replicate. Isolated nodes keep zero rows in L.
DiagnosticsReport run_replicate(const BlockModel& model, std::uint64_t seed, int max_restarts);

struct SweepRow {
  int design = 0;  // index into block_sizes for kShrinkTau, else 0
  int grid_index = 0;
  double grid_value = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  FourParameter params;
  DiagnosticsReport report;
};

struct SweepTable {
  SweepSpec spec;
  // Ordered by (design, grid index, replicate).
  std::vector<SweepRow> rows;
};

SweepTable run_sweep(const SweepSpec& spec);
// Each checks the sweep kind (grow_s, grow_k, shrink_tau) and runs it.
SweepTable run_simulation_1(const SweepSpec& spec);
SweepTable run_simulation_2(const SweepSpec& spec);
SweepTable run_simulation_3(const SweepSpec& spec);

std::string sweep_csv_header();
std::string sweep_csv(const SweepTable& table);

// Per-grid-point aggregates. Medians and means use certified replicates only.
struct GridSummary {
  int design = 0;
  int block_size = 0;  // kShrinkTau only
  double grid_value = 0.0;
  int n = 0;
  int replicates = 0;
  int uncertified = 0;
  double median_miscluster = 0.0;
  double mean_miscluster = 0.0;
  double median_eigvec_dist = 0.0;
  double median_frob = 0.0;
};

std::vector<GridSummary> summarize(const SweepTable& table);
std::string summary_csv(const std::vector<GridSummary>& summary);

// Least-squares slope of y on x. NaN with fewer than two points or no
// spread in x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log ||X - X̄O||_F on log n over certified replicates with
// log n > min_log_n.
double eigvec_slope(const SweepTable& table, double min_log_n = 4.7);

// Slope of log(median |𝓜|) on log k over the upper half of the grid.
// Points with a zero median are left out.
double miscluster_slope(const SweepTable& table);

// For each design: the first τ, scanning from the largest, at which the
// replicate-averaged |𝓜| exceeds 1. Empty if it never does.
std::vector<std::optional<double>> departure_thresholds(const SweepTable& table);

enum class FigureKind { kSimulation1, kSimulation2, kSimulation3 };

// Throws InvalidParameter on an empty table or one whose sweep kind does not
// match the figure.
std::string emit_figure(const SweepTable& table, FigureKind kind);
// Parses "1", "2" or "3"; anything else throws InvalidParameter.
FigureKind figure_kind_from_string(const std::string& text);

// key=value lines describing the spec and the software version.
std::string sweep_manifest(const SweepSpec& spec);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace sbm
