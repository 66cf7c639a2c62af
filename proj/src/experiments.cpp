#include "sbm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "sbm/clustering.hpp"
#include "sbm/rng.hpp"
#include "sbm/sampler.hpp"
#include "sbm/svg_plot.hpp"

namespace sbm {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_positive_integer(double v) { return v >= 1.0 && v == std::floor(v) && v < 1e9; }

int design_count(const SweepSpec& spec) {
  return spec.kind == SweepKind::kShrinkTau ? static_cast<int>(spec.block_sizes.size()) : 1;
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

void require_kind(const SweepSpec& spec, SweepKind kind) {
  if (spec.kind != kind) {
    throw InvalidParameter("expected a " + sweep_kind_name(kind) + " sweep, got " +
                           sweep_kind_name(spec.kind));
  }
}

}  // namespace

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::kGrowS: return "grow_s";
    case SweepKind::kGrowK: return "grow_k";
    case SweepKind::kShrinkTau: return "shrink_tau";
  }
  return "unknown";
}

FourParameter cell_parameters(const SweepSpec& spec, int design, int grid_index) {
  const double value = spec.grid.at(static_cast<std::size_t>(grid_index));
  FourParameter out{spec.k, spec.s, spec.p, spec.r};
  switch (spec.kind) {
    case SweepKind::kGrowS:
      out.s = static_cast<int>(value);
      break;
    case SweepKind::kGrowK:
      out.k = static_cast<int>(value);
      break;
    case SweepKind::kShrinkTau:
      out.s = spec.block_sizes.at(static_cast<std::size_t>(design));
      // τ = p/k + r with p = c r.
      out.r = value / (spec.p_over_r / spec.k + 1.0);
      out.p = spec.p_over_r * out.r;
      break;
  }
  return out;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  const bool increasing = grid.size() < 2 || grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (increasing ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
      throw InvalidParameter("sweep grid must be strictly monotone");
    }
  }
  if (replicates < 1) throw InvalidParameter("replicates must be at least 1");
  if (max_restarts < 1) throw InvalidParameter("max_restarts must be at least 1");
  if (threads < 1) throw InvalidParameter("threads must be at least 1");
  if (kind != SweepKind::kShrinkTau) {
    for (double v : grid) {
      if (!is_positive_integer(v)) {
        throw InvalidParameter("grid values of a " + sweep_kind_name(kind) +
                               " sweep must be positive integers");
      }
    }
  } else {
    if (block_sizes.empty()) throw InvalidParameter("shrink_tau sweep needs block sizes");
    if (!(p_over_r > 0.0)) throw InvalidParameter("p/r ratio must be positive");
  }
  for (int d = 0; d < design_count(*this); ++d) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const FourParameter c = cell_parameters(*this, d, static_cast<int>(g));
      make_four_parameter(c.k, c.s, c.p, c.r);
    }
  }
}

std::vector<double> geometric_integer_grid(int lo, int hi, int points) {
  if (lo < 1 || hi < lo || points < 1) throw InvalidParameter("invalid integer grid bounds");
  std::vector<double> out;
  for (double v : geometric_grid(lo, hi, points)) {
    const double rounded = std::round(v);
    if (out.empty() || rounded > out.back()) out.push_back(rounded);
  }
  return out;
}

std::vector<double> geometric_grid(double from, double to, int points) {
  if (!(from > 0.0 && to > 0.0) || points < 1) throw InvalidParameter("invalid geometric grid");
  if (points == 1) return {from};
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = std::log(to / from) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = from * std::exp(step * i);
  out.front() = from;
  out.back() = to;
  return out;
}

SweepSpec default_simulation_1() {
  SweepSpec spec;
  spec.kind = SweepKind::kGrowS;
  spec.k = 5;
  spec.p = 0.2;
  spec.r = 0.1;
  spec.grid = geometric_integer_grid(8, 215, 16);
  spec.replicates = 5;
  return spec;
}

SweepSpec default_simulation_2(bool full) {
  SweepSpec spec;
  spec.kind = SweepKind::kGrowK;
  spec.s = 35;
  spec.p = 0.3;
  spec.r = 0.05;
  spec.grid = geometric_integer_grid(2, full ? 110 : 60, 16);
  spec.replicates = 5;
  return spec;
}

SweepSpec default_simulation_3() {
  SweepSpec spec;
  spec.kind = SweepKind::kShrinkTau;
  spec.k = 3;
  spec.p_over_r = 2.0;
  spec.block_sizes = {50, 150, 250};
  spec.grid = geometric_grid(0.30, 0.02, 16);
  spec.replicates = 10;
  return spec;
}

SweepSpec quick_simulation(int index) {
  SweepSpec spec;
  switch (index) {
    case 1:
      spec = default_simulation_1();
      spec.grid = geometric_integer_grid(8, 60, 5);
      spec.replicates = 2;
      break;
    case 2:
      spec = default_simulation_2();
      spec.grid = geometric_integer_grid(2, 12, 5);
      spec.replicates = 2;
      break;
    case 3:
      spec = default_simulation_3();
      spec.block_sizes = {20, 40};
      spec.grid = geometric_grid(0.30, 0.05, 5);
      spec.replicates = 2;
      break;
    default:
      throw InvalidParameter("unknown simulation " + std::to_string(index) + " (expected 1, 2 or 3)");
  }
  spec.max_restarts = 20;
  return spec;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int design, int grid_index, int replicate) {
  const std::uint64_t cell = (static_cast<std::uint64_t>(design) << 48) ^
                             (static_cast<std::uint64_t>(grid_index) << 24) ^
                             static_cast<std::uint64_t>(replicate);
  return base_seed ^ splitmix64_mix(cell);
}

DiagnosticsReport run_replicate(const BlockModel& model, std::uint64_t seed, int max_restarts) {
  const PopulationSpectrum population = population_spectrum(model);
  Graph graph = sample_blockmodel(model, seed);
  const EmpiricalSpectrum empirical =
      spectral_embedding(graph, model.k(), IsolatedPolicy::kZeroRows);
  graph = Graph();
  const Matrix O = procrustes_rotation(population.Zmu, empirical.basis.X);
  const Matrix reference = population.Zmu * O;
  const ClusterResult cluster = certified_kmeans(empirical.basis.X, model.k(), reference,
                                                 max_restarts, splitmix64_mix(seed ^ kGoldenGamma));
  return full_diagnostics(model, population, empirical, cluster);
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  table.spec = spec;
  const int designs = design_count(spec);
  const int points = static_cast<int>(spec.grid.size());
  const std::size_t total = static_cast<std::size_t>(designs) * points * spec.replicates;
  table.rows.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      const int replicate = static_cast<int>(idx % spec.replicates);
      const int g = static_cast<int>((idx / spec.replicates) % points);
      const int d = static_cast<int>(idx / (static_cast<std::size_t>(spec.replicates) * points));
      try {
        SweepRow& row = table.rows[idx];
        row.design = d;
        row.grid_index = g;
        row.grid_value = spec.grid[g];
        row.replicate = replicate;
        row.seed = replicate_seed(spec.base_seed, d, g, replicate);
        row.params = cell_parameters(spec, d, g);
        const BlockModel model =
            make_four_parameter(row.params.k, row.params.s, row.params.p, row.params.r);
        row.report = run_replicate(model, row.seed, spec.max_restarts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int threads = std::min<int>(spec.threads, static_cast<int>(total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

SweepTable run_simulation_1(const SweepSpec& spec) {
  require_kind(spec, SweepKind::kGrowS);
  return run_sweep(spec);
}

SweepTable run_simulation_2(const SweepSpec& spec) {
  require_kind(spec, SweepKind::kGrowK);
  return run_sweep(spec);
}

SweepTable run_simulation_3(const SweepSpec& spec) {
  require_kind(spec, SweepKind::kShrinkTau);
  return run_sweep(spec);
}

std::string sweep_csv_header() {
  return "design,grid_value,replicate,seed,k,s,p,r," + diagnostics_csv_header();
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const SweepRow& row : table.rows) {
    out << row.design << ',' << format_number(row.grid_value) << ',' << row.replicate << ','
        << row.seed << ',' << row.params.k << ',' << row.params.s << ','
        << format_number(row.params.p) << ',' << format_number(row.params.r) << ','
        << diagnostics_csv_row(row.report) << '\n';
  }
  return out.str();
}

std::vector<GridSummary> summarize(const SweepTable& table) {
  std::vector<GridSummary> out;
  std::size_t i = 0;
  while (i < table.rows.size()) {
    const SweepRow& first = table.rows[i];
    GridSummary s;
    s.design = first.design;
    s.block_size = table.spec.kind == SweepKind::kShrinkTau ? first.params.s : 0;
    s.grid_value = first.grid_value;
    s.n = first.report.n;
    std::vector<double> mis;
    std::vector<double> dist;
    std::vector<double> frob;
    for (; i < table.rows.size() && table.rows[i].design == first.design &&
           table.rows[i].grid_index == first.grid_index;
         ++i) {
      const DiagnosticsReport& r = table.rows[i].report;
      ++s.replicates;
      if (!r.certified) {
        ++s.uncertified;
        continue;
      }
      mis.push_back(r.miscluster_count);
      dist.push_back(r.eigvec_dist);
      frob.push_back(r.frob_LL);
    }
    s.median_miscluster = median(mis);
    s.mean_miscluster = mean(mis);
    s.median_eigvec_dist = median(dist);
    s.median_frob = median(frob);
    out.push_back(s);
  }
  return out;
}

std::string summary_csv(const std::vector<GridSummary>& summary) {
  std::ostringstream out;
  out << "design,block_size,grid_value,n,replicates,uncertified,uncertified_fraction,"
         "median_miscluster,mean_miscluster,median_eigvec_dist,median_frob_LL\n";
  for (const GridSummary& s : summary) {
    out << s.design << ',' << s.block_size << ',' << format_number(s.grid_value) << ',' << s.n
        << ',' << s.replicates << ',' << s.uncertified << ','
        << format_number(static_cast<double>(s.uncertified) / s.replicates) << ','
        << format_number(s.median_miscluster) << ',' << format_number(s.mean_miscluster) << ','
        << format_number(s.median_eigvec_dist) << ',' << format_number(s.median_frob) << '\n';
  }
  return out.str();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_slope needs equal-length inputs");
  if (x.size() < 2) return kNaN;
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

double eigvec_slope(const SweepTable& table, double min_log_n) {
  std::vector<double> x;
  std::vector<double> y;
  for (const SweepRow& row : table.rows) {
    const double log_n = std::log(static_cast<double>(row.report.n));
    if (!row.report.certified || log_n <= min_log_n || !(row.report.eigvec_dist > 0.0)) continue;
    x.push_back(log_n);
    y.push_back(std::log(row.report.eigvec_dist));
  }
  return fit_slope(x, y);
}

double miscluster_slope(const SweepTable& table) {
  const std::vector<GridSummary> summary = summarize(table);
  std::vector<double> x;
  std::vector<double> y;
  const std::size_t start = summary.size() / 2;
  for (std::size_t g = start; g < summary.size(); ++g) {
    if (summary[g].design != 0) break;
    const double m = summary[g].median_miscluster;
    if (!(m > 0.0)) continue;
    x.push_back(std::log(summary[g].grid_value));
    y.push_back(std::log(m));
  }
  return fit_slope(x, y);
}

std::vector<std::optional<double>> departure_thresholds(const SweepTable& table) {
  const std::vector<GridSummary> summary = summarize(table);
  std::vector<std::optional<double>> out(static_cast<std::size_t>(design_count(table.spec)));
  for (std::size_t d = 0; d < out.size(); ++d) {
    std::vector<GridSummary> curve;
    for (const GridSummary& s : summary) {
      if (s.design == static_cast<int>(d)) curve.push_back(s);
    }
    std::sort(curve.begin(), curve.end(),
              [](const GridSummary& a, const GridSummary& b) { return a.grid_value > b.grid_value; });
    for (const GridSummary& s : curve) {
      if (s.mean_miscluster > 1.0) {
        out[d] = s.grid_value;
        break;
      }
    }
  }
  return out;
}

FigureKind figure_kind_from_string(const std::string& text) {
  if (text == "1") return FigureKind::kSimulation1;
  if (text == "2") return FigureKind::kSimulation2;
  if (text == "3") return FigureKind::kSimulation3;
  throw InvalidParameter("unknown figure kind '" + text + "' (expected 1, 2 or 3)");
}

namespace {

// A line of the given slope through (x0, y0), spanning [lo, hi].
plot::Series reference_line(double slope, double x0, double y0, double lo, double hi,
                            const std::string& label) {
  plot::Series s;
  s.label = label;
  s.x = {lo, hi};
  s.y = {y0 + slope * (lo - x0), y0 + slope * (hi - x0)};
  s.mark = plot::Mark::kLine;
  s.color = "#888888";
  s.stroke_width = 1.0;
  s.dashed = true;
  return s;
}

std::string figure_1(const SweepTable& table, const std::vector<GridSummary>& summary) {
  plot::Series mis_pts{"replicates", {}, {}, plot::Mark::kPoints, "#1f4e79"};
  plot::Series mis_med{"median", {}, {}, plot::Mark::kLine, "#1f4e79"};
  plot::Series frob_pts{"", {}, {}, plot::Mark::kPoints, "#b03a2e"};
  plot::Series frob_med{"log ||LL - LbarLbar||_F", {}, {}, plot::Mark::kLine, "#b03a2e"};
  plot::Series dist_pts{"", {}, {}, plot::Mark::kPoints, "#1f4e79"};
  plot::Series dist_med{"log ||X - Xbar O||_F", {}, {}, plot::Mark::kLine, "#1f4e79"};
  for (const SweepRow& row : table.rows) {
    const double log_n = std::log(static_cast<double>(row.report.n));
    mis_pts.x.push_back(log_n);
    mis_pts.y.push_back(row.report.miscluster_count);
    frob_pts.x.push_back(log_n);
    frob_pts.y.push_back(std::log(row.report.frob_LL));
    dist_pts.x.push_back(log_n);
    dist_pts.y.push_back(std::log(row.report.eigvec_dist));
  }
  for (const GridSummary& s : summary) {
    const double log_n = std::log(static_cast<double>(s.n));
    mis_med.x.push_back(log_n);
    mis_med.y.push_back(s.median_miscluster);
    frob_med.x.push_back(log_n);
    frob_med.y.push_back(std::log(s.median_frob));
    dist_med.x.push_back(log_n);
    dist_med.y.push_back(std::log(s.median_eigvec_dist));
  }
  std::vector<plot::Series> lower{frob_pts, frob_med, dist_pts, dist_med};
  if (!dist_med.x.empty() && std::isfinite(dist_med.y.back())) {
    lower.push_back(reference_line(-0.5, dist_med.x.back(), dist_med.y.back(), dist_med.x.front(),
                                   dist_med.x.back(), "slope -1/2"));
  }
  std::vector<plot::Panel> panels{
      {"Misclustered nodes", "log n", "|M|", {mis_pts, mis_med}},
      {"Convergence of L and X", "log n", "log distance", lower},
  };
  return plot::render_svg(panels);
}

std::string figure_2(const SweepTable& table, const std::vector<GridSummary>& summary) {
  plot::Series pts{"replicates", {}, {}, plot::Mark::kPoints, "#1f4e79"};
  plot::Series med{"median", {}, {}, plot::Mark::kLine, "#1f4e79"};
  for (const SweepRow& row : table.rows) {
    if (row.report.miscluster_count <= 0) continue;
    pts.x.push_back(std::log(static_cast<double>(row.params.k)));
    pts.y.push_back(std::log(static_cast<double>(row.report.miscluster_count)));
  }
  for (const GridSummary& s : summary) {
    if (!(s.median_miscluster > 0.0)) continue;
    med.x.push_back(std::log(s.grid_value));
    med.y.push_back(std::log(s.median_miscluster));
  }
  std::vector<plot::Series> series{pts, med};
  if (!med.x.empty()) {
    series.push_back(reference_line(3.0, med.x.back(), med.y.back(),
                                    std::log(table.spec.grid.front()), med.x.back(), "slope 3"));
  }
  return plot::render_svg({{"Misclustered nodes as k grows", "log k", "log |M|", series}});
}

std::string figure_3(const SweepTable& table, const std::vector<GridSummary>& summary) {
  static const char* kColors[] = {"#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e"};
  std::vector<plot::Series> series;
  const int designs = design_count(table.spec);
  for (int d = 0; d < designs; ++d) {
    plot::Series s;
    s.label = "s = " + std::to_string(table.spec.block_sizes[d]);
    s.mark = plot::Mark::kLine;
    s.color = kColors[d % 5];
    // Thickest line for the smallest block size.
    s.stroke_width = std::max(1.0, 3.5 - 1.0 * d);
    for (const GridSummary& g : summary) {
      if (g.design != d) continue;
      s.x.push_back(g.grid_value);
      s.y.push_back(g.mean_miscluster);
    }
    series.push_back(s);
  }
  return plot::render_svg({{"Misclustered nodes as tau shrinks", "tau", "mean |M|", series}});
}

}  // namespace

std::string emit_figure(const SweepTable& table, FigureKind kind) {
  if (table.rows.empty()) throw InvalidParameter("cannot plot an empty table");
  const SweepKind expected = kind == FigureKind::kSimulation1   ? SweepKind::kGrowS
                             : kind == FigureKind::kSimulation2 ? SweepKind::kGrowK
                                                                : SweepKind::kShrinkTau;
  require_kind(table.spec, expected);
  const std::vector<GridSummary> summary = summarize(table);
  switch (kind) {
    case FigureKind::kSimulation1: return figure_1(table, summary);
    case FigureKind::kSimulation2: return figure_2(table, summary);
    case FigureKind::kSimulation3: return figure_3(table, summary);
  }
  throw InvalidParameter("unknown figure kind");
}

std::string sweep_manifest(const SweepSpec& spec) {
  std::ostringstream out;
  out << "version=" << kVersion << '\n'
      << "sweep_kind=" << sweep_kind_name(spec.kind) << '\n'
      << "k=" << spec.k << '\n'
      << "s=" << spec.s << '\n'
      << "p=" << format_number(spec.p) << '\n'
      << "r=" << format_number(spec.r) << '\n';
  if (spec.kind == SweepKind::kShrinkTau) {
    out << "p_over_r=" << format_number(spec.p_over_r) << '\n' << "block_sizes=";
    for (std::size_t i = 0; i < spec.block_sizes.size(); ++i) {
      out << (i ? "," : "") << spec.block_sizes[i];
    }
    out << '\n';
  }
  out << "grid=";
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    out << (i ? "," : "") << format_number(spec.grid[i]);
  }
  out << '\n'
      << "replicates=" << spec.replicates << '\n'
      << "base_seed=" << spec.base_seed << '\n'
      << "max_restarts=" << spec.max_restarts << '\n'
      << "isolated_policy=zero_rows\n";
  return out.str();
}

}  // namespace sbm
