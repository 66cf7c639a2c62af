// sbm-spectral: sample blockmodel graphs, cluster them spectrally, run the
// simulation sweeps and audit degree density.
//
// Exit codes: 0 success, 1 user error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sbm/analysis.hpp"
#include "sbm/blockmodel.hpp"
#include "sbm/clustering.hpp"
#include "sbm/edge_density.hpp"
#include "sbm/experiments.hpp"
#include "sbm/sampler.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::string default_out_dir() {
  const char* env = std::getenv("SBM_SPECTRAL_OUT");
  return env && *env ? env : ".";
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw sbm::IoError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sbm::IoError("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw sbm::IoError("failed writing " + path.string());
}

std::string manifest_header(const std::string& command, std::uint64_t seed) {
  std::ostringstream out;
  out << "command=" << command << '\n'
      << "version=" << sbm::kVersion << '\n'
      << "seed=" << seed << '\n';
  return out.str();
}

struct GenerateArgs {
  std::vector<std::string> four_param;
  std::string model_path;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  std::optional<sbm::BlockModel> model;
  if (!a.four_param.empty()) {
    try {
      model = sbm::make_four_parameter(std::stoi(a.four_param[0]), std::stoi(a.four_param[1]),
                                       std::stod(a.four_param[2]), std::stod(a.four_param[3]));
    } catch (const std::logic_error&) {
      throw sbm::InvalidParameter("--four-param expects integers k s and reals p r");
    }
  } else {
    model = sbm::read_model(a.model_path);
  }
  const sbm::Graph graph = sbm::sample_blockmodel(*model, a.seed);
  const fs::path dir = prepare_dir(a.out);

  std::ostringstream edges;
  sbm::write_edge_list(graph, edges);
  write_file(dir / "model.txt", sbm::model_to_text(*model));
  write_file(dir / "edges.txt", edges.str());
  std::ostringstream manifest;
  manifest << manifest_header("generate", a.seed) << "n=" << model->n() << '\n'
           << "k=" << model->k() << '\n'
           << "edges=" << graph.edge_count() << '\n';
  write_file(dir / "manifest.txt", manifest.str());
  std::cout << "sampled n=" << model->n() << " with " << graph.edge_count() << " edges into "
            << dir.string() << '\n';
  return 0;
}

struct ClusterArgs {
  std::string edges;
  int k = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string model_path;
  bool drop_isolated = false;
  int max_restarts = 100;
  int n_init = 10;
  std::string out;
};

int cmd_cluster(const ClusterArgs& a) {
  const sbm::EdgeListData data = sbm::read_edge_list(a.edges);
  const int n = data.graph.n();
  if (a.k < 1 || a.k > n) {
    throw sbm::InvalidParameter("--k must lie in [1, " + std::to_string(n) + "]");
  }
  std::optional<sbm::BlockModel> model;
  if (!a.model_path.empty()) {
    model = sbm::read_model(a.model_path);
    if (model->n() != n) {
      throw sbm::ShapeError("model has " + std::to_string(model->n()) + " nodes, graph has " +
                            std::to_string(n));
    }
    if (model->k() != a.k) {
      throw sbm::ShapeError("model has k = " + std::to_string(model->k()) + ", --k is " +
                            std::to_string(a.k));
    }
  }

  // Diagnostics need every node in L, so with a model isolated nodes keep
  // zero rows instead of being dropped.
  sbm::IsolatedPolicy policy = sbm::IsolatedPolicy::kError;
  if (a.drop_isolated) {
    policy = model ? sbm::IsolatedPolicy::kZeroRows : sbm::IsolatedPolicy::kDrop;
  }
  sbm::EmpiricalSpectrum emb;
  try {
    emb = sbm::spectral_embedding(data.graph, a.k, policy);
  } catch (const sbm::IsolatedNodes& e) {
    throw sbm::IsolatedNodes(std::string(e.what()) + " (pass --drop-isolated to continue)",
                             e.nodes());
  }
  if (emb.basis.X.rows() < a.k) {
    throw sbm::InvalidParameter("only " + std::to_string(emb.basis.X.rows()) +
                                " non-isolated nodes for k = " + std::to_string(a.k));
  }

  sbm::ClusterResult cluster;
  std::optional<sbm::DiagnosticsReport> report;
  if (model) {
    const sbm::PopulationSpectrum pop = sbm::population_spectrum(*model);
    const sbm::Matrix O = sbm::procrustes_rotation(pop.Zmu, emb.basis.X);
    cluster = sbm::certified_kmeans(emb.basis.X, a.k, pop.Zmu * O, a.max_restarts, a.seed);
    report = sbm::full_diagnostics(*model, pop, emb, cluster);
  } else {
    cluster = sbm::kmeans(emb.basis.X, a.k, a.n_init, a.seed);
  }

  // 1-based clusters; 0 marks isolated nodes left out of the clustering.
  std::vector<int> label(n, 0);
  for (std::size_t row = 0; row < emb.laplacian.kept.size(); ++row) {
    label[emb.laplacian.kept[row]] = cluster.assignments[row] + 1;
  }
  for (int node : emb.laplacian.isolated) label[node] = 0;

  const fs::path dir = prepare_dir(a.out);
  std::ostringstream assignments;
  for (int i = 0; i < n; ++i) assignments << data.label(i) << ' ' << label[i] << '\n';
  write_file(dir / "assignments.txt", assignments.str());

  std::ostringstream manifest;
  manifest << manifest_header("cluster", a.seed) << "edges=" << a.edges << '\n'
           << "k=" << a.k << '\n'
           << "n=" << n << '\n'
           << "isolated=" << emb.laplacian.isolated.size() << '\n'
           << "objective=" << sbm::format_number(cluster.objective) << '\n';
  if (model) {
    manifest << "model=" << a.model_path << '\n' << "max_restarts=" << a.max_restarts << '\n';
    write_file(dir / "diagnostics.csv",
               sbm::diagnostics_csv_header() + "\n" + sbm::diagnostics_csv_row(*report) + "\n");
    write_file(dir / "diagnostics.txt", sbm::diagnostics_text(*report));
    std::cout << sbm::diagnostics_text(*report);
    for (const std::string& v : sbm::report_violations(*report)) {
      std::cerr << "warning: " << v << '\n';
    }
  } else {
    manifest << "n_init=" << a.n_init << '\n';
  }
  write_file(dir / "manifest.txt", manifest.str());
  std::cout << "clustered " << n << " nodes into " << a.k << " clusters; wrote "
            << (dir / "assignments.txt").string() << '\n';
  return 0;
}

struct SimArgs {
  int index = 0;
  bool quick = false;
  bool full = false;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_restarts;
  int threads = 1;
  std::string out;
};

int cmd_sim(const SimArgs& a) {
  sbm::SweepSpec spec;
  if (a.quick) {
    spec = sbm::quick_simulation(a.index);
  } else if (a.index == 1) {
    spec = sbm::default_simulation_1();
  } else if (a.index == 2) {
    spec = sbm::default_simulation_2(a.full);
  } else {
    spec = sbm::default_simulation_3();
  }
  if (a.replicates) spec.replicates = *a.replicates;
  if (a.seed) spec.base_seed = *a.seed;
  if (a.max_restarts) spec.max_restarts = *a.max_restarts;
  spec.threads = a.threads;

  const sbm::SweepTable table = sbm::run_sweep(spec);
  const std::string stem = "sim" + std::to_string(a.index);
  const std::string svg = sbm::emit_figure(table, static_cast<sbm::FigureKind>(a.index - 1));
  const std::vector<sbm::GridSummary> summary = sbm::summarize(table);

  std::ostringstream results;
  if (a.index == 1) {
    results << "eigvec_slope=" << sbm::format_number(sbm::eigvec_slope(table)) << '\n';
  } else if (a.index == 2) {
    results << "miscluster_slope=" << sbm::format_number(sbm::miscluster_slope(table)) << '\n';
  } else {
    const auto thresholds = sbm::departure_thresholds(table);
    for (std::size_t d = 0; d < thresholds.size(); ++d) {
      results << "threshold_s" << spec.block_sizes[d] << '='
              << (thresholds[d] ? sbm::format_number(*thresholds[d]) : "none") << '\n';
    }
  }

  const fs::path dir = prepare_dir(a.out);
  write_file(dir / (stem + ".csv"), sbm::sweep_csv(table));
  write_file(dir / (stem + "_summary.csv"), sbm::summary_csv(summary));
  write_file(dir / (stem + ".svg"), svg);
  write_file(dir / "manifest.txt", "command=sim " + std::to_string(a.index) + "\n" +
                                       sbm::sweep_manifest(spec) + results.str());
  std::cout << results.str() << "wrote " << (dir / (stem + ".csv")).string() << " and "
            << (dir / (stem + ".svg")).string() << '\n';
  return 0;
}

struct AuditArgs {
  std::string edges;
  std::string out;
};

int cmd_audit(const AuditArgs& a) {
  const sbm::EdgeListData data = sbm::read_edge_list(a.edges);
  if (data.graph.edge_count() == 0) throw sbm::ParseError(a.edges + ": no edges");
  const sbm::DensityAudit audit = sbm::density_audit(data.graph);
  const fs::path dir = prepare_dir(a.out);
  const std::string csv = sbm::audit_csv_header() + "\n" + sbm::audit_csv_row(audit) + "\n";
  write_file(dir / "audit.csv", csv);
  if (!data.labels.empty()) {
    std::ostringstream map;
    for (int i = 0; i < data.graph.n(); ++i) map << i << ' ' << data.labels[i] << '\n';
    write_file(dir / "id_map.txt", map.str());
  }
  std::ostringstream manifest;
  manifest << "command=audit\nversion=" << sbm::kVersion << "\nedges=" << a.edges << '\n'
           << "n=" << data.graph.n() << '\n'
           << "unique_edges=" << data.graph.edge_count() << '\n'
           << "duplicate_edges=" << data.duplicate_edges << '\n'
           << "self_loops=" << data.self_loops << '\n';
  write_file(dir / "manifest.txt", manifest.str());
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering under the stochastic blockmodel"};
  app.require_subcommand(1);
  const std::string out_default = default_out_dir();

  GenerateArgs gen;
  gen.out = out_default;
  auto* generate = app.add_subcommand("generate", "Sample a graph from a blockmodel");
  auto* four = generate->add_option("--four-param", gen.four_param, "k s p r")->expected(4);
  auto* model_opt = generate->add_option("--model", gen.model_path, "Model file")
                        ->check(CLI::ExistingFile);
  four->excludes(model_opt);
  generate->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")->capture_default_str();

  ClusterArgs cl;
  cl.out = out_default;
  auto* cluster = app.add_subcommand("cluster", "Spectral clustering of an edge list");
  cluster->add_option("--edges", cl.edges, "Edge list")->required()->check(CLI::ExistingFile);
  cluster->add_option("--k", cl.k, "Number of clusters")->required();
  cluster->add_option("--seed", cl.seed, "k-means seed")->capture_default_str();
  cluster->add_option("--model", cl.model_path, "Model file; enables diagnostics")
      ->check(CLI::ExistingFile);
  cluster->add_flag("--drop-isolated", cl.drop_isolated, "Leave zero-degree nodes unclustered");
  cluster->add_option("--max-restarts", cl.max_restarts, "Certification attempts (with --model)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--n-init", cl.n_init, "k-means initializations (without --model)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--out", cl.out, "Output directory")->capture_default_str();

  SimArgs sim;
  sim.out = out_default;
  auto* sim_cmd = app.add_subcommand("sim", "Run a simulation sweep");
  sim_cmd->add_option("index", sim.index, "Simulation 1, 2 or 3")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  sim_cmd->add_flag("--quick", sim.quick, "Reduced grid for a smoke run");
  sim_cmd->add_flag("--full", sim.full, "Simulation 2 up to k = 110");
  sim_cmd->add_option("--replicates", sim.replicates, "Replicates per grid point")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Base seed");
  sim_cmd->add_option("--max-restarts", sim.max_restarts, "Certification attempts")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--threads", sim.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();

  AuditArgs au;
  au.out = out_default;
  auto* audit = app.add_subcommand("audit", "Degree-density audit of an edge list");
  audit->add_option("edges", au.edges, "Edge list")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", au.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (generate->parsed() && gen.four_param.empty() && gen.model_path.empty()) {
    std::cerr << "generate: one of --four-param or --model is required\n";
    return 1;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (cluster->parsed()) return cmd_cluster(cl);
    if (sim_cmd->parsed()) return cmd_sim(sim);
    if (audit->parsed()) return cmd_audit(au);
  } catch (const sbm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const sbm::UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
