#include "sbm/blockmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sbm {
namespace {

std::string shortest(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void require_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidParameter(std::string(name) + " = " + shortest(value) +
                           " is outside [0, 1]");
  }
}

}  // namespace

BlockModel::BlockModel(std::vector<int> membership, Matrix block_matrix)
    : membership_(std::move(membership)), block_matrix_(std::move(block_matrix)) {
  const int k = static_cast<int>(block_matrix_.rows());
  if (k == 0 || block_matrix_.cols() != k) {
    throw ShapeError("block matrix must be square and nonempty");
  }
  if (membership_.empty()) throw InvalidParameter("model has no nodes");
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      const double b = block_matrix_(g, h);
      if (!(b >= 0.0 && b <= 1.0)) {
        throw InvalidParameter("B(" + std::to_string(g) + "," + std::to_string(h) +
                               ") = " + shortest(b) + " is outside [0, 1]");
      }
      if (b != block_matrix_(h, g)) throw ShapeError("block matrix B is not symmetric");
    }
  }
  block_sizes_.assign(k, 0);
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    const int g = membership_[i];
    if (g < 0 || g >= k) {
      throw InvalidLabel("node " + std::to_string(i) + " has block " + std::to_string(g) +
                         " outside [0, " + std::to_string(k) + ")");
    }
    ++block_sizes_[g];
  }
  for (int g = 0; g < k; ++g) {
    if (block_sizes_[g] == 0) {
      throw InvalidParameter("block " + std::to_string(g) + " is empty");
    }
  }
  const Vector singular = Eigen::JacobiSVD<Matrix>(block_matrix_).singularValues();
  if (!(singular[k - 1] > 1e-10 * singular[0])) {
    throw RankDeficient("block matrix B is not full rank (singular values " +
                        shortest(singular[0]) + " .. " + shortest(singular[k - 1]) + ")");
  }
}

Matrix BlockModel::membership_matrix() const {
  Matrix z = Matrix::Zero(n(), k());
  for (int i = 0; i < n(); ++i) z(i, membership_[i]) = 1.0;
  return z;
}

BlockModel make_four_parameter(int k, int s, double p, double r) {
  if (k < 1) throw InvalidParameter("k must be positive");
  if (s < 1) throw InvalidParameter("s must be positive");
  require_probability(p, "p");
  require_probability(r, "r");
  if (p + r > 1.0) {
    throw InvalidParameter("p + r = " + shortest(p + r) + " exceeds 1 (need p + r <= 1)");
  }
  std::vector<int> membership(static_cast<std::size_t>(k) * s);
  for (int g = 0; g < k; ++g) {
    std::fill_n(membership.begin() + static_cast<std::ptrdiff_t>(g) * s, s, g);
  }
  Matrix b = Matrix::Constant(k, k, r);
  b.diagonal().array() += p;
  BlockModel model(std::move(membership), std::move(b));
  model.four_parameter_ = FourParameter{k, s, p, r};
  return model;
}

Matrix population_adjacency(const BlockModel& model) {
  const int n = model.n();
  Matrix w(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) w(i, j) = model.edge_probability(i, j);
  }
  return w;
}

namespace {

// D_B diagonal: expected degree of any node in block g.
Vector block_degrees(const BlockModel& model) {
  Vector sizes(model.k());
  for (int g = 0; g < model.k(); ++g) sizes[g] = model.block_sizes()[g];
  return model.block_matrix() * sizes;
}

}  // namespace

Vector expected_degrees(const BlockModel& model) {
  const Vector per_block = block_degrees(model);
  Vector d(model.n());
  for (int i = 0; i < model.n(); ++i) d[i] = per_block[model.block_of(i)];
  return d;
}

Matrix population_laplacian(const BlockModel& model) {
  const Vector per_block = block_degrees(model);
  if ((per_block.array() <= 0.0).any()) {
    throw DegeneratePopulation("a block has zero expected degree");
  }
  const Vector scale = per_block.cwiseSqrt().cwiseInverse();
  const Matrix bl = scale.asDiagonal() * model.block_matrix() * scale.asDiagonal();
  const int n = model.n();
  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) l(i, j) = bl(model.block_of(i), model.block_of(j));
  }
  return l;
}

PopulationSpectrum population_spectrum(const BlockModel& model) {
  const int k = model.k();
  const Vector d_b = block_degrees(model);
  for (int g = 0; g < k; ++g) {
    if (!(d_b[g] > 0.0)) {
      throw DegeneratePopulation("block " + std::to_string(g) +
                                 " has zero expected degree; tau = 0");
    }
  }
  const Vector d_inv_sqrt = d_b.cwiseSqrt().cwiseInverse();
  const Matrix b_l = d_inv_sqrt.asDiagonal() * model.block_matrix() * d_inv_sqrt.asDiagonal();

  Vector sizes_sqrt(k);
  for (int g = 0; g < k; ++g) sizes_sqrt[g] = std::sqrt(double(model.block_sizes()[g]));
  const Matrix core = sizes_sqrt.asDiagonal() * b_l * sizes_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(core);
  if (solver.info() != Eigen::Success) {
    throw SolverFailure("k x k population eigenproblem did not converge", 0.0);
  }
  const IndexList order = order_by_abs_descending(solver.eigenvalues());

  PopulationSpectrum out;
  out.lambda.resize(k);
  Matrix v(k, k);
  for (int j = 0; j < k; ++j) {
    out.lambda[j] = solver.eigenvalues()[order[j]];
    v.col(j) = solver.eigenvectors().col(order[j]);
  }
  out.mu = sizes_sqrt.cwiseInverse().asDiagonal() * v;

  const int n = model.n();
  out.Zmu.resize(n, k);
  for (int i = 0; i < n; ++i) out.Zmu.row(i) = out.mu.row(model.block_of(i));

  // Apply the sign rule on Zμ and carry the flips back into μ.
  Matrix flipped = out.Zmu;
  normalize_column_signs(flipped);
  for (int j = 0; j < k; ++j) {
    if (n > 0 && flipped.col(j).dot(out.Zmu.col(j)) < 0.0) out.mu.col(j) *= -1.0;
  }
  out.Zmu = std::move(flipped);
  out.Dbar = expected_degrees(model);
  return out;
}

double smallest_nonzero_eigenvalue_fourparam(int k, double p, double r) {
  if (k < 1) throw InvalidParameter("k must be positive");
  // one block: the only nonzero eigenvalue is 1
  if (k == 1) return 1.0;
  if (p == 0.0) {
    throw InvalidParameter("p = 0 makes 1 / (k r/p + 1) degenerate");
  }
  return 1.0 / (k * (r / p) + 1.0);
}

double tau(const Vector& expected_degrees) {
  if (expected_degrees.size() == 0) throw InvalidParameter("tau of an empty degree vector");
  return expected_degrees.minCoeff() / static_cast<double>(expected_degrees.size());
}

int largest_block_population(const BlockModel& model) {
  return *std::max_element(model.block_sizes().begin(), model.block_sizes().end());
}

std::string model_to_text(const BlockModel& model) {
  if (const auto& fp = model.four_parameter()) {
    return std::to_string(fp->k) + " " + std::to_string(fp->s) + " " + shortest(fp->p) + " " +
           shortest(fp->r) + "\n";
  }
  nlohmann::ordered_json doc;
  doc["format"] = "sbm-v1";
  doc["n"] = model.n();
  doc["k"] = model.k();
  doc["membership"] = model.membership();
  auto rows = nlohmann::ordered_json::array();
  for (int g = 0; g < model.k(); ++g) {
    std::vector<double> row(model.k());
    for (int h = 0; h < model.k(); ++h) row[h] = model.block_matrix()(g, h);
    rows.push_back(row);
  }
  doc["B"] = rows;
  return doc.dump(2) + "\n";
}

BlockModel model_from_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty model specification");

  if (text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (doc.value("format", "") != "sbm-v1") {
      throw ParseError("model JSON must carry \"format\": \"sbm-v1\"");
    }
    try {
      auto membership = doc.at("membership").get<std::vector<int>>();
      auto rows = doc.at("B").get<std::vector<std::vector<double>>>();
      const int k = static_cast<int>(rows.size());
      Matrix b(k, k);
      for (int g = 0; g < k; ++g) {
        if (static_cast<int>(rows[g].size()) != k) throw ShapeError("B must be square");
        for (int h = 0; h < k; ++h) b(g, h) = rows[g][h];
      }
      if (doc.contains("k") && doc["k"].get<int>() != k) {
        throw ParseError("\"k\" disagrees with the size of \"B\"");
      }
      if (doc.contains("n") && doc["n"].get<std::size_t>() != membership.size()) {
        throw ParseError("\"n\" disagrees with the length of \"membership\"");
      }
      return BlockModel(std::move(membership), std::move(b));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("model JSON: ") + e.what());
    }
  }

  std::istringstream in(text);
  int k = 0;
  int s = 0;
  double p = 0.0;
  double r = 0.0;
  if (!(in >> k >> s >> p >> r)) {
    throw ParseError("four-parameter model must be a line \"k s p r\"");
  }
  std::string rest;
  if (in >> rest) throw ParseError("trailing content after \"k s p r\": " + rest);
  return make_four_parameter(k, s, p, r);
}

void write_model(const BlockModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << model_to_text(model);
  if (!out) throw IoError("failed writing " + path);
}

BlockModel read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return model_from_text(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace sbm
