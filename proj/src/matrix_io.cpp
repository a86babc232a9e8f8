#include "lyapb/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <tuple>
#include <vector>

namespace lyapb {

RealBanded read_coordinate(std::istream& in) {
  std::string line;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      auto p = line.find_first_not_of(" \t\r");
      if (p != std::string::npos && line[p] != '%' && line[p] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw Error(ErrorCode::io, "missing header");
  std::istringstream hs(line);
  index_t n = 0;
  std::size_t nnz = 0;
  std::string kind;
  if (!(hs >> n >> nnz >> kind) || n <= 0) throw Error(ErrorCode::io, "bad header: " + line);
  if (kind != "symmetric" && kind != "general") throw Error(ErrorCode::io, "unknown kind: " + kind);
  const bool sym = kind == "symmetric";
  std::vector<std::tuple<index_t, index_t, double>> entries;
  entries.reserve(nnz);
  index_t beta = 0;
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!next_line()) throw Error(ErrorCode::io, "expected " + std::to_string(nnz) + " entries");
    std::istringstream ls(line);
    index_t i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v)) throw Error(ErrorCode::io, "bad entry: " + line);
    if (i < 1 || j < 1 || i > n || j > n) throw Error(ErrorCode::io, "entry index out of range: " + line);
    if (sym && i < j) std::swap(i, j);
    entries.emplace_back(i - 1, j - 1, v);
    beta = std::max(beta, std::abs(i - j));
  }
  RealBanded X(n, beta, sym ? Structure::symmetric : Structure::general);
  for (auto [i, j, v] : entries) X.at(i, j) += v;
  return X;
}

RealBanded read_coordinate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return read_coordinate(in);
}

void write_coordinate(std::ostream& out, const RealBanded& X) {
  const RealBanded G = X.structure() == Structure::lower ? X.as_general() : X;
  std::size_t nnz = 0;
  for (double v : G.raw()) nnz += v != 0.0;
  out << G.order() << ' ' << nnz << ' ' << (G.symmetric() ? "symmetric" : "general") << '\n';
  out << std::setprecision(17);
  for (index_t k = G.kmin(); k <= G.kmax(); ++k) {
    auto d = G.diag(k);
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (d[p] == 0.0) continue;
      const index_t j = static_cast<index_t>(p) - std::min<index_t>(k, 0);
      out << j + k + 1 << ' ' << j + 1 << ' ' << d[p] << '\n';
    }
  }
}

void write_coordinate_file(const std::string& path, const RealBanded& X) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  write_coordinate(out, X);
}

void write_dense(std::ostream& out, const Eigen::MatrixXd& M) {
  out << M.rows() << ' ' << M.cols() << '\n' << std::setprecision(17);
  for (index_t i = 0; i < M.rows(); ++i) {
    for (index_t j = 0; j < M.cols(); ++j) out << (j ? " " : "") << M(i, j);
    out << '\n';
  }
}

Eigen::MatrixXd read_dense(std::istream& in) {
  index_t r = 0, c = 0;
  if (!(in >> r >> c) || r < 0 || c < 0) throw Error(ErrorCode::io, "bad dense header");
  Eigen::MatrixXd M(r, c);
  for (index_t i = 0; i < r; ++i)
    for (index_t j = 0; j < c; ++j)
      if (!(in >> M(i, j))) throw Error(ErrorCode::io, "truncated dense matrix");
  return M;
}

}  // namespace lyapb
