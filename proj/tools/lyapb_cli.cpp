// lyapb: command-line front end for the banded Lyapunov/Sylvester solvers.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lyapb/cg_solver.hpp"
#include "lyapb/decay_bounds.hpp"
#include "lyapb/driver.hpp"
#include "lyapb/factor.hpp"
#include "lyapb/matrix_io.hpp"
#include "lyapb/oracle.hpp"

using namespace lyapb;

namespace {

constexpr index_t dense_limit = 2000;

struct SolveArgs {
  std::string method = "auto";
  std::string a_path, b_path, d_path;
  std::string out_prefix = "solution";
  std::string history_path;
  double eps_res = 1e-3;
  int max_it = 2000;
  int nu = 6;
  double eps_b = 1e-5;
  double eps_quad = 1e-5;
  double tau = 0.0;
  double eps_it = 0.0;
  int check_period = 10;
  std::uint64_t seed = 1;
};

SolverConfig make_config(const SolveArgs& a) {
  SolverConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.eps_res = a.eps_res;
  cfg.m_max = a.max_it;
  cfg.nu = a.nu;
  cfg.eps_B = a.eps_b;
  cfg.eps_quad = a.eps_quad;
  if (a.tau > 0.0) cfg.tau = a.tau;
  if (a.eps_it > 0.0) cfg.eps_it = a.eps_it;
  cfg.check_period = a.check_period;
  cfg.seed = a.seed;
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path);
  f.precision(17);
  return f;
}

void write_cg_history(const std::string& path, const CgReport& r) {
  auto f = open_out(path);
  f << "iter,relres,beta\n";
  for (const auto& h : r.residual_history) f << h.iter << ',' << h.relres << ',' << h.beta_X << '\n';
}

int run_solve(const SolveArgs& a) {
  const RealBanded A = read_coordinate_file(a.a_path);
  const RealBanded D = read_coordinate_file(a.d_path);
  std::optional<RealBanded> B;
  if (!a.b_path.empty()) B = read_coordinate_file(a.b_path);
  const SolverConfig cfg = make_config(a);

  SplitSolution sol;
  if (cfg.method == Method::cg) {
    // run CG directly so the per-iteration bandwidths are available
    CgOptions o;
    o.eps_res = cfg.eps_res;
    o.max_it = cfg.m_max;
    const auto t0 = std::chrono::steady_clock::now();
    CgResult r = B ? sylv_cg(A, *B, D, o) : lyap_cg(A, D, o);
    if (!a.history_path.empty()) write_cg_history(a.history_path, r.report);
    sol.XB = std::move(r.X);
    sol.low_rank.left = Eigen::MatrixXd(A.order(), 0);
    sol.report.method = Method::cg;
    sol.report.iterations = r.report.iterations;
    sol.report.converged = r.report.converged;
    sol.report.stop_reason = r.report.converged ? "converged" : "max_iterations";
    sol.report.beta_xb = r.report.beta_X;
    sol.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    sol = B ? solve_sylvester(A, *B, D, cfg) : solve_lyapunov(A, D, cfg);
    if (!a.history_path.empty()) {
      auto f = open_out(a.history_path);
      f << "iter,relres\n";
      for (auto [k, r] : sol.report.residual_history) f << k << ',' << r << '\n';
    }
  }

  const double res = B ? sol.residual_norm(A, *B, D) : sol.residual_norm(A, D);
  const double relres = res / frob_norm(D);
  write_coordinate_file(a.out_prefix + "_banded.txt", sol.XB);
  {
    // X = XB + U V^T with U = left * diag(sig); U is written first, then V
    auto f = open_out(a.out_prefix + "_factor.txt");
    const Eigen::MatrixXd U = sol.low_rank.left * sol.low_rank.sig.asDiagonal();
    write_dense(f, U);
    write_dense(f, sol.low_rank.rank() > 0 ? sol.low_rank.right_or_left() : Eigen::MatrixXd(A.order(), 0));
  }
  auto f = open_out(a.out_prefix + "_report.txt");
  std::ostringstream rep;
  rep.precision(10);
  rep << "method=" << to_string(sol.report.method) << '\n'
      << "iterations=" << sol.report.iterations << '\n'
      << "tau=" << sol.report.tau << '\n'
      << "beta_xb=" << sol.report.beta_xb << '\n'
      << "rank=" << sol.low_rank.rank() << '\n'
      << "relres=" << relres << '\n'
      << "seconds=" << sol.report.seconds << '\n'
      << "bytes=" << sol.memory_report().total() << '\n'
      << "stop=" << sol.report.stop_reason << '\n';
  f << rep.str();
  std::cout << rep.str();
  return relres <= cfg.eps_res * 1.0000001 ? 0 : 2;
}

SpectralInterval exact_or_estimated(const RealBanded& A) {
  if (A.order() <= dense_limit) {
    const SymEig e = sym_eig_dense(to_dense(A));
    return {e.values(0), e.values(e.values.size() - 1), std::max<index_t>(A.bandwidth(), 1)};
  }
  return estimate_spectrum(A, 1e-8);
}

int run_bounds(const std::string& a_path, const std::string& d_path, index_t col, const std::string& out) {
  const RealBanded A = read_coordinate_file(a_path);
  const RealBanded D = read_coordinate_file(d_path);
  const index_t n = A.order();
  if (col < 1 || col > n) throw Error(ErrorCode::index_out_of_range, "column must lie in [1, n]");
  const index_t j = col - 1;
  const SpectralInterval spec = exact_or_estimated(A);
  Eigen::MatrixXd X;
  if (n <= dense_limit) X = dense_lyap_oracle(to_dense(A), to_dense(D));
  std::ofstream file;
  if (!out.empty()) file = open_out(out);
  std::ostream& os = out.empty() ? std::cout : file;
  os << "i,j,value_bound_thm21,value_bound_thm22,exact_if_available\n";
  KronBound kb(spec);
  for (index_t i = 0; i < n; ++i) {
    os << i + 1 << ',' << col << ',' << haber_solution_bound(spec, D, i, j) << ',' << kb(D, i, j) << ',';
    if (X.size()) os << std::abs(X(i, j));
    os << '\n';
  }
  return 0;
}

int run_gen(const std::string& gen, index_t n, double gamma, std::uint64_t seed, const std::string& prefix) {
  const ProblemData p = generate(gen, n, gamma, seed);
  write_coordinate_file(prefix + "_A.txt", p.A);
  write_coordinate_file(prefix + "_D.txt", p.D);
  std::cout << "wrote " << prefix << "_A.txt and " << prefix << "_D.txt (n=" << p.n << ")\n";
  return 0;
}

int run_oracle_check(const SolveArgs& a, double tol) {
  const RealBanded A = read_coordinate_file(a.a_path);
  const RealBanded D = read_coordinate_file(a.d_path);
  if (A.order() > dense_limit) throw Error(ErrorCode::invalid_argument, "oracle-check is limited to n <= 2000");
  std::optional<RealBanded> B;
  if (!a.b_path.empty()) B = read_coordinate_file(a.b_path);
  const SolverConfig cfg = make_config(a);
  const SplitSolution sol = B ? solve_sylvester(A, *B, D, cfg) : solve_lyapunov(A, D, cfg);
  const Eigen::MatrixXd Ad = to_dense(A), Dd = to_dense(D);
  const Eigen::MatrixXd Xref = B ? dense_sylvester_oracle(Ad, to_dense(*B), Dd) : dense_lyap_oracle(Ad, Dd);
  const Eigen::MatrixXd X = sol.dense();
  const Eigen::MatrixXd Bd = B ? to_dense(*B) : Ad;
  const double dense_res = (Ad * X + X * Bd - Dd).norm() / Dd.norm();
  const double op_res = (B ? sol.residual_norm(A, *B, D) : sol.residual_norm(A, D)) / Dd.norm();
  const double err = (X - Xref).norm() / Xref.norm();
  std::cout << "method=" << to_string(sol.report.method) << "\nrelres_dense=" << dense_res << "\nrelres_operator=" << op_res
            << "\nrel_error=" << err << '\n';
  const bool ok = std::abs(dense_res - op_res) <= 1e-8 && dense_res <= cfg.eps_res * 1.0000001 && err <= tol;
  std::cout << (ok ? "ok" : "mismatch") << '\n';
  return ok ? 0 : 2;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// Config lines are key=value; generator, n, gamma and method accept comma lists
// and the sweep is their Cartesian product. '#' starts a comment.
int run_bench(const std::string& path, const std::string& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path);
  std::map<std::string, std::string> kv;
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = split_list(line.substr(0, eq));
    if (key.empty()) continue;
    kv[key.front()] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& k, const std::string& def) { return kv.count(k) ? kv[k] : def; };
  SolverConfig base;
  base.eps_res = std::stod(get("eps_res", "1e-3"));
  base.m_max = std::stoi(get("max_it", "2000"));
  base.nu = std::stoi(get("nu", "6"));
  base.eps_B = std::stod(get("eps_b", "1e-5"));
  base.eps_quad = std::stod(get("eps_quad", "1e-5"));
  base.check_period = std::stoi(get("check_period", "10"));
  if (kv.count("tau")) base.tau = std::stod(kv["tau"]);
  if (kv.count("eps_it")) base.eps_it = std::stod(kv["eps_it"]);
  const auto seed = static_cast<std::uint64_t>(std::stoull(get("seed", "1")));

  std::ofstream file;
  if (!out.empty()) file = open_out(out);
  std::ostream& os = out.empty() ? std::cout : file;
  write_record_header(os);
  for (const auto& g : split_list(get("generator", "1d")))
    for (const auto& ns : split_list(get("n", "500")))
      for (const auto& gs : split_list(get("gamma", "20")))
        for (const auto& ms : split_list(get("method", "auto"))) {
          SolverConfig cfg = base;
          cfg.method = parse_method(ms);
          const ProblemData p = generate(g, std::stol(ns), std::stod(gs), seed);
          write_record(os, run_experiment(p, cfg));
          os.flush();
        }
  return 0;
}

int run_decay(const std::string& gen, index_t n, double gamma, std::uint64_t seed, index_t col, index_t stride,
              const std::string& out) {
  const ProblemData p = generate(gen, n, gamma, seed);
  if (col < 1 || col > p.n) throw Error(ErrorCode::index_out_of_range, "column must lie in [1, n]");
  const SpectralInterval spec = exact_or_estimated(p.A);
  Eigen::MatrixXd X;
  if (p.n <= dense_limit) X = dense_lyap_oracle(to_dense(p.A), to_dense(p.D));
  std::ofstream file;
  if (!out.empty()) file = open_out(out);
  emit_decay_profile(out.empty() ? std::cout : file, p.D, spec, X, col - 1, stride);
  return 0;
}

void add_solver_flags(CLI::App* c, SolveArgs& a) {
  c->add_option("--method", a.method, "auto | cg | split")->capture_default_str();
  c->add_option("-A,--A", a.a_path, "coefficient A (coordinate file)")->required();
  c->add_option("-B,--B", a.b_path, "coefficient B for A X + X B = D (optional)");
  c->add_option("-D,--D", a.d_path, "right-hand side D (coordinate file)")->required();
  c->add_option("--eps-res", a.eps_res, "relative residual stopping tolerance")->capture_default_str();
  c->add_option("--max-it", a.max_it, "iteration cap")->capture_default_str();
  c->add_option("--nu", a.nu, "rational approximation degree, 4..14")->capture_default_str();
  c->add_option("--eps-b", a.eps_b, "resolvent truncation tolerance")->capture_default_str();
  c->add_option("--eps-quad", a.eps_quad, "quadrature and drop tolerance")->capture_default_str();
  c->add_option("--tau", a.tau, "splitting time; 0 selects it automatically")->capture_default_str();
  c->add_option("--eps-it", a.eps_it, "entry drop tolerance for R_B; 0 means eps-quad")->capture_default_str();
  c->add_option("--check-period", a.check_period, "Krylov steps between residual checks")->capture_default_str();
  c->add_option("--seed", a.seed, "seed of the Krylov start vector")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Banded Lyapunov and Sylvester solver.\n"
               "Matrix files use the coordinate format: header 'n nnz symmetric|general',\n"
               "then 1-based 'i j value' lines (lower triangle for symmetric files)."};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand(
      "solve",
      "Solve A X + X A = D (or A X + X B = D with -B).\n"
      "Writes <out>_banded.txt (coordinate file of X_B), <out>_factor.txt (dense U then dense V,\n"
      "X = X_B + U V^T) and <out>_report.txt with key=value lines\n"
      "method, iterations, tau, beta_xb, rank, relres, seconds, bytes, stop.\n"
      "--history CSV columns: for cg 'iter,relres,beta' (beta = bandwidth of the iterate),\n"
      "for split 'iter,relres' (Krylov dimension and relative residual).");
  add_solver_flags(solve, sa);
  solve->add_option("-o,--out", sa.out_prefix, "output prefix")->capture_default_str();
  solve->add_option("--history", sa.history_path, "residual history CSV");

  std::string ba, bd, bout;
  index_t bcol = 1;
  auto* bounds = app.add_subcommand(
      "bounds",
      "Decay bounds for column j of the solution of A X + X A = D.\n"
      "CSV columns: i, j (1-based), value_bound_thm21 (flat Kronecker-inverse bound),\n"
      "value_bound_thm22 (bandwidth-aware bound), exact_if_available (|X(i,j)| from a dense\n"
      "solve when n <= 2000, empty otherwise).");
  bounds->add_option("-A,--A", ba, "coefficient A")->required();
  bounds->add_option("-D,--D", bd, "right-hand side D")->required();
  bounds->add_option("-j,--column", bcol, "1-based column")->required();
  bounds->add_option("-o,--out", bout, "CSV file (stdout if empty)");

  std::string gen = "1d", gprefix = "problem";
  index_t gn = 500;
  double gamma = 20.0;
  std::uint64_t gseed = 1;
  auto* genc = app.add_subcommand("gen", "Write <prefix>_A.txt and <prefix>_D.txt for a test problem.");
  genc->add_option("-g,--generator", gen, "kron (n divisible by 6) | 1d | penta")->capture_default_str();
  genc->add_option("-n,--n", gn, "order")->capture_default_str();
  genc->add_option("--gamma", gamma, "operator parameter")->capture_default_str();
  genc->add_option("--seed", gseed, "seed for D")->capture_default_str();
  genc->add_option("-o,--out", gprefix, "output prefix")->capture_default_str();

  SolveArgs oa;
  double otol = 1e-2;
  auto* oracle = app.add_subcommand("oracle-check",
                                    "Solve and compare against a dense spectral solve (n <= 2000).\n"
                                    "Prints relres_dense, relres_operator, rel_error; exit 2 on mismatch.");
  add_solver_flags(oracle, oa);
  oracle->add_option("--tol", otol, "allowed relative error to the dense solution")->capture_default_str();

  std::string cfg_path, bench_out;
  auto* bench = app.add_subcommand(
      "bench",
      "Sweep configurations from a key=value file. Keys: generator, n, gamma, method (comma\n"
      "lists, swept as a product), seed, eps_res, max_it, nu, eps_b, eps_quad, tau, eps_it,\n"
      "check_period. CSV columns: generator, n, gamma, method, its, beta (bandwidth of X_B),\n"
      "rank, tau, seconds, relres, bytes (solution storage), kappa (estimated), stop.");
  bench->add_option("config", cfg_path, "config file")->required();
  bench->add_option("-o,--out", bench_out, "CSV file (stdout if empty)");

  std::string dgen = "kron", dout;
  index_t dn = 1020, dcol = 510, dstride = 1;
  double dgamma = 20.0;
  std::uint64_t dseed = 1;
  auto* decay = app.add_subcommand(
      "decay",
      "Decay profile of one solution column for a generated problem.\n"
      "CSV columns: i (1-based), abs_x (|X(i,j)| from a dense solve, nan when n > 2000),\n"
      "bound_thm21, bound_thm22.");
  decay->add_option("-g,--generator", dgen, "kron | 1d | penta")->capture_default_str();
  decay->add_option("-n,--n", dn, "order")->capture_default_str();
  decay->add_option("--gamma", dgamma, "operator parameter")->capture_default_str();
  decay->add_option("--seed", dseed, "seed for D")->capture_default_str();
  decay->add_option("-j,--column", dcol, "1-based column")->capture_default_str();
  decay->add_option("--stride", dstride, "row stride")->capture_default_str();
  decay->add_option("-o,--out", dout, "CSV file (stdout if empty)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(sa);
    if (*bounds) return run_bounds(ba, bd, bcol, bout);
    if (*genc) return run_gen(gen, gn, gamma, gseed, gprefix);
    if (*oracle) return run_oracle_check(oa, otol);
    if (*bench) return run_bench(cfg_path, bench_out);
    if (*decay) return run_decay(dgen, dn, dgamma, dseed, dcol, dstride, dout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
