#include "asdp/toys.hpp"

#include <random>

#include <Eigen/QR>

#include "asdp/eigsolver.hpp"

namespace asdp::toys {
namespace {

SparseMatrix<double> sparse_from_dense(const Matrix<double>& d) { return d.sparseView(); }

Matrix<double> random_orthogonal(int n, std::mt19937_64& rng) {
  Matrix<double> g = random_block<double>(n, n, rng);
  Eigen::HouseholderQR<Matrix<double>> qr(g);
  return qr.householderQ() * Matrix<double>::Identity(n, n);
}

void add_block_entries(BlockProblem& bp, int matrix, const Matrix<double>& f) {
  for (int j = 0; j < f.cols(); ++j)
    for (int i = 0; i <= j; ++i)
      if (f(i, j) != 0.0) bp.entries.push_back({matrix, 1, i + 1, j + 1, f(i, j)});
}

}  // namespace

ConicProblem<double> primal_infeasible() {
  ConicProblem<double> p;
  p.P.resize(1, 1);
  p.q = Vector<double>::Zero(1);
  p.A = sparse_from_dense((Matrix<double>(2, 1) << 1.0, -1.0).finished());
  p.cones.add_nonnegative(Vector<double>::Constant(1, 1.0)).add_nonnegative(Vector<double>::Constant(1, 1.0));
  return p;
}

ConicProblem<double> dual_infeasible() {
  ConicProblem<double> p;
  p.P.resize(1, 1);
  p.q = Vector<double>::Constant(1, -1.0);
  p.A = sparse_from_dense(Matrix<double>::Identity(1, 1));
  p.cones.add_nonnegative(1);
  return p;
}

ConicProblem<double> scalar_qp() {
  ConicProblem<double> p;
  p.P = sparse_from_dense(Matrix<double>::Constant(1, 1, 2.0));
  p.q = Vector<double>::Constant(1, -2.0);
  p.A = sparse_from_dense(Matrix<double>::Identity(1, 1));
  p.cones.add_nonnegative(1);
  return p;
}

ConicProblem<double> max_eigenvalue_sdp(const Vector<double>& diag_m) {
  const Index n = diag_m.size();
  ConicProblem<double> p;
  p.P.resize(1, 1);
  p.q = Vector<double>::Ones(1);
  const Matrix<double> eye = Matrix<double>::Identity(n, n);
  p.A = sparse_from_dense(svec(eye));
  p.cones.add_psd(n, svec(Matrix<double>(diag_m.asDiagonal())));
  return p;
}

PlantedSdp planted_sdp(int n, int m, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  const Matrix<double> q = random_orthogonal(n, rng);
  Vector<double> ly(rank), ls(n - rank);
  for (auto& v : ly) v = unif(rng);
  for (auto& v : ls) v = unif(rng);
  PlantedSdp out;
  out.y_star = q.leftCols(rank) * ly.asDiagonal() * q.leftCols(rank).transpose();
  const Matrix<double> s_star = q.rightCols(n - rank) * ls.asDiagonal() * q.rightCols(n - rank).transpose();
  out.x_star = random_block<double>(m, 1, rng).col(0);

  BlockProblem& bp = out.problem;
  bp.num_constraints = m;
  bp.block_dims = {n};
  bp.c.resize(static_cast<std::size_t>(m));
  Matrix<double> f0 = -s_star;
  std::vector<Matrix<double>> fs;
  for (int i = 0; i < m; ++i) {
    Matrix<double> g = random_block<double>(n, n, rng);
    Matrix<double> f = 0.5 * (g + g.transpose());
    bp.c[static_cast<std::size_t>(i)] = (f.cwiseProduct(out.y_star)).sum();
    f0 += out.x_star(i) * f;
    fs.push_back(std::move(f));
  }
  add_block_entries(bp, 0, f0);
  for (int i = 0; i < m; ++i) add_block_entries(bp, i + 1, fs[static_cast<std::size_t>(i)]);
  out.f_star = (f0.cwiseProduct(out.y_star)).sum();
  return out;
}

PlantedSdp planted_diagonal_sdp(int n, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  const Matrix<double> v = random_block<double>(n, rank, rng);
  const Matrix<double> basis = orthonormalize(v).basis;
  Eigen::HouseholderQR<Matrix<double>> qr(basis);
  const Matrix<double> full_q = qr.householderQ() * Matrix<double>::Identity(n, n);
  Vector<double> ls(n - rank);
  for (auto& s : ls) s = unif(rng);
  const Matrix<double> s_star = full_q.rightCols(n - rank) * ls.asDiagonal() * full_q.rightCols(n - rank).transpose();

  PlantedSdp out;
  out.y_star = v * v.transpose();
  out.x_star = random_block<double>(n, 1, rng).col(0);
  BlockProblem& bp = out.problem;
  bp.num_constraints = n;
  bp.block_dims = {n};
  bp.c.resize(static_cast<std::size_t>(n));
  Matrix<double> f0 = -s_star;
  f0.diagonal() += out.x_star;
  add_block_entries(bp, 0, f0);
  for (int i = 0; i < n; ++i) {
    bp.c[static_cast<std::size_t>(i)] = out.y_star(i, i);
    bp.entries.push_back({i + 1, 1, i + 1, i + 1, 1.0});
  }
  out.f_star = (f0.cwiseProduct(out.y_star)).sum();
  return out;
}

ConicProblem<double> bo_structured_lp(Index ell, std::uint64_t seed, double* f_star) {
  const Index m = ell + 1;
  const Index s = m * m;
  const Index k = s * m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  ConicProblem<double> p;
  p.P.resize(k, k);
  p.q.resize(k);
  for (auto& v : p.q) v = unif(rng);
  Vector<double> b(s);
  for (auto& v : b) v = unif(rng);
  std::vector<Eigen::Triplet<double, int>> trips;
  for (Index j = 0; j < k; ++j) {
    trips.emplace_back(static_cast<int>(j % s), static_cast<int>(j), 1.0);
    trips.emplace_back(static_cast<int>(s + j), static_cast<int>(j), 1.0);
  }
  p.A.resize(s + k, k);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.A.makeCompressed();
  p.cones.add_zero(b).add_nonnegative(k);
  if (f_star) {
    double f = 0;
    for (Index j = 0; j < s; ++j) {
      double best = p.q(j);
      for (Index i = 1; i < m; ++i) best = std::min(best, p.q(i * s + j));
      f += b(j) * best;
    }
    *f_star = f;
  }
  return p;
}

}  // namespace asdp::toys
