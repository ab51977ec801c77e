#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "shrinker/differential.hpp"
#include "shrinker/error.hpp"
#include "shrinker/variation.hpp"

namespace shrinker {

StabilityMatrices assemble_stability(const TriMesh& mesh) {
  const DifferentialData d = differential_data(mesh);
  StabilityMatrices m;
  m.vertex_dof.assign(mesh.num_vertices(), -1);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    if (!mesh.is_boundary(i)) {
      m.vertex_dof[i] = static_cast<int>(m.dof_vertex.size());
      m.dof_vertex.push_back(static_cast<int>(i));
    }
  const int n = static_cast<int>(m.dof_vertex.size());
  if (n == 0) fail(ErrorCode::Parameter, "variation", "mesh has no interior vertices");

  const TriangleRule& rule = triangle_rule(7);
  std::vector<Eigen::Triplet<double>> ts, tp, tm;
  ts.reserve(9 * mesh.num_faces());
  tp.reserve(9 * mesh.num_faces());
  tm.reserve(9 * mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    const double area = mesh.face_area(f);
    Vec3 g[3];
    face_hat_gradients(mesh, f, g);
    double wsum = 0, mloc[3][3] = {}, ploc[3][3] = {};
    for (std::size_t k = 0; k < rule.weight.size(); ++k) {
      const Vec3& b = rule.bary[k];
      const Vec3 x = b[0] * mesh.vertex(t[0]) + b[1] * mesh.vertex(t[1]) + b[2] * mesh.vertex(t[2]);
      const double wk = rule.weight[k] * area * std::exp(-x.squaredNorm() / 4);
      const double pot = b[0] * d.second_fundamental_sq[t[0]] + b[1] * d.second_fundamental_sq[t[1]] +
                         b[2] * d.second_fundamental_sq[t[2]] + 0.5;
      wsum += wk;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          mloc[i][j] += wk * b[i] * b[j];
          ploc[i][j] += wk * pot * b[i] * b[j];
        }
    }
    for (int i = 0; i < 3; ++i) {
      const int di = m.vertex_dof[t[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = m.vertex_dof[t[j]];
        if (dj < 0) continue;
        ts.emplace_back(di, dj, wsum * g[i].dot(g[j]));
        tp.emplace_back(di, dj, ploc[i][j]);
        tm.emplace_back(di, dj, mloc[i][j]);
      }
    }
  }
  m.stiffness.resize(n, n);
  m.potential.resize(n, n);
  m.mass.resize(n, n);
  m.stiffness.setFromTriplets(ts.begin(), ts.end());
  m.potential.setFromTriplets(tp.begin(), tp.end());
  m.mass.setFromTriplets(tm.begin(), tm.end());
  return m;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Ritz pairs of (A, M) in span(W), descending.
void rayleigh_ritz(const SpMat& A, const SpMat& M, const Eigen::MatrixXd& W, Eigen::VectorXd& lam,
                   Eigen::MatrixXd& V) {
  Eigen::MatrixXd Ar = W.transpose() * (A * W);
  Eigen::MatrixXd Mr = W.transpose() * (M * W);
  Ar = 0.5 * (Ar + Ar.transpose()).eval();
  Mr = 0.5 * (Mr + Mr.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar, Mr);
  if (es.info() != Eigen::Success) fail(ErrorCode::Convergence, "variation", "projected eigenproblem failed");
  lam = es.eigenvalues().reverse();
  V = W * es.eigenvectors().rowwise().reverse();
}

}  // namespace

StabilitySpectrum stability_spectrum(const TriMesh& mesh, int k, const SpectrumOptions& opts) {
  if (k < 1) fail(ErrorCode::Parameter, "variation", "k must be at least 1");
  const StabilityMatrices sm = assemble_stability(mesh);
  const int n = static_cast<int>(sm.dof_vertex.size());
  k = std::min(k, n);
  const SpMat A = sm.potential - sm.stiffness;
  const SpMat& M = sm.mass;

  StabilitySpectrum out;
  out.tol = opts.tol;
  Eigen::VectorXd lam;
  Eigen::MatrixXd V;

  if (n <= opts.dense_limit) {
    const Eigen::MatrixXd Ad(A), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Md);
    if (es.info() != Eigen::Success) fail(ErrorCode::Convergence, "variation", "dense eigensolve failed");
    lam = es.eigenvalues().reverse();
    V = es.eigenvectors().rowwise().reverse();
  } else {
    // Shift above the spectrum: lambda <= max(|A|^2 + 1/2) because S >= 0.
    double sigma = 0;
    for (int i = 0; i < n; ++i) sigma = std::max(sigma, sm.potential.coeff(i, i) / M.coeff(i, i));
    sigma += 0.5;
    const SpMat K = sigma * M - A;
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::Convergence, "variation", "factorisation failed");
    const int m = std::min(n, 2 * k + 8);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd W(n, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) W(i, j) = nd(rng);
    double res = 0;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      W = ldlt.solve(M * W);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
      W = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
      rayleigh_ritz(A, M, W, lam, V);
      W = V;
      if (it % 5 != 4) continue;
      res = 0;
      for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd mv = M * V.col(j);
        const Eigen::VectorXd r = A * V.col(j) - lam(j) * mv;
        res = std::max(res, r.norm() / (sigma * mv.norm()));
      }
      if (res < opts.residual_tol) break;
    }
    out.iterations = it + 1;
    out.max_residual = res;
    if (!(res < opts.residual_tol)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "subspace iteration stalled after %d iterations, residual %.3e", it, res);
      fail(ErrorCode::Convergence, "variation", buf);
    }
  }

  out.eigenvalues.resize(k);
  out.eigenfunctions = Eigen::MatrixXd::Zero(mesh.num_vertices(), k);
  for (int j = 0; j < k; ++j) {
    out.eigenvalues[j] = lam(j);
    Eigen::VectorXd v = V.col(j);
    v /= std::sqrt(v.dot(M * v));
    for (int i = 0; i < n; ++i) out.eigenfunctions(sm.dof_vertex[i], j) = v(i);
  }
  if (n <= opts.dense_limit) {
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd v = V.col(j);
      const Eigen::VectorXd mv = M * v;
      out.max_residual = std::max(out.max_residual, (A * v - lam(j) * mv).norm() / std::max(1e-300, mv.norm()));
    }
  }
  out.index = 0;
  for (double l : out.eigenvalues) out.index += l > opts.tol;
  return out;
}

}  // namespace shrinker
