#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "shrinker/mesh.hpp"
#include "shrinker/quadrature.hpp"
#include "shrinker/vector_field.hpp"

namespace shrinker {

enum class VariationMode {
  Interpolated,  // X sampled at vertices, linear on faces: exact rate of the discrete area
  Pointwise,     // analytic X and DX at quadrature points, face tangent planes
};

// \int (div_S X - <X, x>/2) rho dA over the mesh (tails excluded), with rho
// the unit-scale Gaussian weight. Sampled fields always use Interpolated.
double first_variation(const TriMesh& mesh, const VectorFieldSpec& field, const QuadratureSpec& q = {},
                       VariationMode mode = VariationMode::Interpolated);

// x_i -> x_i + h X(x_i).
TriMesh euler_step(const TriMesh& mesh, const VectorFieldSpec& field, double h);

struct ResidualReport {
  std::vector<double> per_vertex;  // H - <x, n>/2
  double l2 = 0;                   // sqrt(sum r^2 rho A) over interior vertices
  double sup = 0;                  // over interior vertices
};

ResidualReport shrinker_residual(const TriMesh& mesh);

// Weighted Galerkin pieces of L = Delta + |A|^2 - <x, grad>/2 + 1/2 on the
// interior vertices, with weight w = exp(-|x|^2/4):
//   stiffness  S_ij = \int w grad l_i . grad l_j
//   potential  P_ij = \int w (|A|^2 + 1/2) l_i l_j
//   mass       M_ij = \int w l_i l_j
// Eigenpairs solve (P - S) v = lambda M v.
struct StabilityMatrices {
  Eigen::SparseMatrix<double> stiffness, potential, mass;
  std::vector<int> dof_vertex;  // dof -> vertex
  std::vector<int> vertex_dof;  // vertex -> dof or -1 on the rim
};

StabilityMatrices assemble_stability(const TriMesh& mesh);

struct StabilitySpectrum {
  std::vector<double> eigenvalues;  // descending
  Eigen::MatrixXd eigenfunctions;   // vertices x modes, M-normalised, zero on rims
  int index = 0;                    // eigenvalues > tol
  double tol = 1e-3;
  double max_residual = 0;          // max relative residual of returned pairs
  int iterations = 0;
};

struct SpectrumOptions {
  double tol = 1e-3;
  int max_iterations = 3000;
  double residual_tol = 1e-9;
  int dense_limit = 900;  // dof count below which a dense solve is used
};

StabilitySpectrum stability_spectrum(const TriMesh& mesh, int k, const SpectrumOptions& opts = {});

// Count of eigenvalues > tol; requires the smallest computed one < -tol.
int morse_index(const StabilitySpectrum& s, double tol = 1e-3);

}  // namespace shrinker
