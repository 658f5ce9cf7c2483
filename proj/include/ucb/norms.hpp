#pragma once

#include "ucb/fields.hpp"
#include "ucb/grid.hpp"

namespace ucb {

// |grad_g u|_g^2 = g^{kl} d_k u d_l conj(u) per node; real and >= 0.
RVec metric_gradient_sq(const PolarGrid& grid, const GridField& u, const MetricTables& mt);

// d_{nu_g} u on the tagged boundary slice (one value per slice node).
CVec normal_derivative(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       BoundaryTag tag);

// |grad_{tau_g} u|_g^2 on the slice via the subtraction identity
// |grad_g u|^2 - |d_{nu_g} u|^2. Round-off negativity up to 1e-12*max(1, |grad_g u|^2)
// is clamped to zero; anything worse throws NegativeTangentialEnergy, since
// Cauchy-Schwarz in the g^{-1} inner product forbids it for a sane metric.
RVec tangential_gradient_sq(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                            BoundaryTag tag);

// C(u) = ||Pu||_{L2(D)} + ||u||_{H1(Gamma)} + ||d_{nu_g} u||_{L2(Gamma)},
// every term against the sqrt|g|-weighted measure.
Real cauchy_norm(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                 const CoeffTables& ct);

// Discrete H2 norm: L2 norms of the field, both first differences and all
// four composed second differences (the mixed ones enter separately, matching
// the sum over index pairs). Euclidean measure.
Real h2_norm(const PolarGrid& grid, const GridField& u);

// Sparse matrix B of the quadratic form h2_norm(u)^2 = u^H B u.
SpMatR build_h2_form(const PolarGrid& grid);

// Generalized eigendecomposition of the H2 form against the L2 Gram form,
// reduced to a standard symmetric problem by the diagonal L2 scaling.
// lambda is ascending with lambda_j >= 1; eigenfields are L2-orthonormal.
struct SpectralPair {
  RVec lambda;
  Eigen::MatrixXd V;  // orthonormal eigenvectors of the scaled problem, columns
  RVec m_sqrt, m_inv_sqrt;

  CVec coefficients(const CVec& u) const;  // L2-orthonormal expansion coefficients
  CVec eigenfield(int j) const;            // nodal values of e_j
  int size() const { return static_cast<int>(lambda.size()); }
};

// Lazily computed and cached per grid signature (r0, R1, Nr, Ntheta);
// safe to request from concurrent workers. Dense solve: keep grids at or
// below 65 x 128 (the solve is cubic in Nr*Ntheta).
const SpectralPair& spectral_pair(const PolarGrid& grid);

// ||u||_{H^eta} = sqrt(sum_j lambda_j^{eta/2} |c_j|^2), 0 <= eta < 2.
// eta = 0 reproduces the L2 norm; the excluded endpoint eta = 2 reproduces
// the H2 form and is reachable in tests through SpectralPair directly.
Real sobolev_eta_norm(const PolarGrid& grid, const GridField& u, Real eta);

}  // namespace ucb
