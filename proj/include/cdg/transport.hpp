#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cdg/diagnostics.hpp"

namespace cdg {

struct AngularQuadrature {
    std::vector<std::array<double, 3>> directions;  // unit vectors on S^2
    std::vector<double> weights;                    // sum to 4*pi

    int size() const { return static_cast<int>(directions.size()); }
};

// Gauss-Legendre in the polar cosine crossed with equal-weight azimuthal
// angles; integrates spherical harmonics up to degree
// min(2*n_polar - 1, n_azimuthal - 1) exactly.
AngularQuadrature build_angular_quadrature(int n_polar, int n_azimuthal);

struct TransportProblem {
    ScalarField sigma_t;
    ScalarField sigma_s;
    std::vector<ScalarField> source;  // q_j per direction
    std::vector<ScalarField> inflow;  // boundary data per direction
    // exact fields when manufactured (empty otherwise)
    ScalarField scalar_flux_exact;
    std::vector<ScalarField> psi_exact;
};

// Manufactured problem: psi_j = (O_j1^2 + O_j2) g with
// g = (x^2+y^2+1)/2 + cos(3(x+y)/2), sigma_s = 4/5, sigma_t = x^2+y^2+1;
// the quadrature's degree-2 exactness makes the scalar flux (4 pi / 3) g.
TransportProblem manufactured_transport(const AngularQuadrature& quad);

struct TransportOptions {
    Stabilization stabilization;
    int volume_points = 0;  // 0 = p + q + 1
    int face_points = 0;
    double solver_tol = 1e-11;
    int restart = 60;
    int max_solver_iterations = 5000;
    double scatter_tol = 1e-10;
    int max_source_iterations = 200;
};

struct DirectionalSolveResult {
    std::vector<double> psi;
    int iterations = 0;
    double residual = 0.0;
};

// One advection-reaction solve with beta = (O_j1, O_j2) and c = sigma_t.
DirectionalSolveResult directional_solve(const Mesh& mesh, const DgSpace& space,
                                         std::array<double, 3> direction,
                                         const ScalarField& sigma_t, const ScalarField& rhs,
                                         const ScalarField& inflow,
                                         const TransportOptions& options);

struct SourceIterationResult {
    std::vector<std::vector<double>> psi;  // per direction
    std::vector<double> phi;               // scalar flux coefficients
    int iterations = 0;
    bool converged = false;
    std::vector<double> increment_norms;   // ||phi^{k+1} - phi^k||_0
    long total_solver_iterations = 0;
};

// Fixed-point iteration lagging the scattering source. Per-direction
// operators are assembled and factored once; solves warm-start from the
// previous pass.
SourceIterationResult source_iteration(const Mesh& mesh, const DgSpace& space,
                                       const TransportProblem& problem,
                                       const AngularQuadrature& quad,
                                       const TransportOptions& options);

// Direction-averaged jump coefficient used to report scalar-flux errors
// in the DG norm.
FaceCoefficient direction_averaged_coefficient(const AngularQuadrature& quad,
                                               const Stabilization& spec);

}  // namespace cdg
