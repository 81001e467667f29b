#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdg/dg.hpp"

namespace cdg {

using ScalarField = std::function<double(Vec2)>;

// Element-local L2 projection of u onto the broken space.
std::vector<double> l2_project(const Mesh& mesh, const DgSpace& space, const ScalarField& u,
                               int n_points);

// sqrt of sum over elements of the weighted squared pointwise error.
double l2_error(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
                const ScalarField& u, int n_points);
double l2_norm(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
               int n_points);
// Enriched default rule for error measurement (p + q + 3 per axis).
int error_rule_points(const DgSpace& space, const Mesh& mesh);

// Jump-penalty coefficient at a physical face point with unit normal n.
using FaceCoefficient = std::function<double(Vec2 x, Vec2 n)>;
FaceCoefficient upwind_face_coefficient(const VelocityField& beta, const Stabilization& spec);

struct DgNormParts {
    double total = 0.0;
    double l2_part = 0.0;      // squared contributions
    double face_part = 0.0;
    std::vector<double> per_face;  // squared face terms
};

// Quadrature-defined DG norm of the error u - u_h: L2 part on the
// companion tensor rule of the face rule; face terms evaluated at the
// assembly quadrature points with the given coefficient. On boundary
// faces the exterior trace of the error is zero (exterior state = exact
// solution), so boundary jumps measure the weak-BC error.
DgNormParts dg_norm_error(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
                          const ScalarField& u, int face_points, const FaceCoefficient& b0);

// Same norm for a discrete function (exterior trace zero does not apply;
// the boundary jump is the trace itself).
double dg_norm(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
               int face_points, const FaceCoefficient& b0);

// Roots of f on [-1,1] located by sign changes on an n_probe grid and
// refined by bisection to `tol` in the coordinate.
std::vector<double> find_sign_changes(const std::function<double(double)>& f, int n_probe,
                                      double tol, int max_roots);

// Integral over [-1,1] of an integrand that is smooth away from the
// sign changes of sign_fn: split at the roots, 20-point Gauss on each
// piece, verified stable under one further uniform split.
double integrate_piecewise_smooth(const std::function<double(double)>& sign_fn,
                                  const std::function<double(double)>& integrand, double tol);

// Exact (adaptively integrated) face integral of b0 tr_i tr_j against
// the fixed-rule value, maximized over basis pairs from both sides.
struct FaceQuadratureError {
    double total = 0.0;
    std::vector<double> per_face;
};
FaceQuadratureError reentrant_quadrature_error(const Mesh& mesh, const DgSpace& space,
                                               const VelocityField& beta,
                                               const Stabilization& spec, int face_points);

// log2(e_prev / e_curr); empty when either value is not positive.
std::optional<double> convergence_rate(double e_prev, double e_curr);
std::vector<std::optional<double>> convergence_rates(std::span<const double> errors);

struct ConvergenceRecord {
    int level = 0;
    double h = 0.0;
    long dofs = 0;
    double reentrant = 0.0;  // count (direction-averaged for transport)
    double q_metric = 0.0;
    double l2 = 0.0;
    double dg = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRecord> rows;
    // CSV with header level,h,dofs,reentrant,Q,Q_rate,l2,l2_rate,dg,dg_rate.
    // Floats are printed in scientific notation with `precision`
    // significant digits; absent rates print empty.
    std::string to_csv(int precision = 6, bool integer_reentrant = true) const;
    std::optional<double> final_rate(double ConvergenceRecord::* field) const;
};

}  // namespace cdg
