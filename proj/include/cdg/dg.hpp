#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cdg/basis.hpp"
#include "cdg/linalg.hpp"
#include "cdg/mesh.hpp"

namespace cdg {

struct VelocityField {
    std::function<Vec2(Vec2)> value;
    std::function<double(Vec2)> divergence;
};

struct ReactionField {
    std::function<double(Vec2)> c;
    double c0 = 0.0;  // lower bound for c + div(beta)/2
};

enum class StabilizationKind { upwind, scaled, mean_value };

struct Stabilization {
    StabilizationKind kind = StabilizationKind::upwind;
    double theta0 = 0.5;  // jump-penalty scale for the scaled kind
};

// Face-jump coefficient: |bn|/2 (upwind), theta0*|bn| (scaled), 0 (mean value).
double stabilization_b0(const Stabilization& spec, double beta_dot_n);

// Broken tensor-product polynomial space; dofs are element-major.
struct DgSpace {
    explicit DgSpace(int p) : basis(p) {}
    TensorBasis basis;

    int degree() const { return basis.degree(); }
    int ndof_elem() const { return basis.dim(); }
    int ndof(const Mesh& mesh) const { return mesh.n_elements() * ndof_elem(); }
    int dof(int elem, int local) const { return elem * ndof_elem() + local; }
};

struct FaceClassification {
    int face = -1;
    bool reentrant = false;
    bool tangential = false;  // beta.n touches zero without crossing
    double min_bn = 0.0;
    double max_bn = 0.0;
    std::vector<double> sign_changes;  // face coordinates of beta.n roots
};

// Samples beta.n at probe_count equispaced face coordinates; a face is
// reentrant when the samples take both signs beyond the 1e-12 threshold.
std::vector<FaceClassification> detect_reentrant_faces(const Mesh& mesh,
                                                       const VelocityField& beta,
                                                       int probe_count);
FaceClassification classify_face(const Mesh& mesh, const VelocityField& beta, int face,
                                 int probe_count);
int count_reentrant(std::span<const FaceClassification> classes);

// Element-block sparse accumulator with deterministic layout.
class BlockMatrix {
public:
    BlockMatrix(int n_elems, int block);
    int n_elems() const { return static_cast<int>(cols_.size()); }
    int block() const { return block_; }
    // Dense block for (row element, col element), created on first use.
    std::span<double> block_at(int er, int ec);
    CsrMatrix to_csr() const;

private:
    int block_ = 0;
    std::vector<std::vector<int>> cols_;                 // sorted col elements per row elem
    std::vector<std::vector<std::vector<double>>> vals_; // parallel dense blocks
};

enum class FluxMode {
    stabilized,      // central flux plus b0 jump penalty
    explicit_upwind  // trace chosen per quadrature point by the sign of beta.n
};

struct AssemblyOptions {
    int volume_points = 0;  // points per axis; 0 = p + q + 1
    int face_points = 0;    // 0 = p + q + 1
    FluxMode mode = FluxMode::stabilized;
    bool include_boundary_faces = true;
};

struct DgOperator {
    CsrMatrix matrix;
    std::vector<double> rhs;
    int block_size = 0;
};

// Volume terms of the advection-reaction form: the test function
// carries the gradient, -u (beta . grad v) + c u v.
void assemble_volume(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                     const ReactionField& reaction, int n_points, BlockMatrix& out);

// Face terms. At each quadrature point the exterior trace on a boundary
// face is the inflow value where beta.n < 0 and the interior trace
// otherwise; inflow data lands in rhs. The same fixed rule is used on
// every face, reentrant or not.
void assemble_faces(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                    const Stabilization& spec, int n_points, FluxMode mode,
                    const std::function<double(Vec2)>& inflow, BlockMatrix& out,
                    std::vector<double>& rhs, bool include_boundary = true);

void assemble_source(const Mesh& mesh, const DgSpace& space,
                     const std::function<double(Vec2)>& f, int n_points,
                     std::vector<double>& rhs);

DgOperator assemble_operator(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                             const ReactionField& reaction, const Stabilization& spec,
                             const std::function<double(Vec2)>& source,
                             const std::function<double(Vec2)>& inflow,
                             const AssemblyOptions& options = {});

// Smallest sampled value of c + div(beta)/2 over volume quadrature
// points; the well-posedness assumption requires this >= c0 > 0.
double min_reaction_coercivity(const Mesh& mesh, const VelocityField& beta,
                               const ReactionField& reaction, int n_points);

}  // namespace cdg
