#include "cdg/dg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdg {

double stabilization_b0(const Stabilization& spec, double beta_dot_n) {
    switch (spec.kind) {
        case StabilizationKind::upwind: return 0.5 * std::abs(beta_dot_n);
        case StabilizationKind::scaled: return spec.theta0 * std::abs(beta_dot_n);
        case StabilizationKind::mean_value: return 0.0;
    }
    return 0.0;
}

FaceClassification classify_face(const Mesh& mesh, const VelocityField& beta, int face,
                                 int probe_count) {
    if (probe_count < 8) throw std::invalid_argument("classify_face: need probe_count >= 8");
    constexpr double kThreshold = 1e-12;
    FaceClassification cls;
    cls.face = face;
    std::vector<double> s(probe_count), bn(probe_count);
    for (int k = 0; k < probe_count; ++k) {
        s[k] = -1.0 + 2.0 * k / (probe_count - 1);
        const FacePointResult fp = mesh.face_point_and_normal(face, s[k]);
        bn[k] = beta.value(fp.x).dot(fp.normal);
    }
    cls.min_bn = *std::min_element(bn.begin(), bn.end());
    cls.max_bn = *std::max_element(bn.begin(), bn.end());
    cls.reentrant = cls.min_bn < -kThreshold && cls.max_bn > kThreshold;
    cls.tangential = !cls.reentrant &&
                     (std::abs(cls.min_bn) <= kThreshold || std::abs(cls.max_bn) <= kThreshold);
    if (cls.reentrant) {
        auto f = [&](double t) {
            const FacePointResult fp = mesh.face_point_and_normal(face, t);
            return beta.value(fp.x).dot(fp.normal);
        };
        for (int k = 0; k + 1 < probe_count; ++k) {
            if (bn[k] == 0.0) {
                cls.sign_changes.push_back(s[k]);
                continue;
            }
            if (bn[k] * bn[k + 1] >= 0.0) continue;
            double lo = s[k], hi = s[k + 1], flo = bn[k];
            while (hi - lo > 1e-13) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            cls.sign_changes.push_back(0.5 * (lo + hi));
        }
        if (bn[probe_count - 1] == 0.0) cls.sign_changes.push_back(s[probe_count - 1]);
    }
    return cls;
}

std::vector<FaceClassification> detect_reentrant_faces(const Mesh& mesh,
                                                       const VelocityField& beta,
                                                       int probe_count) {
    std::vector<FaceClassification> out;
    out.reserve(mesh.n_faces());
    for (int f = 0; f < mesh.n_faces(); ++f) out.push_back(classify_face(mesh, beta, f, probe_count));
    return out;
}

int count_reentrant(std::span<const FaceClassification> classes) {
    int n = 0;
    for (const auto& c : classes) n += c.reentrant ? 1 : 0;
    return n;
}

BlockMatrix::BlockMatrix(int n_elems, int block)
    : block_(block), cols_(n_elems), vals_(n_elems) {}

std::span<double> BlockMatrix::block_at(int er, int ec) {
    auto& cols = cols_[er];
    auto it = std::lower_bound(cols.begin(), cols.end(), ec);
    const size_t pos = it - cols.begin();
    if (it == cols.end() || *it != ec) {
        cols.insert(it, ec);
        vals_[er].insert(vals_[er].begin() + pos, std::vector<double>(block_ * block_, 0.0));
    }
    return vals_[er][pos];
}

CsrMatrix BlockMatrix::to_csr() const {
    CsrMatrix A;
    const int ne = n_elems();
    A.n = ne * block_;
    A.row_ptr.assign(A.n + 1, 0);
    size_t nnz = 0;
    for (int e = 0; e < ne; ++e) nnz += cols_[e].size() * block_ * block_;
    A.col_idx.reserve(nnz);
    A.values.reserve(nnz);
    for (int e = 0; e < ne; ++e) {
        for (int i = 0; i < block_; ++i) {
            const int row = e * block_ + i;
            for (size_t slot = 0; slot < cols_[e].size(); ++slot) {
                const int cbase = cols_[e][slot] * block_;
                const std::vector<double>& blk = vals_[e][slot];
                for (int j = 0; j < block_; ++j) {
                    A.col_idx.push_back(cbase + j);
                    A.values.push_back(blk[i * block_ + j]);
                }
            }
            A.row_ptr[row + 1] = static_cast<int>(A.col_idx.size());
        }
    }
    return A;
}

namespace {

// geometry of one element evaluated at tabulated reference points
struct ElementGeometry {
    std::vector<Vec2> x;
    std::vector<Mat2> jac;
    std::vector<double> det;

    void compute(const Mesh& mesh, int elem, const BasisTable& gtab) {
        const Element& e = mesh.elements[elem];
        x.assign(gtab.npts, Vec2{});
        jac.assign(gtab.npts, Mat2{});
        det.assign(gtab.npts, 0.0);
        for (int k = 0; k < gtab.npts; ++k) {
            Vec2 dxi{0, 0}, deta{0, 0}, pos{0, 0};
            for (int a = 0; a < gtab.ndof; ++a) {
                const Vec2 node = e.nodes[a];
                pos += gtab.val(k, a) * node;
                dxi += gtab.dxi(k, a) * node;
                deta += gtab.deta(k, a) * node;
            }
            x[k] = pos;
            jac[k] = {dxi.x, deta.x, dxi.y, deta.y};
            det[k] = jac[k].det();
        }
    }
};

std::vector<Vec2> edge_points(int edge, const QuadratureRule1D& rule, bool reversed) {
    std::vector<Vec2> pts(rule.size());
    for (int k = 0; k < rule.size(); ++k)
        pts[k] = edge_point(edge, reversed ? -rule.points[k] : rule.points[k]);
    return pts;
}

}  // namespace

void assemble_volume(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                     const ReactionField& reaction, int n_points, BlockMatrix& out) {
    const QuadratureRule2D rule = tensor_rule(gauss_legendre(n_points));
    const BasisTable btab = space.basis.tabulate(rule.points);
    const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
    const int nd = space.ndof_elem();

    ElementGeometry geom;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.compute(mesh, e, gtab);
        std::span<double> blk = out.block_at(e, e);
        for (int k = 0; k < rule.size(); ++k) {
            if (geom.det[k] <= 0.0)
                throw std::runtime_error("assemble_volume: nonpositive Jacobian in element " +
                                         std::to_string(e));
            const double w = rule.weights[k] * geom.det[k];
            const Vec2 b = beta.value(geom.x[k]);
            const double c = reaction.c(geom.x[k]);
            for (int i = 0; i < nd; ++i) {
                // physical gradient of the test function
                const Vec2 gref{btab.dxi(k, i), btab.deta(k, i)};
                const Vec2 gphys = geom.jac[k].inv_transpose_apply(gref, geom.det[k]);
                const double conv = b.dot(gphys);
                const double vi = btab.val(k, i);
                for (int j = 0; j < nd; ++j)
                    blk[i * nd + j] += w * btab.val(k, j) * (c * vi - conv);
            }
        }
    }
}

void assemble_faces(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                    const Stabilization& spec, int n_points, FluxMode mode,
                    const std::function<double(Vec2)>& inflow, BlockMatrix& out,
                    std::vector<double>& rhs, bool include_boundary) {
    const QuadratureRule1D rule = gauss_legendre(n_points);
    const int nd = space.ndof_elem();
    const int q = mesh.geometry_degree();

    // basis traces and geometry tables per local edge and orientation
    BasisTable trace[4][2], gtrace[4];
    for (int e = 0; e < 4; ++e) {
        for (int flip = 0; flip < 2; ++flip) {
            const std::vector<Vec2> pts = edge_points(e, rule, flip == 1);
            trace[e][flip] = space.basis.tabulate(pts, /*with_gradients=*/false);
        }
        gtrace[e] = tabulate_geometry(q, edge_points(e, rule, false));
    }

    ElementGeometry geom;
    std::vector<double> tm(nd), tp(nd);
    for (const Face& face : mesh.faces) {
        const bool interior = !face.is_boundary();
        if (!interior && !include_boundary) continue;
        geom.compute(mesh, face.minus_elem, gtrace[face.minus_edge]);
        const BasisTable& Tm = trace[face.minus_edge][0];
        const BasisTable* Tp = interior ? &trace[face.plus_edge][face.plus_reversed ? 1 : 0] : nullptr;

        std::span<double> Amm = out.block_at(face.minus_elem, face.minus_elem);
        std::span<double> Amp, Apm, App;
        if (interior) {
            Amp = out.block_at(face.minus_elem, face.plus_elem);
            Apm = out.block_at(face.plus_elem, face.minus_elem);
            App = out.block_at(face.plus_elem, face.plus_elem);
        }

        for (int k = 0; k < rule.size(); ++k) {
            const Vec2 tangent = geom.jac[k].apply(edge_tangent_ref(face.minus_edge));
            const double sjac = tangent.norm();
            if (sjac < 1e-14)
                throw std::runtime_error("assemble_faces: degenerate geometry on face " +
                                         std::to_string(face.id));
            const Vec2 n = (edge_normal_sign(face.minus_edge) / sjac) * Vec2{tangent.y, -tangent.x};
            const double bn = beta.value(geom.x[k]).dot(n);
            const double w = rule.weights[k] * sjac;
            for (int i = 0; i < nd; ++i) tm[i] = Tm.val(k, i);
            if (interior)
                for (int i = 0; i < nd; ++i) tp[i] = Tp->val(k, i);

            if (mode == FluxMode::stabilized) {
                const double b0 = stabilization_b0(spec, bn);
                if (interior) {
                    const double cmm = w * (0.5 * bn + b0);
                    const double cmp = w * (0.5 * bn - b0);
                    for (int i = 0; i < nd; ++i)
                        for (int j = 0; j < nd; ++j) {
                            Amm[i * nd + j] += cmm * tm[i] * tm[j];
                            Amp[i * nd + j] += cmp * tm[i] * tp[j];
                            Apm[i * nd + j] -= cmm * tp[i] * tm[j];
                            App[i * nd + j] -= cmp * tp[i] * tp[j];
                        }
                } else if (bn >= 0.0) {
                    for (int i = 0; i < nd; ++i)
                        for (int j = 0; j < nd; ++j) Amm[i * nd + j] += w * bn * tm[i] * tm[j];
                } else {
                    if (!inflow)
                        throw std::runtime_error("assemble_faces: inflow data missing on face " +
                                                 std::to_string(face.id));
                    const double b0 = stabilization_b0(spec, bn);
                    const double g = inflow(geom.x[k]);
                    const double cmm = w * (0.5 * bn + b0);
                    const double cg = w * (b0 - 0.5 * bn) * g;
                    for (int i = 0; i < nd; ++i) {
                        for (int j = 0; j < nd; ++j) Amm[i * nd + j] += cmm * tm[i] * tm[j];
                        rhs[space.dof(face.minus_elem, i)] += cg * tm[i];
                    }
                }
            } else {  // explicit upwind flux
                if (interior) {
                    const std::vector<double>& tu = (bn >= 0.0) ? tm : tp;
                    std::span<double> Am = (bn >= 0.0) ? Amm : Amp;
                    std::span<double> Ap = (bn >= 0.0) ? Apm : App;
                    for (int i = 0; i < nd; ++i)
                        for (int j = 0; j < nd; ++j) {
                            Am[i * nd + j] += w * bn * tm[i] * tu[j];
                            Ap[i * nd + j] -= w * bn * tp[i] * tu[j];
                        }
                } else if (bn >= 0.0) {
                    for (int i = 0; i < nd; ++i)
                        for (int j = 0; j < nd; ++j) Amm[i * nd + j] += w * bn * tm[i] * tm[j];
                } else {
                    if (!inflow)
                        throw std::runtime_error("assemble_faces: inflow data missing on face " +
                                                 std::to_string(face.id));
                    const double g = inflow(geom.x[k]);
                    for (int i = 0; i < nd; ++i)
                        rhs[space.dof(face.minus_elem, i)] -= w * bn * g * tm[i];
                }
            }
        }
    }
}

void assemble_source(const Mesh& mesh, const DgSpace& space,
                     const std::function<double(Vec2)>& f, int n_points,
                     std::vector<double>& rhs) {
    const QuadratureRule2D rule = tensor_rule(gauss_legendre(n_points));
    const BasisTable btab = space.basis.tabulate(rule.points, /*with_gradients=*/false);
    const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
    const int nd = space.ndof_elem();
    ElementGeometry geom;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.compute(mesh, e, gtab);
        for (int k = 0; k < rule.size(); ++k) {
            const double w = rule.weights[k] * geom.det[k] * f(geom.x[k]);
            for (int i = 0; i < nd; ++i) rhs[space.dof(e, i)] += w * btab.val(k, i);
        }
    }
}

DgOperator assemble_operator(const Mesh& mesh, const DgSpace& space, const VelocityField& beta,
                             const ReactionField& reaction, const Stabilization& spec,
                             const std::function<double(Vec2)>& source,
                             const std::function<double(Vec2)>& inflow,
                             const AssemblyOptions& options) {
    const int p = space.degree();
    const int q = mesh.geometry_degree();
    const int nv = options.volume_points > 0 ? options.volume_points : p + q + 1;
    const int nf = options.face_points > 0 ? options.face_points : p + q + 1;

    DgOperator op;
    op.block_size = space.ndof_elem();
    op.rhs.assign(space.ndof(mesh), 0.0);
    BlockMatrix acc(mesh.n_elements(), op.block_size);
    assemble_volume(mesh, space, beta, reaction, nv, acc);
    assemble_faces(mesh, space, beta, spec, nf, options.mode, inflow, acc, op.rhs,
                   options.include_boundary_faces);
    if (source) assemble_source(mesh, space, source, nv, op.rhs);
    op.matrix = acc.to_csr();
    return op;
}

double min_reaction_coercivity(const Mesh& mesh, const VelocityField& beta,
                               const ReactionField& reaction, int n_points) {
    const QuadratureRule2D rule = tensor_rule(gauss_legendre(n_points));
    const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
    double lo = std::numeric_limits<double>::max();
    ElementGeometry geom;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.compute(mesh, e, gtab);
        for (int k = 0; k < rule.size(); ++k) {
            const Vec2 x = geom.x[k];
            lo = std::min(lo, reaction.c(x) + 0.5 * beta.divergence(x));
        }
    }
    return lo;
}

}  // namespace cdg
