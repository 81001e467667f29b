#include "cdg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cdg {

namespace {

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

double eval_coeffs(std::span<const double> coeffs, const DgSpace& space, int elem,
                   const BasisTable& btab, int k) {
    double v = 0.0;
    const int nd = space.ndof_elem();
    for (int i = 0; i < nd; ++i) v += coeffs[space.dof(elem, i)] * btab.val(k, i);
    return v;
}

}  // namespace

std::vector<double> l2_project(const Mesh& mesh, const DgSpace& space, const ScalarField& u,
                               int n_points) {
    const QuadratureRule2D rule = tensor_rule(gauss_legendre(n_points));
    const BasisTable btab = space.basis.tabulate(rule.points, false);
    const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
    const int nd = space.ndof_elem();
    std::vector<double> coeffs(space.ndof(mesh), 0.0);
    ElementGeometry geom;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.compute(mesh, e, gtab);
        DenseMatrix mass(nd, nd);
        std::vector<double> rhs(nd, 0.0);
        for (int k = 0; k < rule.size(); ++k) {
            const double w = rule.weights[k] * geom.det[k];
            const double uk = u(geom.x[k]);
            for (int i = 0; i < nd; ++i) {
                const double vi = btab.val(k, i);
                rhs[i] += w * uk * vi;
                for (int j = 0; j < nd; ++j) mass(i, j) += w * vi * btab.val(k, j);
            }
        }
        mass.lu_factor();
        mass.lu_solve(rhs);
        for (int i = 0; i < nd; ++i) coeffs[space.dof(e, i)] = rhs[i];
    }
    return coeffs;
}

int error_rule_points(const DgSpace& space, const Mesh& mesh) {
    return space.degree() + mesh.geometry_degree() + 3;
}

double l2_error(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
                const ScalarField& u, int n_points) {
    const QuadratureRule2D rule = tensor_rule(gauss_legendre(n_points));
    const BasisTable btab = space.basis.tabulate(rule.points, false);
    const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), rule.points);
    double acc = 0.0;
    ElementGeometry geom;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.compute(mesh, e, gtab);
        for (int k = 0; k < rule.size(); ++k) {
            const double diff = eval_coeffs(coeffs, space, e, btab, k) - u(geom.x[k]);
            acc += rule.weights[k] * geom.det[k] * diff * diff;
        }
    }
    return std::sqrt(acc);
}

double l2_norm(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
               int n_points) {
    return l2_error(mesh, space, coeffs, [](Vec2) { return 0.0; }, n_points);
}

FaceCoefficient upwind_face_coefficient(const VelocityField& beta, const Stabilization& spec) {
    return [beta, spec](Vec2 x, Vec2 n) { return stabilization_b0(spec, beta.value(x).dot(n)); };
}

namespace {

// shared face-jump accumulation for dg_norm_error / dg_norm
DgNormParts dg_norm_impl(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
                         const ScalarField* u, int face_points, const FaceCoefficient& b0) {
    DgNormParts parts;
    const QuadratureRule1D rule = gauss_legendre(face_points);

    // L2 part on the companion tensor rule
    {
        const QuadratureRule2D vol = tensor_rule(rule);
        const BasisTable btab = space.basis.tabulate(vol.points, false);
        const BasisTable gtab = tabulate_geometry(mesh.geometry_degree(), vol.points);
        ElementGeometry geom;
        for (int e = 0; e < mesh.n_elements(); ++e) {
            geom.compute(mesh, e, gtab);
            for (int k = 0; k < vol.size(); ++k) {
                const double diff =
                    eval_coeffs(coeffs, space, e, btab, k) - (u ? (*u)(geom.x[k]) : 0.0);
                parts.l2_part += vol.weights[k] * geom.det[k] * diff * diff;
            }
        }
    }

    BasisTable trace[4][2];
    for (int e = 0; e < 4; ++e)
        for (int flip = 0; flip < 2; ++flip) {
            std::vector<Vec2> pts(rule.size());
            for (int k = 0; k < rule.size(); ++k)
                pts[k] = edge_point(e, flip ? -rule.points[k] : rule.points[k]);
            trace[e][flip] = space.basis.tabulate(pts, false);
        }

    parts.per_face.resize(mesh.n_faces(), 0.0);
    for (const Face& face : mesh.faces) {
        const BasisTable& Tm = trace[face.minus_edge][0];
        const BasisTable* Tp =
            face.is_boundary() ? nullptr : &trace[face.plus_edge][face.plus_reversed ? 1 : 0];
        double acc = 0.0;
        for (int k = 0; k < rule.size(); ++k) {
            const FacePointResult fp = mesh.face_point_and_normal(face.id, rule.points[k]);
            const double w = rule.weights[k] * fp.surface_jacobian;
            const double coef = b0(fp.x, fp.normal);
            double em = eval_coeffs(coeffs, space, face.minus_elem, Tm, k);
            double jump;
            if (Tp) {
                const double ep = eval_coeffs(coeffs, space, face.plus_elem, *Tp, k);
                if (u) {
                    const double ue = (*u)(fp.x);
                    jump = (ue - em) - (ue - ep);  // = ep - em
                } else {
                    jump = em - ep;
                }
            } else {
                jump = u ? ((*u)(fp.x) - em) : em;
            }
            acc += w * coef * jump * jump;
        }
        parts.per_face[face.id] = acc;
        parts.face_part += acc;
    }
    parts.total = std::sqrt(parts.l2_part + parts.face_part);
    return parts;
}

}  // namespace

DgNormParts dg_norm_error(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
                          const ScalarField& u, int face_points, const FaceCoefficient& b0) {
    return dg_norm_impl(mesh, space, coeffs, &u, face_points, b0);
}

double dg_norm(const Mesh& mesh, const DgSpace& space, std::span<const double> coeffs,
               int face_points, const FaceCoefficient& b0) {
    return dg_norm_impl(mesh, space, coeffs, nullptr, face_points, b0).total;
}

std::vector<double> find_sign_changes(const std::function<double(double)>& f, int n_probe,
                                      double tol, int max_roots) {
    std::vector<double> s(n_probe), v(n_probe);
    for (int k = 0; k < n_probe; ++k) {
        s[k] = -1.0 + 2.0 * k / (n_probe - 1);
        v[k] = f(s[k]);
    }
    std::vector<double> roots;
    for (int k = 0; k + 1 < n_probe; ++k) {
        if (v[k] == 0.0) {
            roots.push_back(s[k]);
        } else if (v[k] * v[k + 1] < 0.0) {
            double lo = s[k], hi = s[k + 1], flo = v[k];
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        if (static_cast<int>(roots.size()) > max_roots)
            throw std::runtime_error("find_sign_changes: more than " + std::to_string(max_roots) +
                                     " sign changes");
    }
    if (v[n_probe - 1] == 0.0) roots.push_back(s[n_probe - 1]);
    return roots;
}

namespace {

double gauss20_on(const std::function<double(double)>& f, double a, double b,
                  const QuadratureRule1D& g) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < g.size(); ++k) acc += g.weights[k] * f(mid + half * g.points[k]);
    return half * acc;
}

}  // namespace

double integrate_piecewise_smooth(const std::function<double(double)>& sign_fn,
                                  const std::function<double(double)>& integrand, double tol) {
    static const QuadratureRule1D g20 = gauss_legendre(20);
    std::vector<double> roots = find_sign_changes(sign_fn, 64, 1e-13, 8);
    std::vector<double> cuts;
    cuts.push_back(-1.0);
    for (double r : roots)
        if (r > -1.0 + 1e-14 && r < 1.0 - 1e-14) cuts.push_back(r);
    cuts.push_back(1.0);

    auto value_with = [&](const std::vector<double>& c, int splits) {
        double acc = 0.0;
        for (size_t i = 0; i + 1 < c.size(); ++i) {
            const int m = 1 << splits;
            for (int j = 0; j < m; ++j) {
                const double a = c[i] + (c[i + 1] - c[i]) * j / m;
                const double b = c[i] + (c[i + 1] - c[i]) * (j + 1) / m;
                acc += gauss20_on(integrand, a, b, g20);
            }
        }
        return acc;
    };

    double coarse = value_with(cuts, 0);
    for (int attempt = 1; attempt <= 4; ++attempt) {
        const double fine = value_with(cuts, attempt);
        if (std::abs(fine - coarse) <= std::max(tol, tol * std::abs(fine))) return fine;
        coarse = fine;
    }
    throw std::runtime_error("integrate_piecewise_smooth: failed to stabilize");
}

FaceQuadratureError reentrant_quadrature_error(const Mesh& mesh, const DgSpace& space,
                                               const VelocityField& beta,
                                               const Stabilization& spec, int face_points) {
    FaceQuadratureError out;
    out.per_face.resize(mesh.n_faces(), 0.0);
    const QuadratureRule1D fixed = gauss_legendre(face_points);
    const QuadratureRule1D g20 = gauss_legendre(20);
    const int nd = space.ndof_elem();

    for (const Face& face : mesh.faces) {
        const bool interior = !face.is_boundary();

        auto bn_at = [&](double s) {
            const FacePointResult fp = mesh.face_point_and_normal(face.id, s);
            return beta.value(fp.x).dot(fp.normal);
        };

        // traces of all element basis functions on this face (both sides)
        auto traces_at = [&](double s, std::vector<double>& tr) {
            const Vec2 pm = edge_point(face.minus_edge, s);
            space.basis.eval(pm, std::span(tr).subspan(0, nd));
            if (interior) {
                const double t = face.plus_reversed ? -s : s;
                space.basis.eval(edge_point(face.plus_edge, t), std::span(tr).subspan(nd, nd));
            }
        };
        const int ntr = interior ? 2 * nd : nd;
        std::vector<double> tr(ntr);

        // keep only traces that are not identically zero on the face
        std::vector<int> active;
        {
            std::vector<double> maxabs(ntr, 0.0);
            for (int k = 0; k < fixed.size(); ++k) {
                traces_at(fixed.points[k], tr);
                for (int i = 0; i < ntr; ++i) maxabs[i] = std::max(maxabs[i], std::abs(tr[i]));
            }
            for (int i = 0; i < ntr; ++i)
                if (maxabs[i] > 1e-14) active.push_back(i);
        }
        const int na = static_cast<int>(active.size());

        std::vector<double> exact(na * na, 0.0), approx(na * na, 0.0);
        auto accumulate = [&](double s, double w, std::vector<double>& dst) {
            const FacePointResult fp = mesh.face_point_and_normal(face.id, s);
            const double b0 = stabilization_b0(spec, beta.value(fp.x).dot(fp.normal));
            const double ws = w * fp.surface_jacobian * b0;
            traces_at(s, tr);
            for (int a = 0; a < na; ++a) {
                const double ta = tr[active[a]];
                for (int b = 0; b <= a; ++b) dst[a * na + b] += ws * ta * tr[active[b]];
            }
        };

        // fixed rule
        for (int k = 0; k < fixed.size(); ++k) accumulate(fixed.points[k], fixed.weights[k], approx);

        // adaptive reference: split at the beta.n sign changes
        std::vector<double> roots = find_sign_changes(bn_at, 64, 1e-13, 8);
        std::vector<double> cuts{-1.0};
        for (double r : roots)
            if (r > -1.0 + 1e-14 && r < 1.0 - 1e-14) cuts.push_back(r);
        cuts.push_back(1.0);
        for (size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
            const double mid = 0.5 * (cuts[piece] + cuts[piece + 1]);
            const double half = 0.5 * (cuts[piece + 1] - cuts[piece]);
            for (int k = 0; k < g20.size(); ++k)
                accumulate(mid + half * g20.points[k], half * g20.weights[k], exact);
        }

        double qe = 0.0;
        for (int i = 0; i < na * na; ++i) qe = std::max(qe, std::abs(exact[i] - approx[i]));
        out.per_face[face.id] = qe;
        out.total += qe;
    }
    return out;
}

std::optional<double> convergence_rate(double e_prev, double e_curr) {
    if (e_prev <= 0.0 || e_curr <= 0.0) return std::nullopt;
    return std::log2(e_prev / e_curr);
}

std::vector<std::optional<double>> convergence_rates(std::span<const double> errors) {
    std::vector<std::optional<double>> rates;
    for (size_t i = 1; i < errors.size(); ++i)
        rates.push_back(convergence_rate(errors[i - 1], errors[i]));
    return rates;
}

std::string ConvergenceTable::to_csv(int precision, bool integer_reentrant) const {
    std::string out = "level,h,dofs,reentrant,Q,Q_rate,l2,l2_rate,dg,dg_rate\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.*e", precision - 1, v);
        return std::string(buf);
    };
    auto rate_str = [&](double prev, double curr) -> std::string {
        const auto r = convergence_rate(prev, curr);
        return r ? num(*r) : std::string();
    };
    for (size_t i = 0; i < rows.size(); ++i) {
        const ConvergenceRecord& r = rows[i];
        out += std::to_string(r.level) + "," + num(r.h) + "," + std::to_string(r.dofs) + ",";
        if (integer_reentrant)
            out += std::to_string(static_cast<long>(std::llround(r.reentrant)));
        else
            out += num(r.reentrant);
        out += "," + num(r.q_metric) + ",";
        if (i > 0) out += rate_str(rows[i - 1].q_metric, r.q_metric);
        out += "," + num(r.l2) + ",";
        if (i > 0) out += rate_str(rows[i - 1].l2, r.l2);
        out += "," + num(r.dg) + ",";
        if (i > 0) out += rate_str(rows[i - 1].dg, r.dg);
        out += "\n";
    }
    return out;
}

std::optional<double> ConvergenceTable::final_rate(double ConvergenceRecord::* field) const {
    if (rows.size() < 2) return std::nullopt;
    return convergence_rate(rows[rows.size() - 2].*field, rows.back().*field);
}

}  // namespace cdg
