#include "cdg/mesh.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cdg {

namespace {

void build_faces(Mesh& mesh) {
    const int nx = mesh.nx, ny = mesh.ny;
    auto eid = [nx](int i, int j) { return j * nx + i; };
    mesh.faces.clear();
    mesh.faces.reserve(nx * (ny + 1) + ny * (nx + 1));
    int id = 0;
    // vertical faces, column i between elements (i-1,j) and (i,j)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            Face f;
            f.id = id++;
            if (i == 0) {
                f.minus_elem = eid(0, j);
                f.minus_edge = 3;
            } else if (i == nx) {
                f.minus_elem = eid(nx - 1, j);
                f.minus_edge = 1;
            } else {
                f.minus_elem = eid(i - 1, j);
                f.minus_edge = 1;
                f.plus_elem = eid(i, j);
                f.plus_edge = 3;
            }
            mesh.faces.push_back(f);
        }
    // horizontal faces, row j between elements (i,j-1) and (i,j)
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Face f;
            f.id = id++;
            if (j == 0) {
                f.minus_elem = eid(i, 0);
                f.minus_edge = 0;
            } else if (j == ny) {
                f.minus_elem = eid(i, ny - 1);
                f.minus_edge = 2;
            } else {
                f.minus_elem = eid(i, j - 1);
                f.minus_edge = 2;
                f.plus_elem = eid(i, j);
                f.plus_edge = 0;
            }
            mesh.faces.push_back(f);
        }
}

}  // namespace

MapResult Mesh::map_to_physical(int elem, Vec2 ref) const {
    const Element& e = elements[elem];
    const int n1 = e.geometry_degree + 1;
    std::vector<double> li(n1), lj(n1), di(n1), dj(n1);
    geom_basis_.eval(ref.x, li);
    geom_basis_.eval(ref.y, lj);
    geom_basis_.eval_deriv(ref.x, di);
    geom_basis_.eval_deriv(ref.y, dj);
    MapResult r;
    Vec2 dxi{0, 0}, deta{0, 0};
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
            const Vec2 node = e.nodes[j * n1 + i];
            r.x += (li[i] * lj[j]) * node;
            dxi += (di[i] * lj[j]) * node;
            deta += (li[i] * dj[j]) * node;
        }
    r.jacobian = {dxi.x, deta.x, dxi.y, deta.y};
    r.det = r.jacobian.det();
    return r;
}

FacePointResult Mesh::face_point_and_normal(int face, double s) const {
    return face_point_from_side(face, 0, s);
}

FacePointResult Mesh::face_point_from_side(int face, int side, double s) const {
    const Face& f = faces[face];
    int elem, edge;
    double t = s;
    if (side == 0) {
        elem = f.minus_elem;
        edge = f.minus_edge;
    } else {
        if (f.is_boundary()) throw std::logic_error("face_point_from_side: boundary face has no plus side");
        elem = f.plus_elem;
        edge = f.plus_edge;
        if (f.plus_reversed) t = -s;
    }
    const MapResult m = map_to_physical(elem, edge_point(edge, t));
    const Vec2 tangent = m.jacobian.apply(edge_tangent_ref(edge));
    const double sjac = tangent.norm();
    if (sjac < 1e-14)
        throw std::runtime_error("face_point_and_normal: degenerate face geometry on face " +
                                 std::to_string(face));
    FacePointResult r;
    r.x = m.x;
    r.normal = (edge_normal_sign(edge) / sjac) * Vec2{tangent.y, -tangent.x};
    r.surface_jacobian = sjac;
    return r;
}

double Mesh::h_max() const {
    double h = 0.0;
    for (const Element& e : elements) {
        for (size_t a = 0; a < e.nodes.size(); ++a)
            for (size_t b = a + 1; b < e.nodes.size(); ++b)
                h = std::max(h, (e.nodes[a] - e.nodes[b]).norm());
    }
    return h;
}

double Mesh::element_area(int elem, const QuadratureRule2D& rule) const {
    double area = 0.0;
    for (int k = 0; k < rule.size(); ++k)
        area += rule.weights[k] * map_to_physical(elem, rule.points[k]).det;
    return area;
}

double Mesh::total_area(const QuadratureRule2D& rule) const {
    double area = 0.0;
    for (int e = 0; e < n_elements(); ++e) area += element_area(e, rule);
    return area;
}

std::pair<double, int> Mesh::min_jacobian_det(const QuadratureRule2D& rule) const {
    double best = std::numeric_limits<double>::max();
    int which = -1;
    for (int e = 0; e < n_elements(); ++e)
        for (int k = 0; k < rule.size(); ++k) {
            const double det = map_to_physical(e, rule.points[k]).det;
            if (det < best) {
                best = det;
                which = e;
            }
        }
    return {best, which};
}

std::string Mesh::summary_json(int reentrant_count) const {
    nlohmann::json j;
    j["elements"] = n_elements();
    j["faces"] = n_faces();
    j["h_max"] = h_max();
    j["refinement_level"] = refinement_level;
    if (reentrant_count >= 0) j["reentrant_faces"] = reentrant_count;
    return j.dump();
}

Mesh build_cartesian_mesh(int nx, int ny, BBox bbox, int q) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_cartesian_mesh: need nx, ny >= 1");
    if (q < 1) throw std::invalid_argument("build_cartesian_mesh: need geometry degree q >= 1");
    if (bbox.width() <= 0.0 || bbox.height() <= 0.0)
        throw std::invalid_argument("build_cartesian_mesh: degenerate bounding box");

    Mesh mesh;
    mesh.bbox = bbox;
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.geom_basis_ = Lagrange1D(uniform_points(q + 1));

    const double hx = bbox.width() / nx;
    const double hy = bbox.height() / ny;
    const std::vector<double> lat = uniform_points(q + 1);
    mesh.elements.reserve(nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Element e;
            e.id = j * nx + i;
            e.geometry_degree = q;
            e.nodes.reserve((q + 1) * (q + 1));
            const double x0 = bbox.xmin + i * hx;
            const double y0 = bbox.ymin + j * hy;
            for (int b = 0; b <= q; ++b)
                for (int a = 0; a <= q; ++a)
                    e.nodes.push_back({x0 + 0.5 * (lat[a] + 1.0) * hx,
                                       y0 + 0.5 * (lat[b] + 1.0) * hy});
            mesh.elements.push_back(std::move(e));
        }
    build_faces(mesh);
    return mesh;
}

void apply_curving_map(Mesh& mesh, const std::function<Vec2(Vec2)>& map,
                       const QuadratureRule2D& check_rule) {
    for (Element& e : mesh.elements)
        for (Vec2& node : e.nodes) node = map(node);
    const auto [det, elem] = mesh.min_jacobian_det(check_rule);
    if (det <= 0.0) {
        std::ostringstream os;
        os << "apply_curving_map: nonpositive Jacobian determinant " << det << " in element "
           << elem << " after curving";
        throw std::runtime_error(os.str());
    }
}

void apply_curving_map(Mesh& mesh, const std::function<Vec2(Vec2)>& map) {
    apply_curving_map(mesh, map, tensor_rule(gauss_legendre(mesh.geometry_degree() + 3)));
}

Mesh refine_uniform(const Mesh& mesh) {
    const int q = mesh.geometry_degree();
    Mesh fine;
    fine.bbox = mesh.bbox;
    fine.nx = 2 * mesh.nx;
    fine.ny = 2 * mesh.ny;
    fine.refinement_level = mesh.refinement_level + 1;
    fine.geom_basis_ = Lagrange1D(uniform_points(q + 1));

    const std::vector<double> lat = uniform_points(q + 1);
    fine.elements.reserve(fine.nx * fine.ny);
    for (int j = 0; j < fine.ny; ++j)
        for (int i = 0; i < fine.nx; ++i) {
            const int pi = i / 2, pj = j / 2;       // parent grid position
            const int ci = i % 2, cj = j % 2;       // child quadrant
            const Element& parent = mesh.elements[pj * mesh.nx + pi];
            Element e;
            e.id = j * fine.nx + i;
            e.geometry_degree = q;
            e.nodes.reserve((q + 1) * (q + 1));
            for (int b = 0; b <= q; ++b)
                for (int a = 0; a <= q; ++a) {
                    // child lattice point in parent reference coordinates
                    const Vec2 ref{-1.0 + (ci + 0.5 * (lat[a] + 1.0)),
                                   -1.0 + (cj + 0.5 * (lat[b] + 1.0))};
                    e.nodes.push_back(mesh.map_to_physical(parent.id, ref).x);
                }
            fine.elements.push_back(std::move(e));
        }
    build_faces(fine);
    return fine;
}

}  // namespace cdg
