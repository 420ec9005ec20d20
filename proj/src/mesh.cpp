#include "thinframe/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace thinframe {

namespace {

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

CrossMesh::CrossMesh(int n, double side, bool periodic)
    : n_(n), side_(side), periodic_(periodic), grid_side_(periodic ? n : n + 1) {
    if (n < 1) throw GeometryError("mesh needs at least one subdivision");
    const double dx = spacing();
    vertices_.reserve(static_cast<std::size_t>(grid_side_) * grid_side_ + static_cast<std::size_t>(n) * n);
    for (int j = 0; j < grid_side_; ++j)
        for (int i = 0; i < grid_side_; ++i) vertices_.emplace_back(i * dx, j * dx);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) vertices_.emplace_back((i + 0.5) * dx, (j + 0.5) * dx);

    triangles_.reserve(4 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int c00 = grid_vertex(i, j);
            const int c10 = grid_vertex(i + 1, j);
            const int c11 = grid_vertex(i + 1, j + 1);
            const int c01 = grid_vertex(i, j + 1);
            const int ctr = centre_vertex(i, j);
            triangles_.push_back({c00, c10, ctr});
            triangles_.push_back({c10, c11, ctr});
            triangles_.push_back({c11, c01, ctr});
            triangles_.push_back({c01, c00, ctr});
        }
    }
}

int CrossMesh::grid_vertex(int i, int j) const {
    if (periodic_) return wrap_index(j, n_) * n_ + wrap_index(i, n_);
    return j * grid_side_ + i;
}

int CrossMesh::centre_vertex(int i, int j) const {
    const int base = grid_side_ * grid_side_;
    if (periodic_) return base + wrap_index(j, n_) * n_ + wrap_index(i, n_);
    return base + j * n_ + i;
}

std::array<Vec2, 3> CrossMesh::triangle_coords(std::size_t t) const {
    const int sq = static_cast<int>(t / 4);
    const int k = static_cast<int>(t % 4);
    const int i = sq % n_;
    const int j = sq / n_;
    const double dx = spacing();
    const Vec2 c00(i * dx, j * dx), c10((i + 1) * dx, j * dx), c11((i + 1) * dx, (j + 1) * dx),
        c01(i * dx, (j + 1) * dx), ctr((i + 0.5) * dx, (j + 0.5) * dx);
    switch (k) {
        case 0: return {c00, c10, ctr};
        case 1: return {c10, c11, ctr};
        case 2: return {c11, c01, ctr};
        default: return {c01, c00, ctr};
    }
}

bool CrossMesh::on_boundary(int v) const {
    if (periodic_ || v >= grid_side_ * grid_side_) return false;
    const int i = v % grid_side_;
    const int j = v / grid_side_;
    return i == 0 || j == 0 || i == n_ || j == n_;
}

CrossMesh::Location CrossMesh::locate(const Vec2& p) const {
    Vec2 q = p / spacing();
    if (periodic_) {
        q.x() -= n_ * std::floor(q.x() / n_);
        q.y() -= n_ * std::floor(q.y() / n_);
    }
    const int i = std::clamp(static_cast<int>(std::floor(q.x())), 0, n_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(q.y())), 0, n_ - 1);
    const double u = q.x() - i;
    const double v = q.y() - j;
    int k;
    if (v <= u && v <= 1.0 - u) k = 0;
    else if (u >= v && u >= 1.0 - v) k = 1;
    else if (v >= u && v >= 1.0 - u) k = 2;
    else k = 3;
    const int t = 4 * (j * n_ + i) + k;
    const auto c = triangle_coords(t);
    const Vec2 local(u * spacing() + i * spacing(), v * spacing() + j * spacing());
    Eigen::Matrix2d T;
    T.col(0) = c[0] - c[2];
    T.col(1) = c[1] - c[2];
    const Vec2 lam = T.inverse() * (local - c[2]);
    return {t, Eigen::Vector3d(lam.x(), lam.y(), 1.0 - lam.x() - lam.y())};
}

int CrossMesh::vertex_at(const Vec2& p, double tol) const {
    const Vec2 q = p / spacing();
    if (std::abs(q.x() - std::round(q.x())) <= tol && std::abs(q.y() - std::round(q.y())) <= tol) {
        const int i = static_cast<int>(std::round(q.x()));
        const int j = static_cast<int>(std::round(q.y()));
        if (!periodic_ && (i < 0 || j < 0 || i > n_ || j > n_)) return -1;
        return grid_vertex(i, j);
    }
    const Vec2 c = q - Vec2(0.5, 0.5);
    if (std::abs(c.x() - std::round(c.x())) <= tol && std::abs(c.y() - std::round(c.y())) <= tol) {
        const int i = static_cast<int>(std::round(c.x()));
        const int j = static_cast<int>(std::round(c.y()));
        if (!periodic_ && (i < 0 || j < 0 || i >= n_ || j >= n_)) return -1;
        return centre_vertex(i, j);
    }
    return -1;
}

std::vector<Phase> CellMesh::classify(const RodRegion& region) const {
    std::vector<Phase> tags(mesh.triangle_count());
    for (std::size_t t = 0; t < tags.size(); ++t) {
        const auto c = mesh.triangle_coords(t);
        tags[t] = region.classify((c[0] + c[1] + c[2]) / 3.0);
    }
    return tags;
}

CellMesh build_cell_mesh(const FrameworkGraph& g, int n) {
    if (n < 2 || n % 2 != 0) throw GeometryError("cell mesh subdivision n must be even and >= 2");
    CellMesh cm{CrossMesh(n, 1.0, true), {}, {}, {}};
    const double dx = cm.mesh.spacing();
    for (const Vec2& p : g.nodes()) {
        const int v = cm.mesh.vertex_at(p);
        if (v < 0) throw GeometryError("link not mesh-alignable: node off the mesh");
        cm.node_vertex.push_back(v);
    }
    for (std::size_t l = 0; l < g.link_count(); ++l) {
        const Vec2 a = g.link_start(l);
        const Vec2 d = g.link_end(l) - a;
        Vec2 step;
        const bool grid_start = cm.mesh.vertex_at(a) < cm.mesh.n() * cm.mesh.n();
        if (std::abs(d.y()) <= 1e-12) {
            step = Vec2(std::copysign(dx, d.x()), 0.0);
            if (!grid_start) throw GeometryError("link not mesh-alignable: axis link through subsquare centres");
        } else if (std::abs(d.x()) <= 1e-12) {
            step = Vec2(0.0, std::copysign(dx, d.y()));
            if (!grid_start) throw GeometryError("link not mesh-alignable: axis link through subsquare centres");
        } else if (std::abs(std::abs(d.x()) - std::abs(d.y())) <= 1e-12) {
            step = Vec2(std::copysign(0.5 * dx, d.x()), std::copysign(0.5 * dx, d.y()));
        } else {
            throw GeometryError("link not mesh-alignable: direction is not along a mesh edge");
        }
        const double ratio = d.norm() / step.norm();
        const long steps = std::lround(ratio);
        if (steps < 1 || std::abs(ratio - steps) > 1e-9)
            throw GeometryError("link not mesh-alignable: length is not a whole number of mesh edges");
        std::vector<int> path;
        path.reserve(steps + 1);
        for (long k = 0; k <= steps; ++k) {
            const int v = cm.mesh.vertex_at(a + static_cast<double>(k) * step);
            if (v < 0) throw GeometryError("link not mesh-alignable: path leaves the mesh");
            path.push_back(v);
        }
        cm.link_paths.push_back(std::move(path));
        cm.link_step.push_back(step.norm());
    }
    return cm;
}

}  // namespace thinframe
