#include "thinframe/quadratic_space.hpp"

#include "thinframe/fem.hpp"

#include <Eigen/LU>

#include <algorithm>

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>

namespace thinframe {

namespace p2 {

const std::array<Eigen::Vector3d, 6>& quadrature_points() {
    static const std::array<Eigen::Vector3d, 6> pts = [] {
        const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1;
        const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2;
        return std::array<Eigen::Vector3d, 6>{Eigen::Vector3d(b1, a1, a1), Eigen::Vector3d(a1, b1, a1),
                                              Eigen::Vector3d(a1, a1, b1), Eigen::Vector3d(b2, a2, a2),
                                              Eigen::Vector3d(a2, b2, a2), Eigen::Vector3d(a2, a2, b2)};
    }();
    return pts;
}

const std::array<double, 6>& quadrature_weights() {
    static const std::array<double, 6> w{0.223381589678011, 0.223381589678011, 0.223381589678011,
                                         0.109951743655322, 0.109951743655322, 0.109951743655322};
    return w;
}

Shape shape(const Eigen::Vector3d& b) {
    Shape n;
    for (int i = 0; i < 3; ++i) n[i] = b[i] * (2.0 * b[i] - 1.0);
    n[3] = 4.0 * b[0] * b[1];
    n[4] = 4.0 * b[1] * b[2];
    n[5] = 4.0 * b[2] * b[0];
    return n;
}

Eigen::Matrix<double, 3, 2> barycentric_gradients(const std::array<Vec2, 3>& p) {
    const double two_a = 2.0 * fem::signed_area(p);
    Eigen::Matrix<double, 3, 2> g;
    for (int i = 0; i < 3; ++i) {
        const Vec2& pj = p[(i + 1) % 3];
        const Vec2& pk = p[(i + 2) % 3];
        g(i, 0) = (pj.y() - pk.y()) / two_a;
        g(i, 1) = (pk.x() - pj.x()) / two_a;
    }
    return g;
}

StrainMap strain_map(const Eigen::Vector3d& b, const Eigen::Matrix<double, 3, 2>& gl) {
    Eigen::Matrix<double, 6, 2> g;
    for (int i = 0; i < 3; ++i) g.row(i) = (4.0 * b[i] - 1.0) * gl.row(i);
    g.row(3) = 4.0 * (b[0] * gl.row(1) + b[1] * gl.row(0));
    g.row(4) = 4.0 * (b[1] * gl.row(2) + b[2] * gl.row(1));
    g.row(5) = 4.0 * (b[2] * gl.row(0) + b[0] * gl.row(2));
    const double r2 = std::sqrt(0.5);
    StrainMap s = StrainMap::Zero();
    for (int i = 0; i < 6; ++i) {
        s(0, 2 * i) = g(i, 0);
        s(1, 2 * i + 1) = g(i, 1);
        s(2, 2 * i) = r2 * g(i, 1);
        s(2, 2 * i + 1) = r2 * g(i, 0);
    }
    return s;
}

}  // namespace p2

namespace {

// Root of f on [0, 1] given f(0) f(1) < 0.
double bisect(const std::function<double(double)>& f) {
    double lo = 0.0, hi = 1.0;
    const bool rising = f(0.0) < 0.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == rising) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t pair_key(int a, int b) {
    const auto [lo, hi] = std::minmax(a, b);
    return (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
}

}  // namespace

QuadraticSpace::QuadraticSpace(int cells, int n, const Level& level)
    : cells_(cells), n_(n), mesh_(cells * n, 1.0, false), cell_mesh_(n, 1.0, true) {
    // cut pattern on one cell
    const std::size_t local_tris = cell_mesh_.triangle_count();
    std::vector<int> sign(cell_mesh_.vertex_count(), 1);
    if (level) {
        const double zero = 0.05 / n;
        for (std::size_t v = 0; v < sign.size(); ++v) {
            const double d = level(cell_mesh_.vertices()[v]);
            sign[v] = std::abs(d) < zero ? 0 : (d > 0.0 ? 1 : -1);
        }
    }
    // cut fraction per periodic edge, keyed by its midpoint on the 1/(4n) lattice
    // and measured along the edge direction with positive x (or y) component
    std::map<std::pair<int, int>, double> cut_at;
    auto edge_fraction = [&](const Vec2& pa, const Vec2& pb) {
        const Vec2 mid = 0.5 * (pa + pb) * (4.0 * n);
        const int m = 4 * n;
        const std::pair<int, int> key{((static_cast<int>(std::lround(mid.x())) % m) + m) % m,
                                      ((static_cast<int>(std::lround(mid.y())) % m) + m) % m};
        const Vec2 d = pb - pa;
        const bool forward = d.x() > 1e-12 || (std::abs(d.x()) <= 1e-12 && d.y() > 0.0);
        auto it = cut_at.find(key);
        if (it == cut_at.end()) {
            const Vec2 from = forward ? pa : pb, to = forward ? pb : pa;
            it = cut_at.emplace(key, bisect([&](double f) { return level(from + f * (to - from)); })).first;
        }
        return forward ? it->second : 1.0 - it->second;
    };
    pieces_of_.resize(local_tris);
    for (std::size_t lt = 0; lt < local_tris; ++lt) {
        const auto p = cell_mesh_.triangle_coords(lt);
        const auto& tri = cell_mesh_.triangles()[lt];
        std::array<Eigen::Vector3d, 7> at;  // vertices, cut points of edges 01, 12, 20, quad centre
        std::array<bool, 3> is_cut{};
        int cuts = 0;
        for (int k = 0; k < 3; ++k) at[k] = Eigen::Vector3d::Unit(k);
        for (int k = 0; k < 3; ++k) {
            const int k1 = (k + 1) % 3;
            if (sign[tri[k]] * sign[tri[k1]] >= 0) continue;
            const double f = edge_fraction(p[k], p[k1]);
            at[3 + k] = (1.0 - f) * Eigen::Vector3d::Unit(k) + f * Eigen::Vector3d::Unit(k1);
            is_cut[k] = true;
            ++cuts;
        }
        std::vector<std::array<int, 3>> split;
        if (cuts == 0) {
            split.push_back({0, 1, 2});
        } else if (cuts == 1) {
            const int k = is_cut[0] ? 0 : (is_cut[1] ? 1 : 2);
            const int a = k, b = (k + 1) % 3, c = (k + 2) % 3;
            split.push_back({a, 3 + k, c});
            split.push_back({3 + k, b, c});
        } else {
            // vertex a is alone on its side; the quad q_ab, b, c, q_ca is cut
            // along its shorter diagonal, or fanned from its vertex average when
            // the diagonals tie, so that mirror-image cuts stay mirror images
            const int a = !is_cut[0] ? 2 : (!is_cut[1] ? 0 : 1);
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            const int qab = 3 + a, qca = 3 + c;
            auto x = [&](int r) { return Vec2(at[r][0] * p[0] + at[r][1] * p[1] + at[r][2] * p[2]); };
            const double d1 = (x(qab) - x(c)).norm(), d2 = (x(b) - x(qca)).norm();
            split.push_back({a, qab, qca});
            if (d1 < d2 * (1.0 - 1e-9)) {
                split.push_back({qab, b, c});
                split.push_back({qab, c, qca});
            } else if (d2 < d1 * (1.0 - 1e-9)) {
                split.push_back({qab, b, qca});
                split.push_back({b, c, qca});
            } else {
                at[6] = 0.25 * (at[qab] + at[b] + at[c] + at[qca]);
                split.push_back({qab, b, 6});
                split.push_back({b, c, 6});
                split.push_back({c, qca, 6});
                split.push_back({qca, qab, 6});
            }
        }
        for (const auto& refs : split) {
            Piece piece;
            Eigen::Matrix3d m;
            for (int i = 0; i < 3; ++i) {
                piece.ref[i] = refs[i];
                piece.bary[i] = at[refs[i]];
                m.col(i) = piece.bary[i];
            }
            piece.to_piece = m.inverse();
            pieces_of_[lt].push_back(static_cast<int>(pieces_.size()));
            pieces_.push_back(piece);
        }
    }
    piece_parent_.resize(pieces_.size());
    for (std::size_t lt = 0; lt < local_tris; ++lt)
        for (int id : pieces_of_[lt]) piece_parent_[id] = lt;

    // global mesh: background vertices, cut points, then midpoints
    nodes_ = mesh_.vertices();
    std::vector<bool> boundary(nodes_.size());
    for (std::size_t v = 0; v < nodes_.size(); ++v) boundary[v] = mesh_.on_boundary(static_cast<int>(v));
    auto add_node = [&](const Vec2& x, bool b) {
        nodes_.push_back(x);
        boundary.push_back(b);
        return static_cast<int>(nodes_.size() - 1);
    };
    std::unordered_map<std::uint64_t, int> cut_node, mid_node;
    const auto& tris = mesh_.triangles();
    const int big = mesh_.n();
    first_of_.reserve(tris.size() + 1);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        first_of_.push_back(elements_.size());
        const std::size_t sq = t / 4;
        const std::size_t lt = 4 * ((sq / big) % n * n + (sq % big) % n) + t % 4;
        const auto p = mesh_.triangle_coords(t);
        int centre = -1;
        for (int id : pieces_of_[lt]) {
            const Piece& piece = pieces_[id];
            std::array<int, 6> e;
            for (int i = 0; i < 3; ++i) {
                const int r = piece.ref[i];
                if (r < 3) {
                    e[i] = tris[t][r];
                    continue;
                }
                if (r == 6) {
                    const Eigen::Vector3d& w = piece.bary[i];
                    if (centre < 0) centre = add_node(w[0] * p[0] + w[1] * p[1] + w[2] * p[2], false);
                    e[i] = centre;
                    continue;
                }
                const int a = tris[t][r - 3], b = tris[t][(r - 2) % 3];
                auto [it, fresh] = cut_node.try_emplace(pair_key(a, b), 0);
                if (fresh) {
                    const Eigen::Vector3d& w = piece.bary[i];
                    it->second = add_node(w[0] * p[0] + w[1] * p[1] + w[2] * p[2], boundary[a] && boundary[b]);
                }
                e[i] = it->second;
            }
            for (int i = 0; i < 3; ++i) {
                const int a = e[i], b = e[(i + 1) % 3];
                auto [it, fresh] = mid_node.try_emplace(pair_key(a, b), 0);
                if (fresh) it->second = add_node(0.5 * (nodes_[a] + nodes_[b]), boundary[a] && boundary[b]);
                e[3 + i] = it->second;
            }
            elements_.push_back(e);
            parent_.push_back(t);
            local_.push_back(static_cast<std::size_t>(id));
        }
    }
    first_of_.push_back(elements_.size());

    free_.assign(nodes_.size(), -1);
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (boundary[v]) continue;
        free_[v] = static_cast<Eigen::Index>(interior_.size());
        interior_.push_back(static_cast<int>(v));
    }
}

std::array<Vec2, 3> QuadraticSpace::element_coords(std::size_t e) const {
    return {nodes_[elements_[e][0]], nodes_[elements_[e][1]], nodes_[elements_[e][2]]};
}

double QuadraticSpace::element_area(std::size_t e) const {
    const auto p = element_coords(e);
    return 0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
}

std::array<Vec2, 3> QuadraticSpace::local_coords(std::size_t l) const {
    const auto p = cell_mesh_.triangle_coords(piece_parent_[l]);
    std::array<Vec2, 3> out;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d& w = pieces_[l].bary[i];
        out[i] = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
    }
    return out;
}

Eigen::VectorXd QuadraticSpace::interpolate(const Field& f) const {
    Eigen::VectorXd out(2 * nodes_.size());
    for (std::size_t v = 0; v < nodes_.size(); ++v) out.segment<2>(2 * v) = f(nodes_[v]);
    return out;
}

Eigen::VectorXd QuadraticSpace::restrict(const Eigen::VectorXd& nodal) const {
    Eigen::VectorXd out(dofs());
    for (std::size_t i = 0; i < interior_.size(); ++i) out.segment<2>(2 * i) = nodal.segment<2>(2 * interior_[i]);
    return out;
}

Eigen::VectorXd QuadraticSpace::extend(const Eigen::VectorXd& free) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * nodes_.size());
    for (std::size_t i = 0; i < interior_.size(); ++i) out.segment<2>(2 * interior_[i]) = free.segment<2>(2 * i);
    return out;
}

Vec2 QuadraticSpace::evaluate(const Eigen::VectorXd& nodal, std::size_t e, const Eigen::Vector3d& bary) const {
    const p2::Shape n = p2::shape(bary);
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 6; ++i) u += n[i] * nodal.segment<2>(2 * elements_[e][i]);
    return u;
}

Vec2 QuadraticSpace::evaluate(const Eigen::VectorXd& nodal, const Vec2& x) const {
    const auto loc = mesh_.locate(x);
    const std::size_t t = static_cast<std::size_t>(loc.triangle);
    std::size_t best = first_of_[t];
    Eigen::Vector3d best_bary = Eigen::Vector3d::Constant(-1.0);
    for (std::size_t e = first_of_[t]; e < first_of_[t + 1]; ++e) {
        const Eigen::Vector3d b = pieces_[local_[e]].to_piece * loc.bary;
        if (b.minCoeff() > best_bary.minCoeff()) {
            best = e;
            best_bary = b;
        }
    }
    return evaluate(nodal, best, best_bary);
}

}  // namespace thinframe
