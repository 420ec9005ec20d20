#include "thinframe/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace thinframe {

namespace {

constexpr double kGeomTol = 1e-12;

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

double wrap_unit(double v) {
    double w = v - std::floor(v);
    if (w >= 1.0 - kGeomTol) w -= 1.0;
    if (w < 0.0) w = 0.0;
    return w;
}

Vec2 wrap_cell(const Vec2& y) { return {wrap_unit(y.x()), wrap_unit(y.y())}; }

bool is_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

// Every translate of a link that can come within distance 1 of the unit cell.
template <class F>
void for_each_translate(F&& f) {
    for (int sx = -2; sx <= 2; ++sx)
        for (int sy = -2; sy <= 2; ++sy) f(Vec2(sx, sy), sx == 0 && sy == 0);
}

void check_pair(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    const Vec2 r = p1 - p0;
    const Vec2 s = q1 - q0;
    const double rs = cross(r, s);
    const double scale = r.norm() * s.norm();
    if (std::abs(rs) <= 1e-12 * scale) {
        // Parallel: overlapping only if collinear with a shared stretch.
        if (std::abs(cross(q0 - p0, r)) > 1e-12 * r.norm()) return;
        const double rr = r.squaredNorm();
        double t0 = (q0 - p0).dot(r) / rr;
        double t1 = (q1 - p0).dot(r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        const double lo = std::max(0.0, t0);
        const double hi = std::min(1.0, t1);
        if (hi - lo > 1e-9) throw GeometryError("links overlap");
        return;
    }
    const double t = cross(q0 - p0, s) / rs;
    const double u = cross(q0 - p0, r) / rs;
    constexpr double eps = 1e-10;
    if (t < -eps || t > 1 + eps || u < -eps || u > 1 + eps) return;
    const bool t_end = std::abs(t) <= eps || std::abs(t - 1) <= eps;
    const bool u_end = std::abs(u) <= eps || std::abs(u - 1) <= eps;
    if (!(t_end && u_end)) throw GeometryError("links intersect away from nodes");
}

}  // namespace

FrameworkGraph::FrameworkGraph(std::vector<Vec2> nodes, std::vector<Link> links)
    : FrameworkGraph(std::move(nodes), std::move(links), true) {}

FrameworkGraph::FrameworkGraph(std::vector<Vec2> nodes, std::vector<Link> links, bool detect_symmetry)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    if (nodes_.empty()) throw GeometryError("framework has no nodes");
    if (links_.empty()) throw GeometryError("framework has no links");
    for (const Vec2& p : nodes_) {
        if (!(p.x() >= 0.0 && p.x() < 1.0 && p.y() >= 0.0 && p.y() < 1.0))
            throw GeometryError("node out of cell");
    }
    const int nn = static_cast<int>(nodes_.size());
    for (const Link& l : links_) {
        if (l.a < 0 || l.a >= nn || l.b < 0 || l.b >= nn) throw GeometryError("link references unknown node");
    }
    tangents_.reserve(links_.size());
    lengths_.reserve(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Vec2 d = link_end(i) - link_start(i);
        const double len = d.norm();
        if (!(len > kGeomTol)) throw GeometryError("zero-length link");
        lengths_.push_back(len);
        tangents_.push_back(d / len);
        total_length_ += len;
        const Vec2 a = link_start(i);
        const Vec2 b = link_end(i);
        if ((std::abs(d.y()) <= kGeomTol && is_integer(a.y(), kGeomTol)) ||
            (std::abs(d.x()) <= kGeomTol && is_integer(a.x(), kGeomTol)))
            throw GeometryError("link on cell boundary");
        (void)b;
    }

    // Pairwise intersections, including each link against its own translates.
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Vec2 p0 = link_start(i);
        const Vec2 p1 = link_end(i);
        for (std::size_t j = i; j < links_.size(); ++j) {
            for_each_translate([&](const Vec2& s, bool zero) {
                if (i == j && zero) return;
                check_pair(p0, p1, link_start(j) + s, link_end(j) + s);
            });
        }
    }
    // Nodes lying inside a link that does not end there.
    for (const Vec2& node : nodes_) {
        for (std::size_t i = 0; i < links_.size(); ++i) {
            for_each_translate([&](const Vec2& s, bool) {
                const Vec2 a = link_start(i) + s;
                const Vec2 b = link_end(i) + s;
                if ((node - a).norm() <= 1e-10 || (node - b).norm() <= 1e-10) return;
                if (segment_distance(node, a, b) <= 1e-10)
                    throw GeometryError("node lies inside a non-incident link");
            });
        }
    }

    if (detect_symmetry) symmetric_ = same_network(*this, rotated_quarter(*this));
}

Vec2 FrameworkGraph::link_start(std::size_t i) const { return nodes_[links_[i].a]; }

Vec2 FrameworkGraph::link_end(std::size_t i) const {
    const Link& l = links_[i];
    return nodes_[l.b] + l.shift.cast<double>();
}

FrameworkGraph FrameworkGraph::with_reversed_link(std::size_t i) const {
    std::vector<Link> links = links_;
    Link& l = links.at(i);
    l = Link{l.b, l.a, -l.shift};
    return FrameworkGraph(nodes_, std::move(links));
}

FrameworkGraph build_preset(std::string_view name) {
    const Vec2 centre(0.5, 0.5);
    if (name == "grid") {
        return FrameworkGraph({centre}, {Link{0, 0, Shift(1, 0)}, Link{0, 0, Shift(0, 1)}});
    }
    if (name == "grid-diag") {
        const Vec2 corner(0.0, 0.0);
        return FrameworkGraph({centre, corner}, {
                                                    Link{0, 0, Shift(1, 0)},
                                                    Link{0, 0, Shift(0, 1)},
                                                    Link{1, 0, Shift(0, 0)},
                                                    Link{0, 1, Shift(1, 1)},
                                                    Link{0, 1, Shift(1, 0)},
                                                    Link{0, 1, Shift(0, 1)},
                                                });
    }
    throw GeometryError("unknown preset '" + std::string(name) + "'");
}

FrameworkGraph resolve_framework(const std::string& preset_or_path) {
    if (preset_or_path == "grid" || preset_or_path == "grid-diag") return build_preset(preset_or_path);
    return load_graph(preset_or_path);
}

FrameworkGraph parse_graph(std::istream& in) {
    std::string line;
    bool header = false;
    std::vector<std::pair<long, Vec2>> nodes;
    std::vector<std::tuple<long, long, Shift>> raw_links;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw GeometryError("parse error at line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (!header) {
            std::string version;
            if (key != "framework" || !(ls >> version) || version != "v1") fail("expected header 'framework v1'");
            header = true;
            continue;
        }
        if (key == "node") {
            long id;
            double y1, y2;
            if (!(ls >> id >> y1 >> y2)) fail("malformed node record");
            nodes.emplace_back(id, Vec2(y1, y2));
        } else if (key == "link") {
            long a, b;
            int s1, s2;
            if (!(ls >> a >> b >> s1 >> s2)) fail("malformed link record");
            raw_links.emplace_back(a, b, Shift(s1, s2));
        } else {
            fail("unknown record '" + key + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing tokens");
    }
    if (!header) throw GeometryError("parse error: missing header 'framework v1'");

    std::vector<Vec2> points;
    std::vector<long> ids;
    for (const auto& [id, p] : nodes) {
        if (std::find(ids.begin(), ids.end(), id) != ids.end())
            throw GeometryError("parse error: duplicate node id " + std::to_string(id));
        ids.push_back(id);
        points.push_back(p);
    }
    auto index_of = [&](long id) {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw GeometryError("parse error: unknown node id " + std::to_string(id));
        return static_cast<int>(it - ids.begin());
    };
    std::vector<Link> links;
    for (const auto& [a, b, s] : raw_links) links.push_back(Link{index_of(a), index_of(b), s});
    return FrameworkGraph(std::move(points), std::move(links));
}

FrameworkGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError("cannot open framework file '" + path + "'");
    return parse_graph(in);
}

void write_graph(std::ostream& out, const FrameworkGraph& g) {
    out << "framework v1\n" << std::setprecision(17);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        out << "node " << i << ' ' << g.nodes()[i].x() << ' ' << g.nodes()[i].y() << '\n';
    for (const Link& l : g.links())
        out << "link " << l.a << ' ' << l.b << ' ' << l.shift.x() << ' ' << l.shift.y() << '\n';
}

Vec2 rotate_quarter(const Vec2& y) { return {1.0 - y.y(), y.x()}; }

FrameworkGraph rotated_quarter(const FrameworkGraph& g) {
    std::vector<Vec2> nodes;
    std::vector<Shift> offsets;
    for (const Vec2& p : g.nodes()) {
        const Vec2 r = rotate_quarter(p);
        const Vec2 w = wrap_cell(r);
        nodes.push_back(w);
        offsets.push_back((r - w).array().round().cast<int>().matrix());
    }
    std::vector<Link> links;
    for (const Link& l : g.links()) {
        const Shift rs(-l.shift.y(), l.shift.x());
        links.push_back(Link{l.a, l.b, Shift(offsets[l.b] + rs - offsets[l.a])});
    }
    // The rotation of a symmetric network is symmetric; no need to test again.
    FrameworkGraph out(std::move(nodes), std::move(links), false);
    out.symmetric_ = g.symmetric_;
    return out;
}

bool same_network(const FrameworkGraph& g, const FrameworkGraph& other, double tol) {
    if (g.link_count() != other.link_count()) return false;
    auto translate_match = [tol](const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
        const Vec2 d = a0 - b0;
        const Vec2 k = d.array().round().matrix();
        return (d - k).norm() <= tol && (a1 - (b1 + k)).norm() <= tol;
    };
    std::vector<bool> used(other.link_count(), false);
    for (std::size_t i = 0; i < g.link_count(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < other.link_count() && !found; ++j) {
            if (used[j]) continue;
            const Vec2 a0 = g.link_start(i), a1 = g.link_end(i);
            const Vec2 b0 = other.link_start(j), b1 = other.link_end(j);
            if (translate_match(a0, a1, b0, b1) || translate_match(a0, a1, b1, b0)) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

double periodic_distance(const FrameworkGraph& g, const Vec2& y) {
    const Vec2 p = wrap_cell(y);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.link_count(); ++i) {
        const Vec2 a = g.link_start(i);
        const Vec2 b = g.link_end(i);
        for_each_translate([&](const Vec2& s, bool) { best = std::min(best, segment_distance(p, a + s, b + s)); });
    }
    return best;
}

RodRegion::RodRegion(FrameworkGraph g, double half_width) : graph_(std::move(g)), h_(half_width) {
    if (!(h_ > 0.0)) throw GeometryError("rod half-width must be positive");
    if (!(h_ < max_half_width(graph_))) throw GeometryError("rod half-width too large: rods of distinct links overlap away from nodes");
}

Phase RodRegion::classify(const Vec2& y) const {
    return periodic_distance(graph_, y) < h_ ? Phase::stiff : Phase::soft;
}

double RodRegion::max_half_width(const FrameworkGraph& g) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& node : g.nodes()) {
        for (std::size_t i = 0; i < g.link_count(); ++i) {
            for_each_translate([&](const Vec2& s, bool) {
                const Vec2 a = g.link_start(i) + s;
                const Vec2 b = g.link_end(i) + s;
                if ((node - a).norm() <= 1e-10 || (node - b).norm() <= 1e-10) return;
                best = std::min(best, segment_distance(node, a, b));
            });
        }
    }
    return 0.5 * best;
}

namespace {

struct Interval {
    double lo, hi;
};

// Chord {x : dist((x, y), [a, b]) < h} of a stadium, empty when lo >= hi.
Interval stadium_chord(const Vec2& a, const Vec2& b, double h, double y) {
    Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto merge = [&](double lo, double hi) {
        if (lo < hi) {
            out.lo = std::min(out.lo, lo);
            out.hi = std::max(out.hi, hi);
        }
    };
    for (const Vec2& c : {a, b}) {
        const double dy = y - c.y();
        if (std::abs(dy) < h) {
            const double half = std::sqrt(h * h - dy * dy);
            merge(c.x() - half, c.x() + half);
        }
    }
    // Rectangle a + t tau + s nu, 0 <= t <= len, |s| <= h, on the line (x, y).
    const Vec2 d = b - a;
    const double len = d.norm();
    const Vec2 tau = d / len;
    const Vec2 nu(-tau.y(), tau.x());
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto constrain = [&](const Vec2& dir, double lower, double upper) {
        // lower <= (x - a.x) dir.x + (y - a.y) dir.y <= upper
        const double off = (y - a.y()) * dir.y();
        if (std::abs(dir.x()) < 1e-15) {
            if (off < lower || off > upper) hi = -std::numeric_limits<double>::infinity();
            return;
        }
        double x0 = a.x() + (lower - off) / dir.x();
        double x1 = a.x() + (upper - off) / dir.x();
        if (x0 > x1) std::swap(x0, x1);
        lo = std::max(lo, x0);
        hi = std::min(hi, x1);
    };
    constrain(tau, 0.0, len);
    constrain(nu, -h, h);
    merge(lo, hi);
    return out;
}

double stiff_length_on_line(const FrameworkGraph& g, double h, double y) {
    std::vector<Interval> pieces;
    for (std::size_t i = 0; i < g.link_count(); ++i) {
        const Vec2 a = g.link_start(i);
        const Vec2 b = g.link_end(i);
        for_each_translate([&](const Vec2& s, bool) {
            Interval c = stadium_chord(a + s, b + s, h, y);
            c.lo = std::max(c.lo, 0.0);
            c.hi = std::min(c.hi, 1.0);
            if (c.lo < c.hi) pieces.push_back(c);
        });
    }
    std::sort(pieces.begin(), pieces.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
    double total = 0.0;
    double cur_lo = 0.0, cur_hi = -1.0;
    for (const Interval& c : pieces) {
        if (c.lo > cur_hi) {
            if (cur_hi > cur_lo) total += cur_hi - cur_lo;
            cur_lo = c.lo;
            cur_hi = c.hi;
        } else {
            cur_hi = std::max(cur_hi, c.hi);
        }
    }
    if (cur_hi > cur_lo) total += cur_hi - cur_lo;
    return total;
}

}  // namespace

double stiff_area(const RodRegion& region) {
    using boost::math::quadrature::gauss_kronrod;
    const FrameworkGraph& g = region.graph();
    const double h = region.half_width();
    auto f = [&](double y) { return stiff_length_on_line(g, h, y); };
    // Break the y-range at the kinks of the integrand that are easy to predict:
    // the top and bottom of every strip around a node.
    std::vector<double> cuts{0.0, 1.0};
    for (const Vec2& p : g.nodes()) {
        for (double c : {p.y() - h, p.y() + h, p.y()}) {
            const double w = c - std::floor(c);
            if (w > 0.0 && w < 1.0) cuts.push_back(w);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-14; }), cuts.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        area += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 12, 1e-10);
    return area;
}

}  // namespace thinframe
