#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thinframe {

using Vec2 = Eigen::Vector2d;
using Shift = Eigen::Vector2i;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Straight segment from nodes[a] to nodes[b] + shift, in cell coordinates.
struct Link {
    int a = 0;
    int b = 0;
    Shift shift = Shift::Zero();
};

/// Periodic singular network inside the unit cell [0,1)^2.
///
/// Construction validates the geometry: nodes lie in the cell, links have
/// positive length, and links (including their periodic translates) meet
/// only at graph nodes. Links lying on the cell boundary are rejected.
class FrameworkGraph {
public:
    FrameworkGraph(std::vector<Vec2> nodes, std::vector<Link> links);

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }

    Vec2 link_start(std::size_t i) const;
    Vec2 link_end(std::size_t i) const;
    Vec2 tangent(std::size_t i) const { return tangents_[i]; }
    /// Tangent rotated by +pi/2, so that det[tau nu] = +1.
    Vec2 normal(std::size_t i) const { return {-tangents_[i].y(), tangents_[i].x()}; }
    double length(std::size_t i) const { return lengths_[i]; }
    double total_length() const { return total_length_; }

    /// True when the network is invariant under rotation by pi/2 about the
    /// cell centre, up to integer translations.
    bool symmetric() const { return symmetric_; }

    /// Same graph with link `i` traversed in the opposite direction.
    FrameworkGraph with_reversed_link(std::size_t i) const;

private:
    FrameworkGraph(std::vector<Vec2> nodes, std::vector<Link> links, bool detect_symmetry);
    friend FrameworkGraph rotated_quarter(const FrameworkGraph& g);

    std::vector<Vec2> nodes_;
    std::vector<Link> links_;
    std::vector<Vec2> tangents_;
    std::vector<double> lengths_;
    double total_length_ = 0.0;
    bool symmetric_ = false;
};

/// Known presets: "grid" and "grid-diag".
FrameworkGraph build_preset(std::string_view name);
/// Preset name or path to a framework file.
FrameworkGraph resolve_framework(const std::string& preset_or_path);

FrameworkGraph parse_graph(std::istream& in);
FrameworkGraph load_graph(const std::string& path);
void write_graph(std::ostream& out, const FrameworkGraph& g);

/// Rotation by +pi/2 about the cell centre.
Vec2 rotate_quarter(const Vec2& y);

/// Set comparison of two networks modulo integer translations.
bool same_network(const FrameworkGraph& g, const FrameworkGraph& other, double tol = 1e-12);
/// The network rotated by +pi/2 about the cell centre (nodes wrapped back into the cell).
FrameworkGraph rotated_quarter(const FrameworkGraph& g);

/// Distance from y to the periodic network.
double periodic_distance(const FrameworkGraph& g, const Vec2& y);

enum class Phase { stiff, soft };

/// h-neighbourhood of the network: points at periodic distance < h are stiff.
class RodRegion {
public:
    RodRegion(FrameworkGraph g, double half_width);

    const FrameworkGraph& graph() const { return graph_; }
    double half_width() const { return h_; }
    Phase classify(const Vec2& y) const;

    /// Largest admissible half-width for a graph: half the smallest distance
    /// from a node to a link not incident to it.
    static double max_half_width(const FrameworkGraph& g);

private:
    FrameworkGraph graph_;
    double h_;
};

inline Phase classify_point(const RodRegion& region, const Vec2& y) { return region.classify(y); }

/// Lebesgue area of the h-neighbourhood of the network within one cell.
///
/// Integrates the exact length of the stiff set along horizontal lines
/// (union of stadium chords) with composite Gauss-Legendre in y2; the
/// absolute error is below 1e-9 for the presets.
double stiff_area(const RodRegion& region);

}  // namespace thinframe
