#pragma once

#include "thinframe/geometry.hpp"

#include <array>
#include <vector>

namespace thinframe {

/// Crossed-triangle mesh of the square [0, side]^2.
///
/// Each of the n x n subsquares is split into four triangles by its
/// diagonals, so both axis-aligned and +-45 degree lines through grid
/// vertices run along mesh edges. A periodic mesh identifies opposite faces
/// (vertex indices wrap); a plain mesh keeps the (n+1)^2 grid vertices.
class CrossMesh {
public:
    CrossMesh(int n, double side, bool periodic);

    int n() const { return n_; }
    double side() const { return side_; }
    double spacing() const { return side_ / n_; }
    bool periodic() const { return periodic_; }

    int grid_vertex(int i, int j) const;
    int centre_vertex(int i, int j) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

    /// Vertex coordinates of triangle t without periodic wrapping.
    std::array<Vec2, 3> triangle_coords(std::size_t t) const;
    double triangle_area(std::size_t) const { return 0.25 * spacing() * spacing(); }

    /// Grid vertex on the outer boundary (plain meshes only).
    bool on_boundary(int v) const;

    struct Location {
        int triangle;
        Eigen::Vector3d bary;
    };
    /// Triangle containing p and its barycentric coordinates. Periodic meshes
    /// wrap p into the cell first; plain meshes clamp to the square.
    Location locate(const Vec2& p) const;

    /// Vertex at a grid point or subsquare centre, or -1 if p is neither.
    int vertex_at(const Vec2& p, double tol = 1e-9) const;

private:
    int n_;
    double side_;
    bool periodic_;
    int grid_side_;
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
};

/// Periodic crossed-triangle mesh of the unit cell traced along a framework.
struct CellMesh {
    CrossMesh mesh;
    /// Mesh vertex of every graph node.
    std::vector<int> node_vertex;
    /// Per link: the chain of mesh vertices from its start node to its end node.
    std::vector<std::vector<int>> link_paths;
    /// Per link: mesh edge length along the path (uniform per link).
    std::vector<double> link_step;

    /// Stiff/soft tag per triangle by centroid distance to the network.
    std::vector<Phase> classify(const RodRegion& region) const;
};

/// Traces every link along mesh edges. Throws "link not mesh-alignable" when a
/// link direction is not 0, 90 or +-45 degrees or its end points miss the mesh.
CellMesh build_cell_mesh(const FrameworkGraph& g, int n);

}  // namespace thinframe
