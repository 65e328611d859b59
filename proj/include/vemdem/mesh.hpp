#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vemdem/error.hpp"

namespace vemdem::mesh {

using Vec2 = Eigen::Vector2d;

enum class CellKind { Simplex, Polygon };
enum class Region { NearField, FarField, Well };

inline std::string to_string(CellKind k) { return k == CellKind::Simplex ? "simplex" : "polygon"; }

inline std::string to_string(Region r) {
    switch (r) {
    case Region::NearField: return "near-field";
    case Region::FarField: return "far-field";
    case Region::Well: return "well";
    }
    return "unknown";
}

inline CellKind cell_kind_from_string(const std::string& s) {
    if (s == "simplex") return CellKind::Simplex;
    if (s == "polygon") return CellKind::Polygon;
    throw MeshError("unknown cell kind '" + s + "'");
}

inline Region region_from_string(const std::string& s) {
    if (s == "near-field") return Region::NearField;
    if (s == "far-field") return Region::FarField;
    if (s == "well") return Region::Well;
    throw MeshError("unknown region tag '" + s + "'");
}

/// 2D polygonal mesh. Cells are counter-clockwise node loops; hanging nodes
/// are ordinary vertices of the coarse polygon that owns the edge.
struct PolyMesh {
    std::vector<Vec2> nodes;
    std::vector<std::vector<int>> cells;
    std::vector<CellKind> kind;
    std::vector<Region> region;

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_cells() const { return cells.size(); }
};

/// Unique undirected edges and their (at most two) adjacent cells.
struct Topology {
    std::vector<std::array<int, 2>> edge_nodes;
    // Second entry is -1 for boundary edges.
    std::vector<std::array<int, 2>> edge_cells;
    // For every cell, the edge id of loop segment k -> k+1.
    std::vector<std::vector<int>> cell_edges;

    bool is_boundary(int edge) const { return edge_cells[edge][1] < 0; }
    std::size_t num_edges() const { return edge_nodes.size(); }
};

inline Topology build_topology(const PolyMesh& mesh) {
    Topology topo;
    std::map<std::pair<int, int>, int> lookup;
    topo.cell_edges.resize(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells[c];
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const int a = loop[k];
            const int b = loop[(k + 1) % loop.size()];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = lookup.try_emplace({key.first, key.second}, static_cast<int>(topo.num_edges()));
            if (inserted) {
                topo.edge_nodes.push_back({a, b});
                topo.edge_cells.push_back({static_cast<int>(c), -1});
            } else {
                auto& owners = topo.edge_cells[it->second];
                if (owners[1] >= 0) {
                    throw MeshError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                    ") is shared by more than two cells");
                }
                owners[1] = static_cast<int>(c);
            }
            topo.cell_edges[c].push_back(it->second);
        }
    }
    return topo;
}

inline double signed_area(const PolyMesh& mesh, std::size_t cell) {
    const auto& loop = mesh.cells[cell];
    double twice = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const Vec2& p = mesh.nodes[loop[k]];
        const Vec2& q = mesh.nodes[loop[(k + 1) % loop.size()]];
        twice += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * twice;
}

struct GeometryCache {
    std::vector<double> area;
    std::vector<Vec2> centroid;
    // Per cell, per loop segment k -> k+1.
    std::vector<std::vector<double>> edge_length;
    std::vector<std::vector<Vec2>> edge_normal;

    double perimeter(std::size_t cell) const {
        double p = 0.0;
        for (double l : edge_length[cell]) p += l;
        return p;
    }
};

inline GeometryCache compute_geometry(const PolyMesh& mesh) {
    GeometryCache g;
    const std::size_t nc = mesh.num_cells();
    g.area.resize(nc);
    g.centroid.resize(nc);
    g.edge_length.resize(nc);
    g.edge_normal.resize(nc);

    for (std::size_t c = 0; c < nc; ++c) {
        const auto& loop = mesh.cells[c];
        const std::size_t n = loop.size();
        if (n < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 nodes");

        const double area = signed_area(mesh, c);
        if (!(area > 0.0)) {
            throw MeshError("cell " + std::to_string(c) + " has non-positive area " + std::to_string(area));
        }
        g.area[c] = area;

        if (n == 3) {
            g.centroid[c] = (mesh.nodes[loop[0]] + mesh.nodes[loop[1]] + mesh.nodes[loop[2]]) / 3.0;
        } else {
            // Area-weighted centroid, taken relative to the first vertex to
            // limit cancellation for cells far from the origin.
            const Vec2 origin = mesh.nodes[loop[0]];
            Vec2 acc = Vec2::Zero();
            for (std::size_t k = 0; k < n; ++k) {
                const Vec2 p = mesh.nodes[loop[k]] - origin;
                const Vec2 q = mesh.nodes[loop[(k + 1) % n]] - origin;
                const double cross = p.x() * q.y() - q.x() * p.y();
                acc += cross * (p + q);
            }
            g.centroid[c] = origin + acc / (6.0 * area);
        }

        g.edge_length[c].resize(n);
        g.edge_normal[c].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 t = mesh.nodes[loop[(k + 1) % n]] - mesh.nodes[loop[k]];
            const double len = t.norm();
            if (len == 0.0) {
                throw MeshError("cell " + std::to_string(c) + " has a zero-length edge");
            }
            g.edge_length[c][k] = len;
            // Outward normal of a counter-clockwise loop.
            g.edge_normal[c][k] = Vec2(t.y(), -t.x()) / len;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Diagnostic {
    enum class Kind { NodeIndex, Arity, Degenerate, Orientation, SelfIntersection, Topology };
    Kind kind;
    int cell;
    std::string message;
};

namespace detail {

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double scale = std::max({(p2 - p1).norm(), (q2 - q1).norm(), 1e-300});
    const double eps = 1e-12 * scale * scale;
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
        ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))) {
        return true;
    }
    auto on_segment = [&](const Vec2& a, const Vec2& b, const Vec2& p, double d) {
        if (std::abs(d) > eps) return false;
        return std::min(a.x(), b.x()) - 1e-12 * scale <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-12 * scale &&
               std::min(a.y(), b.y()) - 1e-12 * scale <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-12 * scale;
    };
    return on_segment(p1, p2, q1, d1) || on_segment(p1, p2, q2, d2) || on_segment(q1, q2, p1, d3) ||
           on_segment(q1, q2, p2, d4);
}

} // namespace detail

/// Returns an empty list iff the mesh satisfies every structural invariant.
inline std::vector<Diagnostic> validate(const PolyMesh& mesh) {
    using K = Diagnostic::Kind;
    std::vector<Diagnostic> out;
    const int nn = static_cast<int>(mesh.num_nodes());

    if (mesh.kind.size() != mesh.num_cells() || mesh.region.size() != mesh.num_cells()) {
        out.push_back({K::Arity, -1, "cell kind/region arrays do not match the cell count"});
        return out;
    }

    std::map<std::pair<int, int>, int> edge_use;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const int ci = static_cast<int>(c);
        const auto& loop = mesh.cells[c];
        const std::string tag = "cell " + std::to_string(c) + ": ";

        bool indices_ok = loop.size() >= 3;
        if (!indices_ok) out.push_back({K::Arity, ci, tag + "fewer than 3 nodes"});
        for (int v : loop) {
            if (v < 0 || v >= nn) {
                out.push_back({K::NodeIndex, ci, tag + "node index " + std::to_string(v) + " out of range"});
                indices_ok = false;
            }
        }
        if (!indices_ok) continue;

        std::vector<int> sorted = loop;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            out.push_back({K::Degenerate, ci, tag + "repeated node in loop"});
            continue;
        }
        if (mesh.kind[c] == CellKind::Simplex && loop.size() != 3) {
            out.push_back({K::Arity, ci, tag + "simplex cell must have exactly 3 nodes"});
        }

        const double area = signed_area(mesh, c);
        if (area < 0.0) {
            out.push_back({K::Orientation, ci, tag + "loop is clockwise"});
        } else if (area == 0.0) {
            out.push_back({K::Degenerate, ci, tag + "zero area"});
        }

        const std::size_t n = loop.size();
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                // Skip segments that share a vertex.
                if (b == a + 1 || (a == 0 && b == n - 1)) continue;
                const Vec2& p1 = mesh.nodes[loop[a]];
                const Vec2& p2 = mesh.nodes[loop[(a + 1) % n]];
                const Vec2& q1 = mesh.nodes[loop[b]];
                const Vec2& q2 = mesh.nodes[loop[(b + 1) % n]];
                if (detail::segments_intersect(p1, p2, q1, q2)) {
                    out.push_back({K::SelfIntersection, ci,
                                   tag + "segments " + std::to_string(a) + " and " + std::to_string(b) + " intersect"});
                }
            }
        }

        for (std::size_t k = 0; k < n; ++k) {
            const auto key = std::minmax(loop[k], loop[(k + 1) % n]);
            if (++edge_use[{key.first, key.second}] == 3) {
                out.push_back({K::Topology, ci,
                               "edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                   ") is shared by more than two cells"});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hybrid mesh builder
// ---------------------------------------------------------------------------

struct OuterGrid {
    double width = 1.0;
    double height = 1.0;
    int nx = 1;
    int ny = 1;
};

struct InnerRegion {
    Vec2 center = Vec2::Zero();
    double half_size = 0.0;
    double edge_length = 0.0;
    double well_radius = 0.0;
    // Map the fine lattice around the well so that the well outline is a
    // polygonal circle instead of a staircase.
    bool conform_well = false;
    // Vertical half-extent; 0 means square (half_size).
    double half_height = 0.0;
};

namespace detail {

/// Radial map that sends squares |x - c|_inf = rho <= r0 to circles and blends
/// back to the identity at rho = r1.
inline Vec2 square_to_disc(const Vec2& x, const Vec2& c, double r0, double r1) {
    const Vec2 d = x - c;
    const double rho = d.cwiseAbs().maxCoeff();
    const double r = d.norm();
    if (r == 0.0 || rho >= r1) return x;
    const double circle = rho / r;
    const double f = rho <= r0 ? circle : (1.0 - (rho - r0) / (r1 - r0)) * circle + (rho - r0) / (r1 - r0);
    return c + f * d;
}

} // namespace detail

/// Cartesian far-field polygons around a structured triangulated box.
///
/// The requested inner box is snapped outward to the outer grid lines and must
/// leave at least one ring of outer cells. Each covered outer cell is split into
/// ceil(cell size / edge_length) fine quads per direction, and every fine quad
/// into two triangles along alternating diagonals. Far-field cells that border
/// the box receive the fine interface nodes as extra (hanging) vertices.
inline PolyMesh build_hybrid_mesh(const OuterGrid& outer, const InnerRegion& inner) {
    if (!(outer.width > 0.0 && outer.height > 0.0) || outer.nx < 1 || outer.ny < 1) {
        throw MeshError("outer grid must have positive extent and cell counts");
    }
    if (!(inner.half_size > 0.0) || !(inner.edge_length > 0.0) || inner.well_radius < 0.0 ||
        inner.half_height < 0.0) {
        throw MeshError("inner region needs positive half-size and edge length");
    }
    const double dx = outer.width / outer.nx;
    const double dy = outer.height / outer.ny;
    const double snap = 1e-9;

    const int i0 = static_cast<int>(std::floor((inner.center.x() - inner.half_size) / dx + snap));
    const int i1 = static_cast<int>(std::ceil((inner.center.x() + inner.half_size) / dx - snap));
    const double half_y = inner.half_height > 0.0 ? inner.half_height : inner.half_size;
    const int j0 = static_cast<int>(std::floor((inner.center.y() - half_y) / dy + snap));
    const int j1 = static_cast<int>(std::ceil((inner.center.y() + half_y) / dy - snap));
    if (i0 < 1 || j0 < 1 || i1 > outer.nx - 1 || j1 > outer.ny - 1 || i1 <= i0 || j1 <= j0) {
        throw MeshError("inner box must lie strictly inside the outer box with at least one ring of outer cells");
    }
    if (inner.edge_length > std::min(dx, dy) * (1.0 + snap)) {
        throw MeshError("inner edge length must not exceed the outer cell size");
    }

    const int mx = static_cast<int>(std::ceil(dx / inner.edge_length - snap));
    const int my = static_cast<int>(std::ceil(dy / inner.edge_length - snap));
    const int nfx = (i1 - i0) * mx;
    const int nfy = (j1 - j0) * my;
    const double hx = dx / mx;
    const double hy = dy / my;
    const double x_box = i0 * dx;
    const double y_box = j0 * dy;

    PolyMesh mesh;

    // Coarse nodes strictly inside the box are dropped; coarse nodes on the box
    // boundary are shared with the fine lattice.
    std::vector<int> coarse_id((outer.nx + 1) * (outer.ny + 1), -1);
    std::vector<int> fine_id((nfx + 1) * (nfy + 1), -1);
    auto cidx = [&](int i, int j) { return j * (outer.nx + 1) + i; };
    auto fidx = [&](int I, int J) { return J * (nfx + 1) + I; };
    auto in_box_closed = [&](int i, int j) { return i >= i0 && i <= i1 && j >= j0 && j <= j1; };

    for (int j = 0; j <= outer.ny; ++j) {
        for (int i = 0; i <= outer.nx; ++i) {
            if (in_box_closed(i, j)) continue;
            coarse_id[cidx(i, j)] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.emplace_back(i * dx, j * dy);
        }
    }
    for (int J = 0; J <= nfy; ++J) {
        for (int I = 0; I <= nfx; ++I) {
            fine_id[fidx(I, J)] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.emplace_back(x_box + I * hx, y_box + J * hy);
        }
    }
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            coarse_id[cidx(i, j)] = fine_id[fidx((i - i0) * mx, (j - j0) * my)];
        }
    }

    Vec2 well_center = inner.center;
    double well_radius = inner.well_radius;
    if (inner.conform_well && inner.well_radius > 0.0) {
        // Centre on the nearest fine node; radius on a grid line.
        const int Ic = static_cast<int>(std::lround((inner.center.x() - x_box) / hx));
        const int Jc = static_cast<int>(std::lround((inner.center.y() - y_box) / hy));
        const Vec2 c(x_box + Ic * hx, y_box + Jc * hy);
        const double h = std::max(hx, hy);
        const double r0 = std::max(1.0, std::round(inner.well_radius / h)) * h;
        const double room = std::min({c.x() - x_box, x_box + nfx * hx - c.x(), c.y() - y_box, y_box + nfy * hy - c.y()});
        const double r1 = std::min(3.0 * r0, room);
        if (r1 < r0 + 2.0 * h) throw MeshError("inner box too small to conform the well outline");
        for (int J = 1; J < nfy; ++J) {
            for (int I = 1; I < nfx; ++I) {
                Vec2& x = mesh.nodes[fine_id[fidx(I, J)]];
                x = detail::square_to_disc(x, c, r0, r1);
            }
        }
        well_center = c;
        well_radius = r0;
    }

    // Appends the nodes of the segment from coarse corner a to corner b (a
    // included, b excluded), inserting fine nodes when the segment lies on the
    // box boundary.
    auto append_side = [&](std::vector<int>& loop, int ia, int ja, int ib, int jb) {
        loop.push_back(coarse_id[cidx(ia, ja)]);
        const bool horizontal = ja == jb;
        if (horizontal) {
            const bool on_box = (ja == j0 || ja == j1) && std::min(ia, ib) >= i0 && std::max(ia, ib) <= i1;
            if (!on_box) return;
            const int J = (ja - j0) * my;
            const int step = ib > ia ? 1 : -1;
            for (int s = 1; s < mx; ++s) loop.push_back(fine_id[fidx((ia - i0) * mx + step * s, J)]);
        } else {
            const bool on_box = (ia == i0 || ia == i1) && std::min(ja, jb) >= j0 && std::max(ja, jb) <= j1;
            if (!on_box) return;
            const int I = (ia - i0) * mx;
            const int step = jb > ja ? 1 : -1;
            for (int s = 1; s < my; ++s) loop.push_back(fine_id[fidx(I, (ja - j0) * my + step * s)]);
        }
    };

    for (int j = 0; j < outer.ny; ++j) {
        for (int i = 0; i < outer.nx; ++i) {
            if (i >= i0 && i < i1 && j >= j0 && j < j1) continue;
            std::vector<int> loop;
            append_side(loop, i, j, i + 1, j);
            append_side(loop, i + 1, j, i + 1, j + 1);
            append_side(loop, i + 1, j + 1, i, j + 1);
            append_side(loop, i, j + 1, i, j);
            mesh.cells.push_back(std::move(loop));
            mesh.kind.push_back(CellKind::Polygon);
            mesh.region.push_back(Region::FarField);
        }
    }

    for (int J = 0; J < nfy; ++J) {
        for (int I = 0; I < nfx; ++I) {
            const int a = fine_id[fidx(I, J)];
            const int b = fine_id[fidx(I + 1, J)];
            const int c = fine_id[fidx(I + 1, J + 1)];
            const int d = fine_id[fidx(I, J + 1)];
            std::array<std::array<int, 3>, 2> tris;
            if ((I + J) % 2 == 0) {
                tris = {{{a, b, c}, {a, c, d}}};
            } else {
                tris = {{{a, b, d}, {b, c, d}}};
            }
            for (const auto& t : tris) {
                const Vec2 centroid = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3.0;
                const bool well = (centroid - well_center).norm() < well_radius;
                mesh.cells.push_back({t[0], t[1], t[2]});
                mesh.kind.push_back(CellKind::Simplex);
                mesh.region.push_back(well ? Region::Well : Region::NearField);
            }
        }
    }
    return mesh;
}

/// Axis-aligned bounding box of all nodes: (min, max).
inline std::pair<Vec2, Vec2> bounding_box(const PolyMesh& mesh) {
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (const auto& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

} // namespace vemdem::mesh
