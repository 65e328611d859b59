#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vemdem/error.hpp"
#include "vemdem/mesh.hpp"

// Mesh JSON document:
//
//   {
//     "nodes":   [[x, y], ...],            metres, 17 significant digits
//     "cells":   [[n0, n1, n2, ...], ...], counter-clockwise node loops
//     "kinds":   ["simplex" | "polygon", ...],
//     "regions": ["near-field" | "far-field" | "well", ...]
//   }

namespace vemdem::mesh {

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string mesh_to_json(const PolyMesh& mesh) {
    std::ostringstream os;
    os << "{\n  \"nodes\": [";
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        os << (i ? ",\n    " : "\n    ") << '[' << detail::format_real(mesh.nodes[i].x()) << ", "
           << detail::format_real(mesh.nodes[i].y()) << ']';
    }
    os << "\n  ],\n  \"cells\": [";
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        os << (c ? ",\n    " : "\n    ") << '[';
        for (std::size_t k = 0; k < mesh.cells[c].size(); ++k) os << (k ? ", " : "") << mesh.cells[c][k];
        os << ']';
    }
    os << "\n  ],\n  \"kinds\": [";
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) os << (c ? ", " : "") << '"' << to_string(mesh.kind[c]) << '"';
    os << "],\n  \"regions\": [";
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) os << (c ? ", " : "") << '"' << to_string(mesh.region[c]) << '"';
    os << "]\n}\n";
    return os.str();
}

inline PolyMesh mesh_from_json(const nlohmann::json& doc) {
    PolyMesh mesh;
    try {
        for (const auto& p : doc.at("nodes")) mesh.nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        for (const auto& loop : doc.at("cells")) mesh.cells.push_back(loop.get<std::vector<int>>());
        if (doc.contains("kinds")) {
            for (const auto& k : doc.at("kinds")) mesh.kind.push_back(cell_kind_from_string(k.get<std::string>()));
        } else {
            for (const auto& loop : mesh.cells) mesh.kind.push_back(loop.size() == 3 ? CellKind::Simplex : CellKind::Polygon);
        }
        if (doc.contains("regions")) {
            for (const auto& r : doc.at("regions")) mesh.region.push_back(region_from_string(r.get<std::string>()));
        } else {
            mesh.region.assign(mesh.num_cells(), Region::FarField);
        }
    } catch (const nlohmann::json::exception& e) {
        throw MeshError(std::string("malformed mesh document: ") + e.what());
    }
    if (mesh.kind.size() != mesh.num_cells() || mesh.region.size() != mesh.num_cells()) {
        throw MeshError("mesh document: kinds/regions length does not match cells");
    }
    return mesh;
}

inline void write_mesh_json(const PolyMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << mesh_to_json(mesh);
    if (!out) throw IoError(path, "write failed");
}

inline PolyMesh read_mesh_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path, e.what());
    }
    return mesh_from_json(doc);
}

} // namespace vemdem::mesh
