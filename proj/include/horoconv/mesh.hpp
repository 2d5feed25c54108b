#pragma once
// Triangle mesh container with OBJ / ascii-PLY export (bit-reproducible for
// fixed input) and small builders for lat-long sphere slices and surfaces
// of revolution.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "horoconv/errors.hpp"
#include "horoconv/report.hpp"

namespace horoconv {

struct MeshData {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;

    void validate() const {
        const int nv = static_cast<int>(vertices.size());
        for (const auto& f : faces)
            for (int idx : f)
                if (idx < 0 || idx >= nv)
                    throw spec_error("mesh face index out of range");
    }
};

enum class MeshFormat { OBJ, PlyAscii };

inline MeshFormat mesh_format_from_string(const std::string& s) {
    if (s == "obj" || s == "OBJ") return MeshFormat::OBJ;
    if (s == "ply" || s == "PLY" || s == "ply-ascii") return MeshFormat::PlyAscii;
    throw spec_error("unknown mesh format: " + s);
}

inline void export_mesh(const MeshData& mesh, const std::string& path, MeshFormat format) {
    mesh.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw spec_error("cannot open mesh file for writing: " + path);
    if (format == MeshFormat::OBJ) {
        for (const auto& v : mesh.vertices)
            out << "v " << fmt_double(v[0]) << " " << fmt_double(v[1]) << " " << fmt_double(v[2]) << "\n";
        for (const auto& f : mesh.faces)
            out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << mesh.vertices.size() << "\n";
        out << "property double x\nproperty double y\nproperty double z\n";
        out << "element face " << mesh.faces.size() << "\n";
        out << "property list uchar int vertex_indices\nend_header\n";
        for (const auto& v : mesh.vertices)
            out << fmt_double(v[0]) << " " << fmt_double(v[1]) << " " << fmt_double(v[2]) << "\n";
        for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
    if (!out) throw spec_error("write failure on mesh file: " + path);
}

/// Minimal reader for the two formats written above.
inline MeshData import_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open mesh file: " + path);
    MeshData mesh;
    std::string line;
    if (!std::getline(in, line)) throw spec_error("empty mesh file: " + path);
    if (line == "ply") {
        size_t nv = 0, nf = 0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tok;
            ls >> tok;
            if (tok == "element") {
                std::string kind;
                size_t count;
                ls >> kind >> count;
                if (kind == "vertex") nv = count;
                if (kind == "face") nf = count;
            } else if (tok == "end_header")
                break;
        }
        for (size_t i = 0; i < nv; ++i) {
            std::array<double, 3> v{};
            in >> v[0] >> v[1] >> v[2];
            mesh.vertices.push_back(v);
        }
        for (size_t i = 0; i < nf; ++i) {
            int c, a, b, d;
            in >> c >> a >> b >> d;
            if (c != 3) throw spec_error("import_mesh: only triangle faces supported");
            mesh.faces.push_back({a, b, d});
        }
    } else {
        do {
            std::istringstream ls(line);
            std::string tok;
            ls >> tok;
            if (tok == "v") {
                std::array<double, 3> v{};
                ls >> v[0] >> v[1] >> v[2];
                mesh.vertices.push_back(v);
            } else if (tok == "f") {
                std::array<int, 3> f{};
                ls >> f[0] >> f[1] >> f[2];
                mesh.faces.push_back({f[0] - 1, f[1] - 1, f[2] - 1});
            }
        } while (std::getline(in, line));
    }
    mesh.validate();
    return mesh;
}

/// Triangulates a rows x cols grid; invalid vertices (index < 0) drop the
/// adjacent quads. When wrap_cols is set the last column connects back to
/// the first.
inline std::vector<std::array<int, 3>> triangulate_grid(const std::vector<std::vector<int>>& index_grid,
                                                        bool wrap_cols) {
    std::vector<std::array<int, 3>> faces;
    const int rows = static_cast<int>(index_grid.size());
    if (rows == 0) return faces;
    const int cols = static_cast<int>(index_grid[0].size());
    for (int i = 0; i + 1 < rows; ++i) {
        const int jmax = wrap_cols ? cols : cols - 1;
        for (int j = 0; j < jmax; ++j) {
            const int jn = (j + 1) % cols;
            const int a = index_grid[i][j], b = index_grid[i][jn];
            const int c = index_grid[i + 1][j], d = index_grid[i + 1][jn];
            if (a < 0 || b < 0 || c < 0 || d < 0) continue;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    }
    return faces;
}

/// Surface of revolution from a meridian polyline (radius, height),
/// revolved over `segments` angular steps.
inline MeshData build_revolution(const std::vector<std::array<double, 2>>& meridian, int segments) {
    if (segments < 3) throw spec_error("build_revolution: need at least 3 angular segments");
    MeshData mesh;
    std::vector<std::vector<int>> grid(meridian.size(), std::vector<int>(segments, -1));
    for (size_t i = 0; i < meridian.size(); ++i)
        for (int j = 0; j < segments; ++j) {
            const double th = 2.0 * M_PI * j / segments;
            grid[i][j] = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back({meridian[i][0] * std::cos(th), meridian[i][0] * std::sin(th),
                                     meridian[i][1]});
        }
    mesh.faces = triangulate_grid(grid, true);
    return mesh;
}

} // namespace horoconv
