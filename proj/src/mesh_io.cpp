#include "kml/mesh_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kml {

using nlohmann::json;

namespace {

Simplex parse_tuple_key(const std::string& key) {
    Simplex s;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ','))
        s.push_back(static_cast<Index>(std::stoll(tok)));
    std::sort(s.begin(), s.end());
    return s;
}

std::string tuple_key(const Simplex& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out;
}

double as_given_signed_volume(const std::vector<Eigen::VectorXd>& verts, const Simplex& cell,
                              int N) {
    Eigen::MatrixXd A(N, N);
    for (int j = 0; j < N; ++j) A.col(j) = verts[cell[j + 1]] - verts[cell[0]];
    return A.determinant();
}

} // namespace

MeshDocument load_mesh(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("mesh file: ") + e.what());
    }

    MeshDocument out;
    try {
        if (!doc.contains("dimension")) throw ParseError("mesh file: missing field 'dimension'");
        out.complex.dimension = doc.at("dimension").get<int>();
        const int N = out.complex.dimension;
        if (N < 2 || N > 3)
            throw ParseError("mesh file: field 'dimension' must be 2 or 3");

        if (!doc.contains("vertices")) throw ParseError("mesh file: missing field 'vertices'");
        std::size_t vi = 0;
        for (const auto& v : doc.at("vertices")) {
            if (static_cast<int>(v.size()) != N)
                throw ParseError("mesh file: vertices[" + std::to_string(vi) +
                                 "] has wrong arity");
            Eigen::VectorXd p(N);
            for (int d = 0; d < N; ++d) p[d] = v.at(d).get<double>();
            out.complex.vertices.push_back(p);
            ++vi;
        }

        if (!doc.contains("cells")) throw ParseError("mesh file: missing field 'cells'");
        out.complex.simplices.assign(N + 1, {});
        std::size_t ci = 0;
        for (const auto& c : doc.at("cells")) {
            if (static_cast<int>(c.size()) != N + 1)
                throw ParseError("mesh file: cells[" + std::to_string(ci) + "] has wrong arity");
            Simplex cell;
            for (const auto& v : c) {
                const Index id = v.get<Index>();
                if (id < 0 || id >= static_cast<Index>(out.complex.vertices.size()))
                    throw ParseError("mesh file: cells[" + std::to_string(ci) +
                                     "] references missing vertex " + std::to_string(id));
                cell.push_back(id);
            }
            if (as_given_signed_volume(out.complex.vertices, cell, N) < 0)
                out.orientation_repaired = true;
            out.complex.simplices[N].push_back(cell);
            ++ci;
        }
        out.complex.finalize();

        if (doc.contains("boundary_tags")) {
            std::map<Simplex, char> tags;
            for (const auto& [key, val] : doc.at("boundary_tags").items()) {
                const std::string v = val.get<std::string>();
                if (v != "t" && v != "n")
                    throw ParseError("mesh file: boundary_tags['" + key + "'] must be 't' or 'n'");
                tags[parse_tuple_key(key)] = v[0];
            }
            out.boundary_tags = std::move(tags);
        }
        if (doc.contains("slices")) {
            SliceSpec spec;
            for (const auto& piece : doc.at("slices")) {
                std::vector<Index> cells;
                for (const auto& c : piece) cells.push_back(c.get<Index>());
                spec.pieces.push_back(std::move(cells));
            }
            out.slices = std::move(spec);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("mesh file: ") + e.what());
    }
    return out;
}

MeshDocument load_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_mesh(ss.str());
}

std::string save_mesh(const SimplicialComplex& complex, const BoundaryPartition* partition,
                      const SliceSpec* slices) {
    json doc;
    doc["dimension"] = complex.dimension;
    json verts = json::array();
    for (const auto& v : complex.vertices) {
        json p = json::array();
        for (int d = 0; d < complex.dimension; ++d) p.push_back(v[d]);
        verts.push_back(p);
    }
    doc["vertices"] = verts;
    json cells = json::array();
    for (const auto& c : complex.simplices[complex.dimension]) cells.push_back(c);
    doc["cells"] = cells;
    if (partition) {
        json tags = json::object();
        for (Index f : partition->gamma_t)
            tags[tuple_key(complex.simplex(complex.dimension - 1, f))] = "t";
        for (Index f : partition->gamma_n)
            tags[tuple_key(complex.simplex(complex.dimension - 1, f))] = "n";
        doc["boundary_tags"] = tags;
    }
    if (slices) doc["slices"] = slices->pieces;
    return doc.dump(2) + "\n";
}

BoundaryPartition partition_from_tags(const SimplicialComplex& complex,
                                      const std::map<Simplex, char>& tags) {
    const int N = complex.dimension;
    std::vector<bool> in_t(complex.count(N - 1), false);
    for (const auto& [tuple, tag] : tags) {
        const Index f = complex.find(N - 1, tuple);
        if (f < 0) throw ParseError("boundary tag references unknown facet");
        if (complex.facet_cells[f].size() != 1)
            throw ParseError("boundary tag on interior facet");
        if (tag == 't') in_t[f] = true;
    }
    return partition_from_facets(complex, in_t);
}

} // namespace kml
