#pragma once

#include <map>
#include <optional>
#include <string>

#include "kml/mesh.hpp"

namespace kml {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// On-disk mesh document. Beyond the complex itself it may carry boundary
/// tags (facet tuple -> "t"/"n") and a slice decomposition.
struct MeshDocument {
    SimplicialComplex complex;
    std::optional<std::map<Simplex, char>> boundary_tags;
    std::optional<SliceSpec> slices;
    bool orientation_repaired = false;  // an input cell tuple was negatively oriented
};

MeshDocument load_mesh(const std::string& text);
MeshDocument load_mesh_file(const std::string& path);

std::string save_mesh(const SimplicialComplex& complex,
                      const BoundaryPartition* partition = nullptr,
                      const SliceSpec* slices = nullptr);

/// Builds the partition selected by the document's tags ("t" facets form Γ_t);
/// untagged boundary facets default to Γ_n.
BoundaryPartition partition_from_tags(const SimplicialComplex& complex,
                                      const std::map<Simplex, char>& tags);

} // namespace kml
