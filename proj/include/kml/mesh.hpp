#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kml {

using Index = std::int64_t;

/// A q-simplex stored as a strictly increasing tuple of vertex indices.
using Simplex = std::vector<Index>;

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Oriented simplicial complex in R^N (N = 2 or 3 for generated meshes;
/// the incidence machinery is dimension-generic).
///
/// Conventions: every simplex is stored sorted; the simplex table of each
/// dimension is sorted lexicographically. Orientations are the ones induced
/// by the sorted tuples; incidence signs follow the alternating-face rule,
/// so the composed signed incidence of consecutive degrees vanishes over the
/// integers. Each N-cell additionally carries the sign of its geometric
/// volume relative to the sorted tuple.
class SimplicialComplex {
public:
    int dimension = 0;                       // N
    std::vector<Eigen::VectorXd> vertices;   // length-N coordinate vectors
    // simplices[q] = table of q-simplices, q = 0..N
    std::vector<std::vector<Simplex>> simplices;
    // orientation_sign[c] in {+1,-1}: sign of det of the sorted N-cell tuple
    std::vector<int> cell_orientation;
    // facet_cells[f] = indices of N-cells incident to facet f (1 or 2)
    std::vector<std::vector<Index>> facet_cells;

    Index count(int q) const { return static_cast<Index>(simplices.at(q).size()); }
    const Simplex& simplex(int q, Index i) const { return simplices.at(q).at(i); }

    /// Index of a sorted q-simplex tuple, or -1 if absent.
    Index find(int q, const Simplex& s) const;

    /// Boundary facets = (N-1)-simplices with exactly one incident cell.
    std::vector<Index> boundary_facets() const;

    Eigen::VectorXd centroid(int q, Index i) const;
    double cell_volume(Index c) const;       // unsigned
    double mesh_size() const;                // longest edge

    /// Signed volume of the sorted tuple of cell c (orientation oracle).
    double cell_signed_volume(Index c) const;

    /// Walks all structural invariants; throws MeshError on violation.
    void validate() const;

    /// Rebuilds lower-dimensional tables, lookup maps and facet adjacency
    /// from `dimension`, `vertices` and the N-cell table.
    void finalize();

private:
    // per-dimension lookup: sorted tuple -> table index
    std::vector<std::map<Simplex, Index>> lookup_;
};

/// Partition of the boundary facets into Γ_t and its complement Γ_n.
/// Γ_t is stored; everything else is derived on construction.
struct BoundaryPartition {
    std::vector<bool> facet_in_gamma_t;      // indexed by (N-1)-simplex id; false for interior facets
    std::vector<Index> gamma_t;              // boundary facets in Γ_t
    std::vector<Index> gamma_n;              // boundary facets not in Γ_t
    // interface γ: (N-2)-simplices shared by a Γ_t facet and a Γ_n facet
    std::vector<Index> interface_simplices;
    // closure_t[q] = flags over q-simplices contained in closure(Γ_t)
    std::vector<std::vector<bool>> closure_t;
    // same for closure(Γ_n) (used by the swapped-partition duality tests)
    std::vector<std::vector<bool>> closure_n;

    bool empty() const { return gamma_t.empty(); }
    bool full() const { return gamma_n.empty(); }
};

/// Cell-disjoint decomposition of the domain into subdomains Ω_j.
struct SliceSpec {
    std::vector<std::vector<Index>> pieces;  // cell indices per piece
};

struct AdmissibilityReport {
    bool partition_ok = false;           // Γ_t, Γ_n unions of facet-connected components
    int gamma_t_components = 0;
    int gamma_n_components = 0;
    bool slices_checked = false;
    bool sliceable_verified = false;     // Definition-style (i)+(ii) hold combinatorially
    int slice_count = 0;
    std::vector<int> piece_betti1;
    std::vector<bool> piece_touches_gamma_t;
    std::vector<std::string> notes;
    bool admissible() const { return partition_ok && slices_checked && sliceable_verified; }
};

SimplicialComplex build_box_mesh(int N, int cells_per_axis);
SimplicialComplex build_annulus_mesh(int cells_angular, int cells_radial);

using FacetPredicate = std::function<bool(const Eigen::VectorXd&)>;

BoundaryPartition tag_boundary(const SimplicialComplex& complex, const FacetPredicate& predicate);

/// Same, from an explicit facet flag vector (indexed by (N-1)-simplex id;
/// only boundary facets are consulted).
BoundaryPartition partition_from_facets(const SimplicialComplex& complex,
                                        const std::vector<bool>& facet_in_t);

/// Best-effort greedy slicer: grows pieces over the dual graph keeping each
/// piece's first Betti number zero. Returns nullopt when it gives up.
std::optional<SliceSpec> auto_slice(const SimplicialComplex& complex,
                                    const BoundaryPartition& partition);

AdmissibilityReport validate_admissible(const SimplicialComplex& complex,
                                        const BoundaryPartition& partition,
                                        const SliceSpec* slices = nullptr,
                                        bool try_auto_slice = true);

/// First Betti number of the subcomplex induced by a cell subset.
int piece_betti1(const SimplicialComplex& complex, const std::vector<Index>& cells);

/// Facet-connected components of a set of boundary facets
/// (facets adjacent when they share an (N-2)-face).
std::vector<std::vector<Index>> facet_components(const SimplicialComplex& complex,
                                                 const std::vector<Index>& facets);

} // namespace kml
