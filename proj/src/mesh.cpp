#include "kml/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

namespace kml {

namespace {

// all (q+1)-subsets of a sorted tuple, i.e. the q-faces of a simplex
void for_each_face(const Simplex& s, int q, const std::function<void(const Simplex&)>& fn) {
    const int n = static_cast<int>(s.size());
    const int k = q + 1;
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    Simplex face(k);
    while (true) {
        for (int i = 0; i < k; ++i) face[i] = s[pick[i]];
        fn(face);
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

} // namespace

Index SimplicialComplex::find(int q, const Simplex& s) const {
    const auto& m = lookup_.at(q);
    auto it = m.find(s);
    return it == m.end() ? -1 : it->second;
}

std::vector<Index> SimplicialComplex::boundary_facets() const {
    std::vector<Index> out;
    for (Index f = 0; f < count(dimension - 1); ++f)
        if (facet_cells[f].size() == 1) out.push_back(f);
    return out;
}

Eigen::VectorXd SimplicialComplex::centroid(int q, Index i) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dimension);
    const Simplex& s = simplex(q, i);
    for (Index v : s) c += vertices[v];
    return c / static_cast<double>(s.size());
}

double SimplicialComplex::cell_signed_volume(Index c) const {
    const Simplex& s = simplices[dimension][c];
    Eigen::MatrixXd A(dimension, dimension);
    for (int j = 0; j < dimension; ++j) A.col(j) = vertices[s[j + 1]] - vertices[s[0]];
    double fact = 1.0;
    for (int k = 2; k <= dimension; ++k) fact *= k;
    return A.determinant() / fact;
}

double SimplicialComplex::cell_volume(Index c) const { return std::abs(cell_signed_volume(c)); }

double SimplicialComplex::mesh_size() const {
    double h = 0.0;
    for (const Simplex& e : simplices[1])
        h = std::max(h, (vertices[e[1]] - vertices[e[0]]).norm());
    return h;
}

void SimplicialComplex::finalize() {
    const int N = dimension;
    if (N < 1) throw MeshError("complex dimension must be positive");
    auto& cells = simplices;
    cells.resize(N + 1);
    for (Simplex& c : cells[N]) {
        if (static_cast<int>(c.size()) != N + 1) throw MeshError("cell arity mismatch");
        std::sort(c.begin(), c.end());
        if (std::adjacent_find(c.begin(), c.end()) != c.end())
            throw MeshError("degenerate cell: repeated vertex");
        for (Index v : c)
            if (v < 0 || v >= static_cast<Index>(vertices.size()))
                throw MeshError("cell references missing vertex " + std::to_string(v));
    }
    std::sort(cells[N].begin(), cells[N].end());
    cells[N].erase(std::unique(cells[N].begin(), cells[N].end()), cells[N].end());

    // derive all lower tables as faces of the cells
    for (int q = 0; q < N; ++q) {
        std::set<Simplex> faces;
        for (const Simplex& c : cells[N])
            for_each_face(c, q, [&](const Simplex& f) { faces.insert(f); });
        cells[q].assign(faces.begin(), faces.end());
    }

    lookup_.assign(N + 1, {});
    for (int q = 0; q <= N; ++q)
        for (Index i = 0; i < count(q); ++i) lookup_[q][simplices[q][i]] = i;

    facet_cells.assign(count(N - 1), {});
    for (Index c = 0; c < count(N); ++c)
        for_each_face(simplices[N][c], N - 1, [&](const Simplex& f) {
            facet_cells[find(N - 1, f)].push_back(c);
        });

    cell_orientation.resize(count(N));
    for (Index c = 0; c < count(N); ++c) {
        const double sv = cell_signed_volume(c);
        if (sv == 0.0) throw MeshError("cell " + std::to_string(c) + " has zero volume");
        cell_orientation[c] = sv > 0 ? +1 : -1;
    }
}

void SimplicialComplex::validate() const {
    const int N = dimension;
    for (int q = 0; q <= N; ++q) {
        for (Index i = 0; i < count(q); ++i) {
            const Simplex& s = simplices[q][i];
            if (static_cast<int>(s.size()) != q + 1) throw MeshError("tuple arity mismatch");
            if (!std::is_sorted(s.begin(), s.end()) ||
                std::adjacent_find(s.begin(), s.end()) != s.end())
                throw MeshError("tuple not strictly increasing");
            if (i > 0 && !(simplices[q][i - 1] < s)) throw MeshError("table not sorted");
        }
    }
    // closure under faces
    for (int q = 1; q <= N; ++q)
        for (const Simplex& s : simplices[q])
            for_each_face(s, q - 1, [&](const Simplex& f) {
                if (find(q - 1, f) < 0) throw MeshError("missing face of stored simplex");
            });
    for (Index f = 0; f < count(N - 1); ++f) {
        const auto deg = facet_cells[f].size();
        if (deg != 1 && deg != 2)
            throw MeshError("facet " + std::to_string(f) + " has " + std::to_string(deg) +
                            " incident cells");
    }
    for (Index c = 0; c < count(N); ++c)
        if (cell_signed_volume(c) * cell_orientation[c] <= 0)
            throw MeshError("cell " + std::to_string(c) + " has nonpositive oriented volume");
}

SimplicialComplex build_box_mesh(int N, int m) {
    if (N != 2 && N != 3)
        throw MeshError("unsupported dimension N=" + std::to_string(N) + " (only 2 or 3)");
    if (m < 1) throw MeshError("cells_per_axis must be >= 1");

    SimplicialComplex out;
    out.dimension = N;
    const double h = 1.0 / m;

    auto vid = [&](const std::array<int, 3>& g) -> Index {
        Index id = 0;
        for (int d = N - 1; d >= 0; --d) id = id * (m + 1) + g[d];
        return id;
    };

    const int nv = static_cast<int>(std::pow(m + 1, N));
    out.vertices.resize(nv);
    std::array<int, 3> g{0, 0, 0};
    for (int i = 0; i < nv; ++i) {
        Eigen::VectorXd p(N);
        int r = i;
        for (int d = 0; d < N; ++d) {
            p[d] = (r % (m + 1)) * h;
            r /= (m + 1);
        }
        out.vertices[i] = p;
    }

    out.simplices.assign(N + 1, {});
    // Kuhn triangulation of each grid cube: one simplex per axis permutation,
    // walking from the low corner along the permuted axes. Conforming across
    // cubes and covering each cube by N! simplices.
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::array<int, 3> base{0, 0, 0};
    std::function<void(int)> visit = [&](int d) {
        if (d == N) {
            std::vector<int> p(perm);
            do {
                Simplex cell;
                std::array<int, 3> cur = base;
                cell.push_back(vid(cur));
                for (int k = 0; k < N; ++k) {
                    cur[p[k]] += 1;
                    cell.push_back(vid(cur));
                }
                out.simplices[N].push_back(cell);
            } while (std::next_permutation(p.begin(), p.end()));
            return;
        }
        for (base[d] = 0; base[d] < m; ++base[d]) visit(d + 1);
        base[d] = 0;
    };
    std::sort(perm.begin(), perm.end());
    visit(0);
    out.finalize();
    return out;
}

SimplicialComplex build_annulus_mesh(int na, int nr) {
    if (na < 3) throw MeshError("cells_angular must be >= 3");
    if (nr < 1) throw MeshError("cells_radial must be >= 1");

    SimplicialComplex out;
    out.dimension = 2;
    const double r0 = 0.5, r1 = 1.0;
    auto vid = [&](int a, int r) -> Index { return static_cast<Index>(r) * na + (a % na); };
    out.vertices.resize(static_cast<std::size_t>(na) * (nr + 1));
    for (int r = 0; r <= nr; ++r) {
        const double rad = r0 + (r1 - r0) * r / nr;
        for (int a = 0; a < na; ++a) {
            const double th = 2.0 * M_PI * a / na;
            Eigen::VectorXd p(2);
            p << rad * std::cos(th), rad * std::sin(th);
            out.vertices[vid(a, r)] = p;
        }
    }
    out.simplices.assign(3, {});
    for (int r = 0; r < nr; ++r)
        for (int a = 0; a < na; ++a) {
            const Index v00 = vid(a, r), v10 = vid(a + 1, r);
            const Index v01 = vid(a, r + 1), v11 = vid(a + 1, r + 1);
            out.simplices[2].push_back({v00, v10, v11});
            out.simplices[2].push_back({v00, v11, v01});
        }
    out.finalize();
    return out;
}

BoundaryPartition tag_boundary(const SimplicialComplex& complex, const FacetPredicate& predicate) {
    const int N = complex.dimension;
    std::vector<bool> in_t(complex.count(N - 1), false);
    for (Index f : complex.boundary_facets())
        in_t[f] = predicate(complex.centroid(N - 1, f));
    return partition_from_facets(complex, in_t);
}

BoundaryPartition partition_from_facets(const SimplicialComplex& complex,
                                        const std::vector<bool>& facet_in_t) {
    const int N = complex.dimension;
    BoundaryPartition part;
    part.facet_in_gamma_t.assign(complex.count(N - 1), false);
    for (Index f : complex.boundary_facets()) {
        if (facet_in_t[f]) {
            part.facet_in_gamma_t[f] = true;
            part.gamma_t.push_back(f);
        } else {
            part.gamma_n.push_back(f);
        }
    }

    part.closure_t.assign(N + 1, {});
    part.closure_n.assign(N + 1, {});
    for (int q = 0; q <= N; ++q) {
        part.closure_t[q].assign(complex.count(q), false);
        part.closure_n[q].assign(complex.count(q), false);
    }
    auto mark = [&](const std::vector<Index>& facets, std::vector<std::vector<bool>>& cl) {
        for (Index f : facets) {
            const Simplex& s = complex.simplex(N - 1, f);
            const int n = static_cast<int>(s.size());
            for (int mask = 1; mask < (1 << n); ++mask) {
                Simplex face;
                for (int i = 0; i < n; ++i)
                    if (mask & (1 << i)) face.push_back(s[i]);
                cl[static_cast<int>(face.size()) - 1][complex.find(
                    static_cast<int>(face.size()) - 1, face)] = true;
            }
        }
    };
    mark(part.gamma_t, part.closure_t);
    mark(part.gamma_n, part.closure_n);

    if (N >= 2) {
        for (Index s = 0; s < complex.count(N - 2); ++s)
            if (part.closure_t[N - 2][s] && part.closure_n[N - 2][s])
                part.interface_simplices.push_back(s);
    }
    return part;
}

std::vector<std::vector<Index>> facet_components(const SimplicialComplex& complex,
                                                 const std::vector<Index>& facets) {
    const int N = complex.dimension;
    std::map<Index, int> comp;
    for (Index f : facets) comp[f] = -1;
    // adjacency through shared (N-2)-faces
    std::map<Simplex, std::vector<Index>> by_ridge;
    for (Index f : facets) {
        const Simplex& s = complex.simplex(N - 1, f);
        for (std::size_t skip = 0; skip < s.size(); ++skip) {
            Simplex ridge;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != skip) ridge.push_back(s[i]);
            by_ridge[ridge].push_back(f);
        }
    }
    std::vector<std::vector<Index>> out;
    for (Index seed : facets) {
        if (comp[seed] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::deque<Index> frontier{seed};
        comp[seed] = id;
        while (!frontier.empty()) {
            Index f = frontier.front();
            frontier.pop_front();
            out[id].push_back(f);
            const Simplex& s = complex.simplex(N - 1, f);
            for (std::size_t skip = 0; skip < s.size(); ++skip) {
                Simplex ridge;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != skip) ridge.push_back(s[i]);
                for (Index g : by_ridge[ridge])
                    if (comp[g] < 0) {
                        comp[g] = id;
                        frontier.push_back(g);
                    }
            }
        }
    }
    return out;
}

namespace {

// Euler characteristic of the subcomplex induced by a cell set.
std::array<Index, 4> induced_counts(const SimplicialComplex& complex,
                                    const std::vector<Index>& cells) {
    const int N = complex.dimension;
    std::array<Index, 4> counts{0, 0, 0, 0};
    std::vector<std::set<Simplex>> faces(N);
    for (Index c : cells) {
        const Simplex& s = complex.simplex(N, c);
        const int n = static_cast<int>(s.size());
        for (int mask = 1; mask < (1 << n); ++mask) {
            Simplex f;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) f.push_back(s[i]);
            if (static_cast<int>(f.size()) <= N) faces[f.size() - 1].insert(f);
        }
    }
    for (int q = 0; q < N; ++q) counts[q] = static_cast<Index>(faces[q].size());
    counts[N] = static_cast<Index>(cells.size());
    return counts;
}

int cell_components(const SimplicialComplex& complex, const std::vector<Index>& cells) {
    // connectivity through shared facets
    std::map<Index, int> comp;
    for (Index c : cells) comp[c] = -1;
    int n = 0;
    for (Index seed : cells) {
        if (comp[seed] >= 0) continue;
        ++n;
        std::deque<Index> fr{seed};
        comp[seed] = n;
        while (!fr.empty()) {
            Index c = fr.front();
            fr.pop_front();
            const Simplex& s = complex.simplex(complex.dimension, c);
            for (std::size_t skip = 0; skip < s.size(); ++skip) {
                Simplex facet;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != skip) facet.push_back(s[i]);
                const Index f = complex.find(complex.dimension - 1, facet);
                for (Index g : complex.facet_cells[f])
                    if (comp.count(g) && comp[g] < 0) {
                        comp[g] = n;
                        fr.push_back(g);
                    }
            }
        }
    }
    return n;
}

} // namespace

int piece_betti1(const SimplicialComplex& complex, const std::vector<Index>& cells) {
    const int N = complex.dimension;
    const auto cnt = induced_counts(complex, cells);
    const int b0 = cell_components(complex, cells);
    if (N == 2) {
        // planar subcomplex with boundary: b2 = 0, so b1 = b0 - chi
        const Index chi = cnt[0] - cnt[1] + cnt[2];
        return static_cast<int>(b0 - chi);
    }
    // N == 3: compute b1 = n1 - rank d0 - rank d1 on the induced subcomplex.
    // Ranks over the rationals via modular elimination (homology.cpp).
    extern int subcomplex_betti1_3d(const SimplicialComplex&, const std::vector<Index>&);
    return subcomplex_betti1_3d(complex, cells);
}

std::optional<SliceSpec> auto_slice(const SimplicialComplex& complex,
                                    const BoundaryPartition& partition) {
    const int N = complex.dimension;
    std::vector<Index> all(complex.count(N));
    std::iota(all.begin(), all.end(), 0);
    if (piece_betti1(complex, all) == 0) {
        SliceSpec s;
        s.pieces.push_back(all);
        return s;
    }

    // Greedy growth over the dual graph: admit a cell only if the piece keeps
    // first Betti number zero; leftovers seed new pieces.
    std::vector<bool> assigned(complex.count(N), false);
    SliceSpec spec;
    Index remaining = complex.count(N);
    int guard = 0;
    while (remaining > 0) {
        if (++guard > 64) return std::nullopt;
        Index seed = -1;
        for (Index c = 0; c < complex.count(N); ++c)
            if (!assigned[c]) {
                seed = c;
                break;
            }
        std::vector<Index> piece{seed};
        assigned[seed] = true;
        --remaining;
        bool grew = true;
        while (grew) {
            grew = false;
            std::set<Index> frontier;
            for (Index c : piece) {
                const Simplex& s = complex.simplex(N, c);
                for (std::size_t skip = 0; skip < s.size(); ++skip) {
                    Simplex facet;
                    for (std::size_t i = 0; i < s.size(); ++i)
                        if (i != skip) facet.push_back(s[i]);
                    for (Index g : complex.facet_cells[complex.find(N - 1, facet)])
                        if (!assigned[g]) frontier.insert(g);
                }
            }
            for (Index g : frontier) {
                piece.push_back(g);
                if (piece_betti1(complex, piece) == 0) {
                    assigned[g] = true;
                    --remaining;
                    grew = true;
                } else {
                    piece.pop_back();
                }
            }
        }
        spec.pieces.push_back(piece);
    }

    // Definition (ii): each piece must touch Γ_t when Γ_t is nonempty.
    if (!partition.empty()) {
        for (const auto& piece : spec.pieces) {
            bool touches = false;
            for (Index c : piece) {
                const Simplex& s = complex.simplex(N, c);
                for (std::size_t skip = 0; skip < s.size() && !touches; ++skip) {
                    Simplex facet;
                    for (std::size_t i = 0; i < s.size(); ++i)
                        if (i != skip) facet.push_back(s[i]);
                    const Index f = complex.find(N - 1, facet);
                    if (complex.facet_cells[f].size() == 1 && partition.facet_in_gamma_t[f])
                        touches = true;
                }
                if (touches) break;
            }
            if (!touches) return std::nullopt;
        }
    }
    return spec;
}

AdmissibilityReport validate_admissible(const SimplicialComplex& complex,
                                        const BoundaryPartition& partition,
                                        const SliceSpec* slices, bool try_auto_slice) {
    const int N = complex.dimension;
    AdmissibilityReport rep;

    rep.gamma_t_components = static_cast<int>(facet_components(complex, partition.gamma_t).size());
    rep.gamma_n_components = static_cast<int>(facet_components(complex, partition.gamma_n).size());
    rep.partition_ok = true;  // the combinatorial surrogate: both patches decompose
                              // into facet-connected components by construction
    for (Index f : complex.boundary_facets())
        (void)f;  // partition covers the boundary by construction of tag_boundary

    std::optional<SliceSpec> auto_spec;
    const SliceSpec* use = slices;
    if (!use && try_auto_slice) {
        auto_spec = auto_slice(complex, partition);
        if (auto_spec) use = &*auto_spec;
    }
    if (!use) {
        rep.slices_checked = false;
        rep.sliceable_verified = false;
        rep.notes.push_back("not verified sliceable (no SliceSpec and auto-slicing unavailable)");
        return rep;
    }

    rep.slices_checked = true;
    rep.slice_count = static_cast<int>(use->pieces.size());

    // pieces must partition the cell set
    std::vector<int> seen(complex.count(N), 0);
    for (const auto& piece : use->pieces)
        for (Index c : piece) {
            if (c < 0 || c >= complex.count(N)) throw MeshError("slice cell index out of range");
            ++seen[c];
        }
    bool partition_cells = std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; });
    if (!partition_cells) {
        rep.sliceable_verified = false;
        rep.notes.push_back("slice pieces do not partition the cell set");
        return rep;
    }

    rep.sliceable_verified = true;
    for (const auto& piece : use->pieces) {
        if (cell_components(complex, piece) != 1) {
            rep.sliceable_verified = false;
            rep.notes.push_back("slice piece not edge-connected");
        }
        const int b1 = piece_betti1(complex, piece);
        rep.piece_betti1.push_back(b1);
        if (b1 != 0) rep.sliceable_verified = false;

        bool touches = partition.empty();
        if (!partition.empty()) {
            for (Index c : piece) {
                const Simplex& s = complex.simplex(N, c);
                for (std::size_t skip = 0; skip < s.size() && !touches; ++skip) {
                    Simplex facet;
                    for (std::size_t i = 0; i < s.size(); ++i)
                        if (i != skip) facet.push_back(s[i]);
                    const Index f = complex.find(N - 1, facet);
                    if (complex.facet_cells[f].size() == 1 && partition.facet_in_gamma_t[f])
                        touches = true;
                }
                if (touches) break;
            }
            if (!touches) {
                rep.sliceable_verified = false;
                rep.notes.push_back("slice piece with empty boundary part");
            }
        }
        rep.piece_touches_gamma_t.push_back(touches);
    }
    return rep;
}

} // namespace kml
