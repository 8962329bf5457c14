#pragma once

#include <array>
#include <vector>

#include "qgraph/dissect.hpp"

namespace qgraph {

struct MeshElement {
    std::array<int, 4> nodes{-1, -1, -1, -1};  // first 3 used in 2D
    int cell = 0;
};

/// Simplicial mesh of a dissected domain. Nodes are stored per cell: points on
/// diagonals or coincidence planes carry one copy per adjacent cell, so the
/// raw nodal space imposes no continuity there; the assembler merges or
/// eliminates copies according to the active constraints. Grids of cells
/// sharing an edge subdivision match along vertex faces node-by-node.
struct Mesh {
    int dim = 2;  // spatial dimension = particle count
    double h = 0.0;
    std::vector<double> edge_length;  // per graph edge
    std::vector<int> edge_subdiv;     // per graph edge: n_e = ceil(l_e / h)
    std::vector<std::array<double, 3>> coords;
    std::vector<int> node_cell;
    std::vector<MeshElement> elements;

    /// Node lists per boundary-layout component: 2D chains are ordered by the
    /// trace parameter; 3D sets are ordered lexicographically by grid indices,
    /// so the two sides of a plane pair up position-by-position.
    std::vector<std::vector<int>> component_nodes;

    /// Node permutations realizing the particle-exchange group, indexed by the
    /// lexicographic rank of the coordinate permutation (index 0 = identity,
    /// N! entries).
    std::vector<std::vector<int>> symmetry_nodes;

    int num_nodes() const { return static_cast<int>(coords.size()); }
};

Mesh build_mesh(const DissectedDomain& dd, double h, long node_cap = 5000000);

/// n = ceil(length / h), with a relative guard so near-integer ratios do not
/// round up; shared by every discretization so meshes at equal h agree.
int subdivisions_for(double length, double h);

}  // namespace qgraph
