#ifndef DEGENSIM_GEOMETRY_HPP
#define DEGENSIM_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "degensim/errors.hpp"

namespace degensim {

/// Structured cell-centered grid on an interval (1D) or rectangle (2D).
/// Node i sits at the center of cell i; indexing is row-major with x fastest.
struct Grid {
    int dimension = 1;
    std::array<double, 2> length = {1.0, 1.0};
    std::array<int, 2> cells = {1, 1};
    std::array<double, 2> h = {1.0, 1.0};

    std::size_t node_count() const {
        return static_cast<std::size_t>(cells[0]) *
               (dimension == 2 ? static_cast<std::size_t>(cells[1]) : 1u);
    }
    double cell_volume() const { return dimension == 2 ? h[0] * h[1] : h[0]; }
    double domain_volume() const {
        return dimension == 2 ? length[0] * length[1] : length[0];
    }
    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * cells[0] + ix;
    }
    double x_of(std::size_t i) const {
        return (static_cast<int>(i % cells[0]) + 0.5) * h[0];
    }
    double y_of(std::size_t i) const {
        return (static_cast<int>(i / cells[0]) + 0.5) * h[1];
    }
};

/// Per-axis extent, length > 0 and at least two cells.
struct Extent {
    double length;
    int cells;
};

Grid build_grid(int dimension, const std::vector<Extent>& extents);

enum class Face { Left = 0, Right = 1, Bottom = 2, Top = 3 };

enum class BcTag { Neumann, Dirichlet };

const char* face_name(Face f);

/// Dirichlet/Neumann tagging of the whole-face boundary decomposition.
/// A map with no Dirichlet face is allowed only for verification runs
/// (mass-balance tests); problem setup rejects it otherwise.
struct BoundaryMap {
    int dimension = 1;
    std::array<BcTag, 4> tags = {BcTag::Neumann, BcTag::Neumann, BcTag::Neumann,
                                 BcTag::Neumann};
    bool verification_only = false;  // pure-Neumann configuration
    double dirichlet_measure = 0.0;

    bool is_dirichlet(Face f) const { return tags[static_cast<int>(f)] == BcTag::Dirichlet; }
    bool pure_neumann() const { return dirichlet_measure == 0.0; }
    int face_count() const { return dimension == 2 ? 4 : 2; }
};

/// Tags the named faces Dirichlet and the remainder Neumann. Faces named in
/// both lists raise ConfigError.
BoundaryMap tag_boundary(const Grid& grid, const std::vector<Face>& dirichlet,
                         const std::vector<Face>& neumann = {});

enum class FieldRole { U, V, W, Auxiliary };

/// Nodal values over a grid.
struct Field {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    FieldRole role = FieldRole::Auxiliary;

    Field() = default;
    Field(std::shared_ptr<const Grid> g, double fill = 0.0,
          FieldRole r = FieldRole::Auxiliary)
        : grid(std::move(g)), values(grid->node_count(), fill), role(r) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    bool all_finite() const;
};

enum class NormKind { L1, L2, Linf };

double discrete_norm(const Field& f, NormKind kind);
double discrete_norm(const Grid& grid, const std::vector<double>& values,
                     NormKind kind);

/// max(0, f - g) in L1; the positive-part norm of the comparison principle.
double positive_part_l1(const Field& f, const Field& g);

/// Writes `x[,y],value`, one node per row, row-major, 17 significant digits.
void write_snapshot_csv(const Field& f, std::ostream& os);
void write_snapshot_csv(const Field& f, const std::string& path);

} // namespace degensim

#endif
