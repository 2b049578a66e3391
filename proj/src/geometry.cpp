#include "degensim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace degensim {

Grid build_grid(int dimension, const std::vector<Extent>& extents) {
    if (dimension != 1 && dimension != 2)
        throw ConfigError("grid dimension must be 1 or 2");
    if (extents.size() != static_cast<std::size_t>(dimension))
        throw ConfigError("one extent required per axis");
    Grid g;
    g.dimension = dimension;
    for (int d = 0; d < dimension; ++d) {
        if (!(extents[d].length > 0.0))
            throw ConfigError("grid length must be positive");
        if (extents[d].cells < 2)
            throw ConfigError("grid needs at least 2 cells per axis");
        g.length[d] = extents[d].length;
        g.cells[d] = extents[d].cells;
        g.h[d] = extents[d].length / extents[d].cells;
    }
    if (dimension == 1) {
        g.length[1] = 1.0;
        g.cells[1] = 1;
        g.h[1] = 1.0;
    }
    return g;
}

const char* face_name(Face f) {
    switch (f) {
        case Face::Left: return "left";
        case Face::Right: return "right";
        case Face::Bottom: return "bottom";
        case Face::Top: return "top";
    }
    return "?";
}

BoundaryMap tag_boundary(const Grid& grid, const std::vector<Face>& dirichlet,
                         const std::vector<Face>& neumann) {
    BoundaryMap bm;
    bm.dimension = grid.dimension;
    auto check_face = [&](Face f) {
        if (grid.dimension == 1 && (f == Face::Bottom || f == Face::Top))
            throw ConfigError(std::string("face '") + face_name(f) +
                              "' does not exist in 1D");
    };
    for (Face f : dirichlet) {
        check_face(f);
        for (Face g : neumann)
            if (f == g)
                throw ConfigError(std::string("face '") + face_name(f) +
                                  "' tagged both dirichlet and neumann");
        bm.tags[static_cast<int>(f)] = BcTag::Dirichlet;
    }
    for (Face f : neumann) check_face(f);

    double measure = 0.0;
    if (grid.dimension == 1) {
        if (bm.is_dirichlet(Face::Left)) measure += 1.0;
        if (bm.is_dirichlet(Face::Right)) measure += 1.0;
    } else {
        if (bm.is_dirichlet(Face::Left)) measure += grid.length[1];
        if (bm.is_dirichlet(Face::Right)) measure += grid.length[1];
        if (bm.is_dirichlet(Face::Bottom)) measure += grid.length[0];
        if (bm.is_dirichlet(Face::Top)) measure += grid.length[0];
    }
    bm.dirichlet_measure = measure;
    bm.verification_only = (measure == 0.0);
    return bm;
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v); });
}

double discrete_norm(const Grid& grid, const std::vector<double>& values,
                     NormKind kind) {
    const double vol = grid.cell_volume();
    switch (kind) {
        case NormKind::L1: {
            double s = 0.0;
            for (double v : values) s += std::abs(v);
            return s * vol;
        }
        case NormKind::L2: {
            double s = 0.0;
            for (double v : values) s += v * v;
            return std::sqrt(s * vol);
        }
        case NormKind::Linf: {
            double s = 0.0;
            for (double v : values) s = std::max(s, std::abs(v));
            return s;
        }
    }
    return 0.0;
}

double discrete_norm(const Field& f, NormKind kind) {
    return discrete_norm(*f.grid, f.values, kind);
}

double positive_part_l1(const Field& f, const Field& g) {
    if (f.size() != g.size()) throw DimensionError("field sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::max(0.0, f[i] - g[i]);
    return s * f.grid->cell_volume();
}

void write_snapshot_csv(const Field& f, std::ostream& os) {
    const Grid& g = *f.grid;
    char buf[96];
    if (g.dimension == 1) {
        os << "x,value\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", g.x_of(i), f[i]);
            os << buf;
        }
    } else {
        os << "x,y,value\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", g.x_of(i),
                          g.y_of(i), f[i]);
            os << buf;
        }
    }
}

void write_snapshot_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open snapshot file: " + path);
    write_snapshot_csv(f, os);
}

} // namespace degensim
