#include "bslab/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "bslab/errors.hpp"

namespace bslab {

Grid Grid::build(int dim, std::span<const double> extent, std::span<const int> res) {
    if (dim < 1 || dim > kMaxDim)
        throw ConfigError("grid dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (static_cast<int>(extent.size()) != dim || static_cast<int>(res.size()) != dim)
        throw ConfigError("grid extent/res size does not match dim");

    Grid g;
    g.dim_ = dim;
    g.cell_volume_ = 1.0;
    g.interior_count_ = 1;
    for (int a = 0; a < dim; ++a) {
        if (!(extent[a] > 0.0))
            throw ConfigError("grid extent must be positive on every axis");
        if (res[a] < 3)
            throw ConfigError("grid res must be >= 3 on every axis (one-sided traces need a third node)");
        g.extent_[a] = extent[a];
        g.res_[a] = res[a];
        g.spacing_[a] = extent[a] / (res[a] + 1);
        g.cell_volume_ *= g.spacing_[a];
        g.max_spacing_ = std::max(g.max_spacing_, g.spacing_[a]);
        g.interior_count_ *= res[a];
    }

    // Boundary faces: axis-major, low before high, tangential coords in
    // interior lexicographic order.
    for (int a = 0; a < dim; ++a) {
        double measure = 1.0;
        for (int b = 0; b < dim; ++b)
            if (b != a) measure *= g.spacing_[b];
        for (int side = 0; side < 2; ++side) {
            // iterate over the tangential lattice
            std::array<int, kMaxDim> c{};
            const int tangential_axes = dim - 1;
            std::array<int, kMaxDim> taxis{};
            int t = 0;
            for (int b = 0; b < dim; ++b)
                if (b != a) taxis[t++] = b;
            int count = 1;
            for (int i = 0; i < tangential_axes; ++i) count *= g.res_[taxis[i]];
            for (int k = 0; k < count; ++k) {
                int rem = k;
                for (int i = tangential_axes - 1; i >= 0; --i) {
                    c[taxis[i]] = rem % g.res_[taxis[i]];
                    rem /= g.res_[taxis[i]];
                }
                BoundaryFace f;
                f.axis = a;
                f.side = side;
                f.measure = measure;
                std::array<int, kMaxDim> inner = c;
                inner[a] = (side == 0) ? 0 : g.res_[a] - 1;
                std::array<int, kMaxDim> inner2 = c;
                inner2[a] = (side == 0) ? 1 : g.res_[a] - 2;
                f.interior = g.index_of(inner);
                f.interior2 = g.index_of(inner2);
                for (int b = 0; b < dim; ++b)
                    f.position[b] = (c[b] + 1) * g.spacing_[b];
                f.position[a] = (side == 0) ? 0.0 : g.extent_[a];
                g.faces_.push_back(f);
            }
        }
    }

    g.face_measures_.resize(g.face_count());
    for (int i = 0; i < g.face_count(); ++i) g.face_measures_[i] = g.faces_[i].measure;

    // Neighbor table with boundary arms encoded as -(face_index + 1).
    g.neighbors_.assign(static_cast<std::size_t>(g.interior_count_) * 2 * dim, 0);
    std::vector<std::vector<int>> face_of_node(g.interior_count_ * 2 * dim);
    for (int fi = 0; fi < g.face_count(); ++fi) {
        const BoundaryFace& f = g.faces_[fi];
        // the face sits in direction (axis, side) as seen from f.interior
        g.neighbors_[static_cast<std::size_t>(f.interior) * 2 * dim + 2 * f.axis + f.side] =
            -(fi + 1);
    }
    for (int flat = 0; flat < g.interior_count_; ++flat) {
        const auto c = g.coords_of(flat);
        for (int a = 0; a < dim; ++a) {
            for (int side = 0; side < 2; ++side) {
                auto n = c;
                n[a] += (side == 0) ? -1 : 1;
                if (n[a] >= 0 && n[a] < g.res_[a]) {
                    g.neighbors_[static_cast<std::size_t>(flat) * 2 * dim + 2 * a + side] =
                        g.index_of(n);
                }
                // boundary arms were already filled from the face list
            }
        }
    }
    return g;
}

int Grid::index_of(const std::array<int, kMaxDim>& coords) const {
    int flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * res_[a] + coords[a];
    return flat;
}

std::array<int, kMaxDim> Grid::coords_of(int flat) const {
    std::array<int, kMaxDim> c{};
    for (int a = dim_ - 1; a >= 0; --a) {
        c[a] = flat % res_[a];
        flat /= res_[a];
    }
    return c;
}

std::array<double, kMaxDim> Grid::position_of(int flat) const {
    const auto c = coords_of(flat);
    std::array<double, kMaxDim> x{};
    for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 1) * spacing_[a];
    return x;
}

bool Grid::compatible(const Grid& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a)
        if (res_[a] != other.res_[a] || extent_[a] != other.extent_[a]) return false;
    return true;
}

GridField GridField::zero(const Grid& g) {
    GridField f;
    f.grid = &g;
    f.values = Vec::Zero(g.interior_count());
    return f;
}

GridField GridField::interior(const Grid& g, Vec v) {
    if (v.size() != g.interior_count())
        throw std::invalid_argument("GridField: value count must equal interior node count");
    GridField f;
    f.grid = &g;
    f.values = std::move(v);
    return f;
}

BoundaryFunction BoundaryFunction::zero(const Grid& g) {
    BoundaryFunction b;
    b.grid = &g;
    b.values = Vec::Zero(g.face_count());
    return b;
}

namespace {
void check_same_grid(const Grid* a, const Grid* b, const char* what) {
    if (a == nullptr || b == nullptr || !a->compatible(*b))
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
}
}  // namespace

Complex inner_omega(const GridField& u, const GridField& v) {
    check_same_grid(u.grid, v.grid, "inner_omega");
    // v.dot(u) = sum conj(v_i) u_i = sum u_i conj(v_i)
    return v.values.dot(u.values) * u.grid->cell_volume();
}

double norm_omega(const GridField& u) {
    return u.values.norm() * std::sqrt(u.grid->cell_volume());
}

Complex inner_gamma(const BoundaryFunction& g, const BoundaryFunction& h) {
    check_same_grid(g.grid, h.grid, "inner_gamma");
    const RealVec& w = g.grid->face_measures();
    return (g.values.array() * h.values.array().conjugate() * w.array().cast<Complex>()).sum();
}

double norm_gamma(const BoundaryFunction& g) {
    const RealVec& w = g.grid->face_measures();
    return std::sqrt((g.values.array().abs2() * w.array()).sum());
}

double lp_gamma_norm(const BoundaryFunction& g, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_gamma_norm: p must be >= 1");
    const RealVec& w = g.grid->face_measures();
    const double s = (g.values.array().abs().pow(p) * w.array()).sum();
    return std::pow(s, 1.0 / p);
}

GridField discrete_laplacian(const GridField& u) {
    const Grid& g = *u.grid;
    if (u.values.size() != g.interior_count())
        throw std::invalid_argument("discrete_laplacian: bad interior size");
    if (u.boundary && u.boundary->size() != g.face_count())
        throw std::invalid_argument("discrete_laplacian: bad boundary size");
    GridField out = GridField::zero(g);
    const int n = g.dim();
    for (int i = 0; i < g.interior_count(); ++i) {
        Complex acc(0.0, 0.0);
        for (int a = 0; a < n; ++a) {
            const double ih2 = 1.0 / (g.spacing(a) * g.spacing(a));
            Complex lo(0.0, 0.0), hi(0.0, 0.0);
            const int nl = g.neighbor(i, a, 0);
            const int nh = g.neighbor(i, a, 1);
            if (nl >= 0)
                lo = u.values[nl];
            else if (u.boundary)
                lo = (*u.boundary)[-nl - 1];
            if (nh >= 0)
                hi = u.values[nh];
            else if (u.boundary)
                hi = (*u.boundary)[-nh - 1];
            acc += (lo - 2.0 * u.values[i] + hi) * ih2;
        }
        out.values[i] = acc;
    }
    return out;
}

}  // namespace bslab
