#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "bslab/types.hpp"

namespace bslab {

/// One boundary lattice point of the box, tied to the unique interior node it
/// faces across the boundary. Box corners are never enumerated: a face entry
/// exists exactly where an interior stencil arm crosses the boundary.
struct BoundaryFace {
    std::array<double, kMaxDim> position{};  // coordinates of the boundary node
    int interior = -1;                       // flat index of the adjacent interior node
    int interior2 = -1;                      // second interior node along the normal axis
    int axis = 0;                            // normal axis
    int side = 0;                            // 0: low face (normal -e_axis), 1: high face (+e_axis)
    double measure = 0.0;                    // product of spacings over the tangential axes
};

/// Uniform tensor grid on the box (0,L_1) x ... x (0,L_n) with m_a interior
/// nodes per axis at spacing h_a = L_a / (m_a + 1).
///
/// Interior nodes are indexed lexicographically by lattice coordinates
/// (i_1,...,i_n), i_a in [0, m_a), last axis fastest; node positions are
/// x_a = (i_a + 1) h_a. Boundary faces are enumerated axis-major, low face
/// before high face, face nodes in the lexicographic order of the remaining
/// axes. Both orders are part of the dataset file contract.
class Grid {
public:
    static Grid build(int dim, std::span<const double> extent, std::span<const int> res);

    int dim() const { return dim_; }
    double extent(int axis) const { return extent_[axis]; }
    int res(int axis) const { return res_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    int interior_count() const { return interior_count_; }
    int face_count() const { return static_cast<int>(faces_.size()); }
    const std::vector<BoundaryFace>& faces() const { return faces_; }
    const RealVec& face_measures() const { return face_measures_; }

    double cell_volume() const { return cell_volume_; }  // prod_a h_a
    double max_spacing() const { return max_spacing_; }
    /// Largest probe frequency the grid resolves comfortably.
    double nyquist_tau() const { return 1.0 / (4.0 * max_spacing_); }

    /// Neighbor of an interior node in direction (axis, side).
    /// Returns the interior flat index, or -(face_index + 1) when the arm
    /// crosses the boundary.
    int neighbor(int flat, int axis, int side) const {
        return neighbors_[static_cast<std::size_t>(flat) * 2 * dim_ + 2 * axis + side];
    }

    int index_of(const std::array<int, kMaxDim>& coords) const;
    std::array<int, kMaxDim> coords_of(int flat) const;
    std::array<double, kMaxDim> position_of(int flat) const;

    /// Structural equality of the discretization (not pointer identity).
    bool compatible(const Grid& other) const;

private:
    Grid() = default;

    int dim_ = 0;
    std::array<double, kMaxDim> extent_{};
    std::array<int, kMaxDim> res_{};
    std::array<double, kMaxDim> spacing_{};
    int interior_count_ = 0;
    double cell_volume_ = 0.0;
    double max_spacing_ = 0.0;
    std::vector<BoundaryFace> faces_;
    std::vector<int> neighbors_;
    RealVec face_measures_;
};

/// Complex samples on the interior nodes, optionally with values on the
/// boundary faces (needed by fields that do not vanish on the boundary).
struct GridField {
    const Grid* grid = nullptr;
    Vec values;                    // one per interior node
    std::optional<Vec> boundary;   // one per boundary face, when present

    static GridField zero(const Grid& g);
    static GridField interior(const Grid& g, Vec v);
};

/// Complex samples on the boundary faces.
struct BoundaryFunction {
    const Grid* grid = nullptr;
    Vec values;  // one per boundary face

    static BoundaryFunction zero(const Grid& g);
};

/// Discrete L^2(Omega) pairing: sum_i u_i conj(v_i) * prod_a h_a.
/// Conjugate-linear in the second argument.
Complex inner_omega(const GridField& u, const GridField& v);
double norm_omega(const GridField& u);

/// Discrete L^2(Gamma) pairing: sum over faces of g conj(h) * face measure.
Complex inner_gamma(const BoundaryFunction& g, const BoundaryFunction& h);
double norm_gamma(const BoundaryFunction& g);

/// Discrete L^p(Gamma) norm, p >= 1.
double lp_gamma_norm(const BoundaryFunction& g, double p);

/// Discrete Laplacian with the full stencil: boundary neighbors read from
/// u.boundary (zero when absent). Returns interior values of Delta_h u.
GridField discrete_laplacian(const GridField& u);

}  // namespace bslab
