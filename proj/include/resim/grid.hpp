#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resim/error.hpp"
#include "resim/sfc.hpp"

namespace resim {

enum class Numbering { bottom_up, top_down };

/// Faces in the order xlo, xhi, ylo, yhi, zlo, zhi.
enum Face : int { xlo = 0, xhi, ylo, yhi, zlo, zhi };
inline constexpr int kFaces = 6;

/// Boundary tag stored for faces on the domain boundary.
inline constexpr int kBoundaryClosed = 1;

struct GridSpec {
    Index ncx = 1, ncy = 1, ncz = 1;
    sfc::Box3 bbox;
    // Optional axis partitions (n+1 strictly increasing coordinates each).
    // Empty means equispaced over the bbox.
    std::vector<double> vx, vy, vz;
    Numbering numbering = Numbering::bottom_up;

    Index ncells() const noexcept { return ncx * ncy * ncz; }
    bool uniform() const noexcept { return vx.empty() && vy.empty() && vz.empty(); }
    /// Throws invalid-argument on bad counts or partitions; the bbox is
    /// taken from the partitions when they are given.
    void validate() const;
};

GridSpec grid_spec_from_json(std::string_view text);
GridSpec load_grid_spec(const std::string& path);
std::string to_json(const GridSpec& spec);

using Ijk = std::array<Index, 3>;

/// n_x n_y k + n_x j + i.
Index cell_index_bottom_up(const Ijk& ijk, const GridSpec& spec);
/// n_x n_y (n_z - k) + n_x j + i (the literal top-down formula).
Index cell_index_top_down(const Ijk& ijk, const GridSpec& spec);

struct Cell {
    Ijk ijk{};
    Index global_index = 0;
    Index local_index = 0;
    int region = 0;
    std::array<int, kFaces> boundary_type{};  // 0 = interior face
    std::array<double, 3> centroid{};
    std::array<double, kFaces> face_areas{};
    double volume = 0.0;
};

/// Cell-centered hexahedral grid. Geometry is computed on demand from the
/// axis partitions, nothing per cell is stored.
class StructuredGrid {
public:
    explicit StructuredGrid(GridSpec spec);

    const GridSpec& spec() const noexcept { return spec_; }
    Index ncells() const noexcept { return spec_.ncells(); }
    Numbering numbering() const noexcept { return spec_.numbering; }

    /// Global index under the active numbering, always in [0, N_g).
    Index global_index(const Ijk& ijk) const;
    Ijk ijk(Index global) const;

    std::array<double, 3> centroid(Index global) const;
    double volume(Index global) const;
    double face_area(Index global, int face) const;
    /// Cell-center spacing across a face (distance between the two
    /// centroids, or centroid-to-face for boundary faces).
    double face_distance(Index global, int face) const;
    double spacing(int axis, Index i) const { return axis_[axis][i + 1] - axis_[axis][i]; }
    const std::vector<double>& axis(int a) const noexcept { return axis_[a]; }

    /// Neighbor across a face, or nullopt on the domain boundary.
    std::optional<Index> neighbor(Index global, int face) const;
    int neighbor_count(Index global) const;
    std::array<double, 3> vertex(Index i, Index j, Index k) const;

    Cell cell(Index global) const;
    double total_volume() const;

private:
    void check(Index global) const;

    GridSpec spec_;
    std::array<Index, 3> n_{};
    std::array<std::vector<double>, 3> axis_;
};

}  // namespace resim
