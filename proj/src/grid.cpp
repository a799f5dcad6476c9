#include "resim/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace resim {

namespace {

using json = nlohmann::json;

void check_axis(const std::vector<double>& v, Index n, const char* name) {
    if (v.empty()) return;
    if (static_cast<Index>(v.size()) != n + 1) {
        fail(Errc::invalid_argument, std::string("axis partition ") + name + " needs " + std::to_string(n + 1) +
                                         " entries, got " + std::to_string(v.size()));
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            fail(Errc::invalid_argument, std::string("axis partition ") + name + " is not strictly increasing");
        }
    }
}

void check_ijk(const Ijk& ijk, const GridSpec& spec) {
    const Index n[3] = {spec.ncx, spec.ncy, spec.ncz};
    for (int a = 0; a < 3; ++a) {
        if (ijk[a] < 0 || ijk[a] >= n[a]) {
            fail(Errc::invalid_coordinate, "cell (" + std::to_string(ijk[0]) + "," + std::to_string(ijk[1]) + "," +
                                               std::to_string(ijk[2]) + ") outside grid");
        }
    }
}

}  // namespace

void GridSpec::validate() const {
    if (ncx < 1 || ncy < 1 || ncz < 1) fail(Errc::invalid_argument, "grid cell counts must be >= 1");
    check_axis(vx, ncx, "vx");
    check_axis(vy, ncy, "vy");
    check_axis(vz, ncz, "vz");
    for (int a = 0; a < 3; ++a) {
        if (!(bbox.hi[a] > bbox.lo[a])) {
            fail(Errc::degenerate_domain, "grid bounding box has zero extent on axis " + std::to_string(a));
        }
    }
}

GridSpec grid_spec_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("grid spec: ") + e.what());
    }
    GridSpec s;
    try {
        s.ncx = j.at("ncx").get<Index>();
        s.ncy = j.value("ncy", Index{1});
        s.ncz = j.value("ncz", Index{1});
        if (j.contains("bbox")) {
            const auto& b = j.at("bbox");
            for (int a = 0; a < 3; ++a) {
                s.bbox.lo[a] = b.at(a).at(0).get<double>();
                s.bbox.hi[a] = b.at(a).at(1).get<double>();
            }
        }
        std::vector<double>* axes[3] = {&s.vx, &s.vy, &s.vz};
        const char* names[3] = {"vx", "vy", "vz"};
        for (int a = 0; a < 3; ++a) {
            if (j.contains(names[a])) {
                *axes[a] = j.at(names[a]).get<std::vector<double>>();
                if (!axes[a]->empty()) {
                    s.bbox.lo[a] = axes[a]->front();
                    s.bbox.hi[a] = axes[a]->back();
                }
            }
        }
        const auto numbering = j.value("numbering", std::string("bottom-up"));
        if (numbering == "bottom-up") s.numbering = Numbering::bottom_up;
        else if (numbering == "top-down") s.numbering = Numbering::top_down;
        else fail(Errc::parse_error, "grid spec: unknown numbering '" + numbering + "'");
    } catch (const json::exception& e) {
        fail(Errc::parse_error, std::string("grid spec: ") + e.what());
    }
    s.validate();
    return s;
}

GridSpec load_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open grid spec " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return grid_spec_from_json(ss.str());
}

std::string to_json(const GridSpec& s) {
    json j;
    j["ncx"] = s.ncx;
    j["ncy"] = s.ncy;
    j["ncz"] = s.ncz;
    j["bbox"] = {{s.bbox.lo[0], s.bbox.hi[0]}, {s.bbox.lo[1], s.bbox.hi[1]}, {s.bbox.lo[2], s.bbox.hi[2]}};
    if (!s.vx.empty()) j["vx"] = s.vx;
    if (!s.vy.empty()) j["vy"] = s.vy;
    if (!s.vz.empty()) j["vz"] = s.vz;
    j["numbering"] = s.numbering == Numbering::bottom_up ? "bottom-up" : "top-down";
    return j.dump(2);
}

Index cell_index_bottom_up(const Ijk& ijk, const GridSpec& spec) {
    check_ijk(ijk, spec);
    return spec.ncx * spec.ncy * ijk[2] + spec.ncx * ijk[1] + ijk[0];
}

Index cell_index_top_down(const Ijk& ijk, const GridSpec& spec) {
    check_ijk(ijk, spec);
    return spec.ncx * spec.ncy * (spec.ncz - ijk[2]) + spec.ncx * ijk[1] + ijk[0];
}

StructuredGrid::StructuredGrid(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    n_ = {spec_.ncx, spec_.ncy, spec_.ncz};
    const std::vector<double>* given[3] = {&spec_.vx, &spec_.vy, &spec_.vz};
    for (int a = 0; a < 3; ++a) {
        if (!given[a]->empty()) {
            axis_[a] = *given[a];
            spec_.bbox.lo[a] = axis_[a].front();
            spec_.bbox.hi[a] = axis_[a].back();
            continue;
        }
        axis_[a].resize(n_[a] + 1);
        const double lo = spec_.bbox.lo[a];
        const double h = (spec_.bbox.hi[a] - lo) / static_cast<double>(n_[a]);
        for (Index i = 0; i <= n_[a]; ++i) axis_[a][i] = lo + h * static_cast<double>(i);
        axis_[a].back() = spec_.bbox.hi[a];
    }
}

Index StructuredGrid::global_index(const Ijk& ijk) const {
    if (spec_.numbering == Numbering::bottom_up) return cell_index_bottom_up(ijk, spec_);
    return cell_index_top_down(ijk, spec_) - n_[0] * n_[1];
}

Ijk StructuredGrid::ijk(Index g) const {
    check(g);
    const Index layer = n_[0] * n_[1];
    Index k = g / layer;
    const Index rest = g % layer;
    if (spec_.numbering == Numbering::top_down) k = n_[2] - 1 - k;
    return {rest % n_[0], rest / n_[0], k};
}

void StructuredGrid::check(Index g) const {
    if (g < 0 || g >= ncells()) fail(Errc::invalid_coordinate, "cell index " + std::to_string(g) + " outside grid");
}

std::array<double, 3> StructuredGrid::centroid(Index g) const {
    const auto c = ijk(g);
    std::array<double, 3> x{};
    for (int a = 0; a < 3; ++a) x[a] = 0.5 * (axis_[a][c[a]] + axis_[a][c[a] + 1]);
    return x;
}

double StructuredGrid::volume(Index g) const {
    const auto c = ijk(g);
    return spacing(0, c[0]) * spacing(1, c[1]) * spacing(2, c[2]);
}

double StructuredGrid::face_area(Index g, int face) const {
    if (face < 0 || face >= kFaces) fail(Errc::invalid_argument, "face id out of range");
    const auto c = ijk(g);
    const int normal = face / 2;
    const int a = (normal + 1) % 3;
    const int b = (normal + 2) % 3;
    return spacing(a, c[a]) * spacing(b, c[b]);
}

double StructuredGrid::face_distance(Index g, int face) const {
    const auto c = ijk(g);
    const int a = face / 2;
    const double half = 0.5 * spacing(a, c[a]);
    auto nb = neighbor(g, face);
    if (!nb) return half;
    const auto d = ijk(*nb);
    return half + 0.5 * spacing(a, d[a]);
}

std::optional<Index> StructuredGrid::neighbor(Index g, int face) const {
    if (face < 0 || face >= kFaces) fail(Errc::invalid_argument, "face id out of range");
    auto c = ijk(g);
    const int a = face / 2;
    const Index step = (face % 2 == 0) ? -1 : 1;
    c[a] += step;
    if (c[a] < 0 || c[a] >= n_[a]) return std::nullopt;
    return global_index(c);
}

int StructuredGrid::neighbor_count(Index g) const {
    int count = 0;
    for (int f = 0; f < kFaces; ++f) count += neighbor(g, f).has_value();
    return count;
}

std::array<double, 3> StructuredGrid::vertex(Index i, Index j, Index k) const {
    if (i < 0 || i > n_[0] || j < 0 || j > n_[1] || k < 0 || k > n_[2]) {
        fail(Errc::invalid_coordinate, "vertex outside grid");
    }
    return {axis_[0][i], axis_[1][j], axis_[2][k]};
}

Cell StructuredGrid::cell(Index g) const {
    Cell c;
    c.ijk = ijk(g);
    c.global_index = g;
    c.local_index = g;
    c.centroid = centroid(g);
    c.volume = volume(g);
    for (int f = 0; f < kFaces; ++f) {
        c.face_areas[f] = face_area(g, f);
        c.boundary_type[f] = neighbor(g, f) ? 0 : kBoundaryClosed;
    }
    return c;
}

double StructuredGrid::total_volume() const {
    double v = 0.0;
    for (Index g = 0; g < ncells(); ++g) v += volume(g);
    return v;
}

}  // namespace resim
