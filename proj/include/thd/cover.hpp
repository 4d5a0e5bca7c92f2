#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "thd/geometry.hpp"
#include "thd/types.hpp"

namespace thd {

// Resolution N (bins per filter dimension) and gain g >= 1; adjacent bins
// overlap by fraction 1 - 1/g of their width.
struct CoverParams {
    int resolution = 1;
    double gain = 2.7;

    void validate() const {
        if (resolution < 1) throw Error("cover: resolution must be >= 1");
        if (!(gain >= 1.0)) throw Error("cover: gain must be >= 1");
    }

    double overlap_fraction() const { return 1.0 - 1.0 / gain; }
};

// Generalized open interval around an evenly spaced center. Membership tests
// use closed comparisons so lattice-aligned and extreme points are never
// dropped from the cover.
struct Bin {
    std::vector<double> center;
    std::vector<double> half_width;
    std::vector<int> lattice;
    int index = 0;

    bool contains(std::span<const double> p) const {
        for (std::size_t d = 0; d < center.size(); ++d)
            if (std::abs(p[d] - center[d]) > half_width[d]) return false;
        return true;
    }
};

// N^dim bins tiling the bounding box of the filter values: base intervals of
// width range/N, widened to half-width (range/N) * g/2. A dimension with
// zero range collapses to a single bin.
inline std::vector<Bin> build_cover(const FilterValues& filter, const CoverParams& params) {
    if (filter.n == 0) throw Error("build_cover: empty filter values");
    params.validate();

    const int dim = filter.dim;
    struct Axis {
        double min, width, half_width;
        int bins;
    };
    std::vector<Axis> axes;
    for (int d = 0; d < dim; ++d) {
        double lo = filter.at(0, d), hi = filter.at(0, d);
        for (std::size_t i = 1; i < filter.n; ++i) {
            lo = std::min(lo, filter.at(i, d));
            hi = std::max(hi, filter.at(i, d));
        }
        const double range = hi - lo;
        if (range == 0.0) {
            axes.push_back({lo, 0.0, 0.0, 1});
        } else {
            const double w = range / params.resolution;
            axes.push_back({lo, w, w * params.gain / 2.0, params.resolution});
        }
    }

    int total = 1;
    for (const auto& a : axes) total *= a.bins;
    std::vector<Bin> bins;
    bins.reserve(static_cast<std::size_t>(total));
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (int flat = 0; flat < total; ++flat) {
        Bin b;
        b.index = flat;
        int rem = flat;
        for (int d = dim - 1; d >= 0; --d) {
            idx[static_cast<std::size_t>(d)] = rem % axes[static_cast<std::size_t>(d)].bins;
            rem /= axes[static_cast<std::size_t>(d)].bins;
        }
        for (int d = 0; d < dim; ++d) {
            const auto& a = axes[static_cast<std::size_t>(d)];
            b.lattice.push_back(idx[static_cast<std::size_t>(d)]);
            b.center.push_back(a.min + (idx[static_cast<std::size_t>(d)] + 0.5) * a.width);
            b.half_width.push_back(a.half_width);
        }
        bins.push_back(std::move(b));
    }
    return bins;
}

// Per-bin lists of local point indices (ascending). Every point lands in at
// least one bin: membership is closed, and a point that misses every
// candidate through rounding is assigned to the nearest center.
inline std::vector<std::vector<int>> assign_bins(const FilterValues& filter,
                                                 const std::vector<Bin>& bins) {
    std::vector<std::vector<int>> members(bins.size());
    if (bins.empty()) return members;
    std::vector<double> point(static_cast<std::size_t>(filter.dim));
    for (std::size_t i = 0; i < filter.n; ++i) {
        for (int d = 0; d < filter.dim; ++d) point[static_cast<std::size_t>(d)] = filter.at(i, d);
        bool placed = false;
        for (const Bin& b : bins) {
            if (b.contains(point)) {
                members[static_cast<std::size_t>(b.index)].push_back(static_cast<int>(i));
                placed = true;
            }
        }
        if (!placed) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < bins.size(); ++b) {
                double s = 0.0;
                for (int d = 0; d < filter.dim; ++d) {
                    const double diff = point[static_cast<std::size_t>(d)] - bins[b].center[static_cast<std::size_t>(d)];
                    s += diff * diff;
                }
                if (s < best_d) {
                    best_d = s;
                    best = b;
                }
            }
            members[best].push_back(static_cast<int>(i));
        }
    }
    return members;
}

}  // namespace thd
