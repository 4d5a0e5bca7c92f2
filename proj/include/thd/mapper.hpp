#pragma once

#include <vector>

#include "thd/cover.hpp"
#include "thd/dataset.hpp"
#include "thd/network.hpp"
#include "thd/parallel.hpp"

namespace thd {

enum class LensKind { Mds, Nhl };

struct LensSpec {
    LensKind kind = LensKind::Mds;
    int out_dim = 2;       // mds only; nhl is always 2-D
    int k_neighbors = 15;  // nhl only
};

inline FilterValues apply_lens(const DistanceMatrix& d, const LensSpec& lens) {
    switch (lens.kind) {
        case LensKind::Mds: return classical_mds(d, lens.out_dim);
        case LensKind::Nhl: return neighborhood_lens(d, lens.k_neighbors);
    }
    throw Error("apply_lens: unknown lens");
}

struct MapperParams {
    CoverParams cover;
    Metric metric = Metric::Vne;
    LensSpec lens;
    int histogram_bins = 10;
};

// Group-level state shared across resolutions: the analysis matrix, the
// distance matrix (variances computed once per group), and the filter
// values. Per-bin clustering slices distances from here.
struct MapperContext {
    AnalysisMatrix matrix;
    DistanceMatrix distances;
    FilterValues filter;

    static MapperContext build(const Dataset& ds, const Group& group, const MapperParams& params) {
        if (group.empty()) throw Error("mapper: empty group");
        MapperContext ctx;
        ctx.matrix = analysis_matrix(ds, group);
        ctx.distances = pairwise_distances(ctx.matrix.values, params.metric);
        LensSpec lens = params.lens;
        if (lens.kind == LensKind::Nhl) {
            // the engine may hand us groups near the neighbor count; clamp
            // rather than failing an otherwise valid decomposition
            lens.k_neighbors =
                std::max(1, std::min(lens.k_neighbors, static_cast<int>(group.size()) - 1));
        }
        ctx.filter = apply_lens(ctx.distances, lens);
        return ctx;
    }
};

// One MAPPER pass at a given resolution: cover the filter values, cluster
// each bin's preimage by single linkage with the first-gap cut, and take the
// nerve of the resulting pullback cover.
inline TopologicalNetwork mapper_at_resolution(const MapperContext& ctx, const Group& group,
                                               const CoverParams& cover, int histogram_bins = 10) {
    const std::vector<Bin> bins = build_cover(ctx.filter, cover);
    const std::vector<std::vector<int>> assigned = assign_bins(ctx.filter, bins);

    // bins are independent clustering jobs; results land in per-bin slots
    std::vector<std::vector<std::vector<int>>> bin_clusters(bins.size());
    parallel_chunks(bins.size(), 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            if (assigned[b].empty()) continue;
            const auto merges = single_linkage(assigned[b], ctx.distances);
            bin_clusters[b] = cut_by_gap(assigned[b], merges, histogram_bins);
        }
    });

    std::vector<std::pair<int, std::vector<RowId>>> clusters;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        for (const auto& local_rows : bin_clusters[b]) {
            std::vector<RowId> rows;
            rows.reserve(local_rows.size());
            for (int li : local_rows) rows.push_back(group.rows[static_cast<std::size_t>(li)]);
            clusters.emplace_back(static_cast<int>(b), std::move(rows));
        }
    }
    return build_network(clusters);
}

// The full construction for one group at one resolution.
inline TopologicalNetwork mapper(const Dataset& ds, const Group& group, const MapperParams& params) {
    const MapperContext ctx = MapperContext::build(ds, group, params);
    return mapper_at_resolution(ctx, group, params.cover, params.histogram_bins);
}

}  // namespace thd
