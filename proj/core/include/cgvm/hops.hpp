#pragma once

#include <string>
#include <vector>

namespace cgvm {

/// One metric's per-hop trajectory for one sample, plus its resampling
/// onto the shared normalized-hop grid in [0, 1].
struct MetricSeries {
    std::string sample_id;
    std::string metric_name;
    std::vector<double> per_hop;                       // index 0 is hop 1
    std::vector<std::pair<double, double>> normalized;  // (grid point, value)
};

/// Maps hop K of T to (K-1)/(T-1) and linearly interpolates onto a uniform
/// grid of grid_size points over [0, 1]. A single-hop series is constant.
/// Non-finite hop values (e.g. infinite PSNR) propagate into the grid
/// points they touch; aggregation skips and counts them.
MetricSeries normalize_hops(const MetricSeries& series, int grid_size);

enum class GroupBy { Corpus, Category, GridPoint };

struct AggregateRow {
    std::string metric_name;
    std::string group;  // "corpus", a category name, or a grid point
    double mean = 0.0;
    double std_dev = 0.0;  // population
    double max = 0.0;
    int n = 0;
    int excluded_nonfinite = 0;
};

/// Population mean/std/max per group. Category grouping needs the caller
/// to provide each series' category via the parallel `categories` vector
/// (empty for the other groupings).
std::vector<AggregateRow> aggregate(const std::vector<MetricSeries>& all, GroupBy group_by,
                                    const std::vector<std::string>& categories = {});

}  // namespace cgvm
