#include "cgvm/hops.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cgvm/errors.hpp"

namespace cgvm {

MetricSeries normalize_hops(const MetricSeries& series, int grid_size) {
    if (series.per_hop.empty()) {
        throw EmptySeries();
    }
    if (grid_size < 2) {
        throw Error("grid size must be >= 2");
    }
    MetricSeries out = series;
    out.normalized.clear();
    const size_t t = series.per_hop.size();
    for (int g = 0; g < grid_size; ++g) {
        const double x = double(g) / (grid_size - 1);
        double v;
        if (t == 1) {
            v = series.per_hop[0];
        } else {
            // Hop K (1-based) sits at (K-1)/(T-1); pick the surrounding pair.
            const double pos = x * double(t - 1);
            const size_t lo = std::min(size_t(std::floor(pos)), t - 2);
            const double frac = pos - double(lo);
            if (frac == 0.0) {
                v = series.per_hop[lo];
            } else if (frac == 1.0) {
                v = series.per_hop[lo + 1];
            } else {
                v = (1.0 - frac) * series.per_hop[lo] + frac * series.per_hop[lo + 1];
            }
        }
        out.normalized.emplace_back(x, v);
    }
    return out;
}

namespace {

struct Accum {
    std::vector<double> values;
    int excluded = 0;

    void add(double v) {
        if (std::isfinite(v)) {
            values.push_back(v);
        } else {
            ++excluded;
        }
    }
};

std::string format_grid_point(double g) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", g);
    return buf;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<MetricSeries>& all, GroupBy group_by,
                                    const std::vector<std::string>& categories) {
    if (all.empty()) {
        throw EmptyGroup("(no series)");
    }
    if (group_by == GroupBy::Category && categories.size() != all.size()) {
        throw Error("category grouping needs one category per series");
    }

    std::map<std::pair<std::string, std::string>, Accum> groups;
    for (size_t i = 0; i < all.size(); ++i) {
        const MetricSeries& s = all[i];
        if (s.per_hop.empty()) {
            throw EmptySeries();
        }
        switch (group_by) {
            case GroupBy::Corpus:
                // Final-hop (@T) value represents the sample.
                groups[{s.metric_name, "corpus"}].add(s.per_hop.back());
                break;
            case GroupBy::Category:
                groups[{s.metric_name, categories[i]}].add(s.per_hop.back());
                break;
            case GroupBy::GridPoint:
                for (const auto& [g, v] : s.normalized) {
                    groups[{s.metric_name, format_grid_point(g)}].add(v);
                }
                break;
        }
    }

    std::vector<AggregateRow> rows;
    for (const auto& [key, acc] : groups) {
        AggregateRow row;
        row.metric_name = key.first;
        row.group = key.second;
        row.excluded_nonfinite = acc.excluded;
        row.n = int(acc.values.size());
        if (acc.values.empty()) {
            if (acc.excluded == 0) {
                throw EmptyGroup(key.second);
            }
            // All values excluded (e.g. every PSNR infinite): emit a row
            // with n = 0 so the exclusion is visible rather than silent.
            rows.push_back(row);
            continue;
        }
        double sum = 0.0, mx = acc.values[0];
        for (double v : acc.values) {
            sum += v;
            mx = std::max(mx, v);
        }
        row.mean = sum / row.n;
        double var = 0.0;
        for (double v : acc.values) {
            var += (v - row.mean) * (v - row.mean);
        }
        row.std_dev = std::sqrt(var / row.n);  // population
        row.max = mx;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cgvm
