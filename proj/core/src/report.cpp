#include "cgvm/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cgvm/errors.hpp"
#include "internal_config_json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace cgvm {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable across platforms
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

json agg_row_json(const AggregateRow& r) {
    json j;
    j["metric"] = r.metric_name;
    j["group"] = r.group;
    j["mean"] = format_value(r.mean);
    j["std"] = format_value(r.std_dev);
    j["max"] = format_value(r.max);
    j["n"] = r.n;
    j["excluded_nonfinite"] = r.excluded_nonfinite;
    return j;
}

}  // namespace

void write_report_files(const EvalReport& report, const std::string& out_dir) {
    fs::create_directories(out_dir);

    {
        auto out = open_out(fs::path(out_dir) / "report.csv");
        out << "sample_id,category,hop,metric,value\n";
        for (const ReportRow& r : report.rows) {
            out << r.sample_id << ',' << r.category << ',' << r.hop << ',' << r.metric << ','
                << (r.infinite ? "inf" : format_value(r.value)) << '\n';
        }
    }

    {
        json doc;
        doc["dataset_hash"] = report.dataset_hash;
        doc["config"] = detail::config_to_json(report.config);
        doc["corpus"] = json::array();
        for (const AggregateRow& r : report.corpus_agg) doc["corpus"].push_back(agg_row_json(r));
        doc["per_category"] = json::array();
        for (const AggregateRow& r : report.category_agg)
            doc["per_category"].push_back(agg_row_json(r));
        auto out = open_out(fs::path(out_dir) / "aggregate.json");
        out << doc.dump(2) << '\n';
    }

    {
        auto out = open_out(fs::path(out_dir) / "plotdata.csv");
        out << "metric,group,grid_point,mean,std,max,n\n";
        for (const auto& [group, r] : report.grid_agg) {
            out << r.metric_name << ',' << group << ',' << r.group << ','
                << format_value(r.mean) << ',' << format_value(r.std_dev) << ','
                << format_value(r.max) << ',' << r.n << '\n';
        }
    }

    {
        json doc;
        doc["errors"] = json::array();
        for (const EvalError& e : report.errors) {
            doc["errors"].push_back({{"sample_id", e.sample_id},
                                     {"hop", e.hop},
                                     {"metric", e.metric},
                                     {"message", e.message}});
        }
        doc["flags"] = report.flags;
        auto out = open_out(fs::path(out_dir) / "errors.json");
        out << doc.dump(2) << '\n';
    }
}

void write_stats_files(const StatsReport& stats, const std::string& out_dir) {
    fs::create_directories(out_dir);
    {
        auto out = open_out(fs::path(out_dir) / "conversation_lengths.csv");
        out << "category,length,count\n";
        for (const auto& [len, count] : stats.conversation_length_histogram) {
            out << "all," << len << ',' << count << '\n';
        }
        for (const auto& [cat, hist] : stats.length_histogram_per_category) {
            for (const auto& [len, count] : hist) {
                out << cat << ',' << len << ',' << count << '\n';
            }
        }
    }
    {
        auto out = open_out(fs::path(out_dir) / "sources.csv");
        out << "category,source,count\n";
        for (const auto& [cat, srcs] : stats.source_per_category) {
            for (const auto& [src, count] : srcs) {
                out << cat << ',' << src << ',' << count << '\n';
            }
        }
    }
    {
        auto out = open_out(fs::path(out_dir) / "element_frequencies.csv");
        out << "category,label,count\n";
        for (const auto& [cat, labels] : stats.element_frequency_per_category) {
            for (const auto& [label, count] : labels) {
                out << cat << ',' << label << ',' << count << '\n';
            }
        }
    }
}

std::string render_aggregate_table(const EvalReport& report) {
    std::ostringstream out;
    out << "Scores                    Mean        Std         Maximum     n\n";
    for (const AggregateRow& r : report.corpus_agg) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-24s  %-10.6f  %-10.6f  %-10.6f  %d\n",
                      r.metric_name.c_str(), r.mean, r.std_dev, r.max, r.n);
        out << line;
    }
    return out.str();
}

}  // namespace cgvm
