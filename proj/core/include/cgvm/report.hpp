#pragma once

#include <string>

#include "cgvm/dataset.hpp"
#include "cgvm/pipeline.hpp"

namespace cgvm {

/// Stable float formatting shared by every emitted file ("%.9g").
std::string format_value(double v);

/// Emits report.csv, aggregate.json, plotdata.csv and errors.json into
/// out_dir. Output is byte-deterministic for a fixed report (no wall-clock
/// content; timestamps live only in run.json).
void write_report_files(const EvalReport& report, const std::string& out_dir);

/// Emits the corpus statistics CSVs (conversation lengths, sources,
/// element frequencies) into out_dir.
void write_stats_files(const StatsReport& stats, const std::string& out_dir);

/// Renders the corpus aggregate table (Mean/Std/Maximum per metric).
std::string render_aggregate_table(const EvalReport& report);

}  // namespace cgvm
