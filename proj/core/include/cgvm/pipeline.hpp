#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cgvm/clients.hpp"
#include "cgvm/dataset.hpp"
#include "cgvm/element.hpp"
#include "cgvm/embedding.hpp"
#include "cgvm/fr_metrics.hpp"
#include "cgvm/hops.hpp"

namespace cgvm {

/// Immutable snapshot of everything that shapes a run's numbers. Embedded
/// in every report; reports with different snapshots are never merged.
struct RunConfig {
    std::string run_id;
    std::string run_dir;
    std::string dataset_root;
    int side = 512;
    int grid_size = 11;
    std::set<std::string> metrics = {"psnr", "ssim", "uqi", "brisque", "clip", "ep", "iou"};
    SsimWindow ssim_window = SsimWindow::Gaussian11x11Sigma1_5;
    UqiMode uqi_mode = UqiMode::Windowed8x8;
    MatchStrategy iou_matching = MatchStrategy::Greedy;
    IouAveraging iou_averaging = IouAveraging::PerClass;
    double det_threshold = 0.7;
    std::string brisque_model_path;
    std::string embed_store_path;
    bool offline = false;
    bool literal_paper_formulas = false;
    int jobs = 0;  // 0: logical cores
    std::optional<uint64_t> seed;
};

struct PipelineClients {
    std::shared_ptr<SummarizerClient> summarizer;
    std::shared_ptr<GeneratorClient> generator;
    std::shared_ptr<DetectorClient> detector;
    std::shared_ptr<EmbeddingProvider> embedder;  // null disables clip
};

struct ReportRow {
    std::string sample_id;
    std::string category;
    int hop = 1;
    std::string metric;
    double value = 0.0;
    bool infinite = false;
};

struct EvalError {
    std::string sample_id;
    int hop = 0;  // 0: sample-level
    std::string metric;
    std::string message;
};

struct EvalReport {
    RunConfig config;
    std::string dataset_hash;
    std::vector<ReportRow> rows;
    std::vector<MetricSeries> series;
    std::vector<std::string> series_categories;  // parallel to series
    std::vector<AggregateRow> corpus_agg;
    std::vector<AggregateRow> category_agg;
    // Grid aggregates carry a (group, row) pair: "corpus" or a category.
    std::vector<std::pair<std::string, AggregateRow>> grid_agg;
    std::vector<EvalError> errors;
    std::vector<std::string> flags;  // expected skips, e.g. undefined Common-IoU
};

/// Sends the summarization prompt plus hops 1..upto; StoredSummaries
/// replays the dataset's llm_desc entries without any network use.
std::string summarize(const Sample& sample, int upto, SummarizerClient& client);

/// One generated image per (sample, K). Remote responses are persisted to
/// the run directory before this returns, so an interrupted run resumes
/// from disk instead of re-generating.
RgbImage generate_image(const GenRequest& req, GeneratorClient& client,
                        const std::string& run_dir);

/// Runs stages 1-3 over the dataset: ensures summaries/images/detections
/// exist (reusing anything already on disk), evaluates every enabled metric
/// per (sample, hop), builds hop-normalized series and aggregates.
/// Deterministic given identical artifacts and config.
EvalReport evaluate_run(const Dataset& dataset, const RunConfig& config,
                        PipelineClients& clients);

/// Writes run.json (config snapshot + dataset hash + status).
void write_run_record(const RunConfig& config, const std::string& dataset_hash,
                      const std::string& status);

}  // namespace cgvm
