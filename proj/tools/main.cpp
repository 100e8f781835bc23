#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgvm/clients.hpp"
#include "cgvm/dataset.hpp"
#include "cgvm/errors.hpp"
#include "cgvm/pipeline.hpp"
#include "cgvm/report.hpp"

namespace fs = std::filesystem;
using namespace cgvm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

std::string env_or(const char* name, const std::string& fallback = "") {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

/// Throws EmbeddingMissing on every lookup; selected when clip is requested
/// without a store or service, so the failure lands in errors.json.
class NoEmbeddings : public EmbeddingProvider {
public:
    Embedding embed(const std::vector<uint8_t>&, const std::string& hash) override {
        throw EmbeddingMissing(hash);
    }
    std::string model_id() const override { return "none"; }
};

struct CliOptions {
    std::string dataset_root;
    std::string run_id = "run";
    std::string runs_dir = "runs";
    std::string metrics_csv = "psnr,ssim,uqi,brisque,clip,ep,iou";
    bool offline = false;
    int side = 512;
    int grid = 11;
    std::string ssim_window = "gaussian11";
    std::string uqi_mode = "windowed8x8";
    std::string iou_matching = "greedy";
    std::string iou_averaging = "class";
    double det_threshold = 0.7;
    std::string brisque_model;
    std::string embed_store;
    bool literal_paper_formulas = false;
    int jobs = 0;
    int64_t seed = -1;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--dataset", o.dataset_root, "dataset root directory")->required();
    cmd->add_option("--run-id", o.run_id, "run identifier");
    cmd->add_option("--runs-dir", o.runs_dir, "directory holding run artifacts");
    cmd->add_flag("--offline", o.offline, "forbid all remote clients");
    cmd->add_option("--side", o.side, "standardized square image side");
    cmd->add_option("--jobs", o.jobs, "worker threads (0: logical cores)");
    cmd->add_option("--seed", o.seed, "generation seed recorded in run.json");
}

void add_eval_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--metrics", o.metrics_csv,
                    "comma list from: psnr,ssim,uqi,brisque,clip,ep,iou");
    cmd->add_option("--grid", o.grid, "normalized-hop grid size");
    cmd->add_option("--ssim-window", o.ssim_window, "gaussian11 | global");
    cmd->add_option("--uqi-mode", o.uqi_mode, "windowed8x8 | global");
    cmd->add_option("--iou-matching", o.iou_matching, "greedy | optimal");
    cmd->add_option("--iou-averaging", o.iou_averaging, "class | instance");
    cmd->add_option("--det-threshold", o.det_threshold, "detector confidence threshold");
    cmd->add_option("--brisque-model", o.brisque_model,
                    "SVR model file (default: env CGVM_BRISQUE_MODEL)");
    cmd->add_option("--embed-store", o.embed_store, "embedding store file for clip");
    cmd->add_flag("--literal-paper-formulas", o.literal_paper_formulas,
                  "use the uncorrected printed PSNR/MSE formulas");
}

RunConfig build_config(const CliOptions& o) {
    RunConfig c;
    c.run_id = o.run_id;
    c.run_dir = (fs::path(o.runs_dir) / o.run_id).string();
    c.dataset_root = o.dataset_root;
    c.side = o.side;
    c.grid_size = o.grid;
    c.metrics.clear();
    static const std::set<std::string> known = {"psnr", "ssim", "uqi",  "brisque",
                                                "clip", "ep",   "iou"};
    std::stringstream ss(o.metrics_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (!known.count(item)) {
            throw ConfigError("unknown metric '" + item + "'");
        }
        c.metrics.insert(item);
    }
    if (c.metrics.empty()) {
        throw ConfigError("no metrics selected");
    }

    if (o.ssim_window == "global") {
        c.ssim_window = SsimWindow::Global;
    } else if (o.ssim_window == "gaussian11") {
        c.ssim_window = SsimWindow::Gaussian11x11Sigma1_5;
    } else {
        throw ConfigError("unknown --ssim-window '" + o.ssim_window + "'");
    }
    if (o.uqi_mode == "global") {
        c.uqi_mode = UqiMode::Global;
    } else if (o.uqi_mode == "windowed8x8") {
        c.uqi_mode = UqiMode::Windowed8x8;
    } else {
        throw ConfigError("unknown --uqi-mode '" + o.uqi_mode + "'");
    }
    if (o.iou_matching == "optimal") {
        c.iou_matching = MatchStrategy::Optimal;
    } else if (o.iou_matching == "greedy") {
        c.iou_matching = MatchStrategy::Greedy;
    } else {
        throw ConfigError("unknown --iou-matching '" + o.iou_matching + "'");
    }
    if (o.iou_averaging == "instance") {
        c.iou_averaging = IouAveraging::PerInstance;
    } else if (o.iou_averaging == "class") {
        c.iou_averaging = IouAveraging::PerClass;
    } else {
        throw ConfigError("unknown --iou-averaging '" + o.iou_averaging + "'");
    }
    c.det_threshold = o.det_threshold;
    c.brisque_model_path =
        !o.brisque_model.empty() ? o.brisque_model : env_or("CGVM_BRISQUE_MODEL");
    c.embed_store_path = o.embed_store;
    c.offline = o.offline;
    c.literal_paper_formulas = o.literal_paper_formulas;
    c.jobs = o.jobs;
    if (o.seed >= 0) {
        c.seed = uint64_t(o.seed);
    }

    if (c.offline) {
        for (const char* var : {"CGVM_LLM_URL", "CGVM_T2I_URL", "CGVM_DET_URL", "CGVM_EMBED_URL"}) {
            if (!env_or(var).empty()) {
                throw ConfigError(std::string("--offline contradicts ") + var);
            }
        }
    }
    return c;
}

PipelineClients build_clients(const RunConfig& c) {
    PipelineClients clients;

    const std::string llm_url = c.offline ? "" : env_or("CGVM_LLM_URL");
    if (!llm_url.empty()) {
        clients.summarizer = std::make_shared<RemoteTextService>(
            llm_url, env_or("CGVM_LLM_KEY"), env_or("CGVM_LLM_MODEL", "text-davinci-003"));
    } else {
        clients.summarizer = std::make_shared<StoredSummaries>();
    }

    const std::string t2i_url = c.offline ? "" : env_or("CGVM_T2I_URL");
    if (!t2i_url.empty()) {
        clients.generator = std::make_shared<RemoteImageService>(t2i_url, env_or("CGVM_T2I_KEY"));
    } else {
        clients.generator = std::make_shared<StoredImages>(c.run_dir);
    }

    const std::string det_url = c.offline ? "" : env_or("CGVM_DET_URL");
    if (!det_url.empty()) {
        clients.detector = std::make_shared<RemoteDetector>(det_url, c.det_threshold);
    } else {
        clients.detector = std::make_shared<StoredDetections>(c.run_dir, c.det_threshold);
    }

    if (c.metrics.count("clip")) {
        const std::string embed_url = c.offline ? "" : env_or("CGVM_EMBED_URL");
        if (!c.embed_store_path.empty()) {
            clients.embedder = std::make_shared<FileStoreProvider>(c.embed_store_path);
        } else if (!embed_url.empty()) {
            clients.embedder =
                std::make_shared<RemoteEmbeddingProvider>(embed_url, env_or("CGVM_EMBED_TOKEN"));
        } else {
            clients.embedder = std::make_shared<NoEmbeddings>();
        }
    }
    return clients;
}

int cmd_validate(const std::string& root) {
    auto problems = validate_dataset(root);
    if (problems.empty()) {
        std::cout << "dataset OK: " << root << "\n";
        return kExitOk;
    }
    for (const std::string& p : problems) {
        std::cerr << "error: " << p << "\n";
    }
    return kExitConfig;
}

int cmd_stats(const std::string& root, const std::string& out_dir) {
    Dataset d = load_dataset(root);
    StatsReport stats = dataset_stats(d);
    write_stats_files(stats, out_dir);
    std::cout << "samples: " << stats.sample_count << "\n";
    std::cout << "conversation lengths:";
    for (const auto& [len, count] : stats.conversation_length_histogram) {
        std::cout << " " << len << ":" << count;
    }
    std::cout << "\nwrote stats CSVs to " << out_dir << "\n";
    return kExitOk;
}

// Runs a single pipeline stage over the whole corpus.
enum class Stage { Summarize, Generate, Detect };

int cmd_stage(Stage stage, const CliOptions& opts) {
    RunConfig c = build_config(opts);
    PipelineClients clients = build_clients(c);
    Dataset d = load_dataset(c.dataset_root);
    fs::create_directories(c.run_dir);
    int failures = 0;
    for (const Sample& s : d.samples) {
        for (int k = 1; k <= int(s.hops.size()); ++k) {
            try {
                const fs::path dir = fs::path(c.run_dir) / s.id;
                fs::create_directories(dir);
                if (stage == Stage::Summarize) {
                    const fs::path p = dir / ("summary_" + std::to_string(k) + ".txt");
                    if (!fs::exists(p)) {
                        std::ofstream(p) << summarize(s, k, *clients.summarizer);
                    }
                } else {
                    std::string summary;
                    {
                        const fs::path p = dir / ("summary_" + std::to_string(k) + ".txt");
                        if (fs::exists(p)) {
                            std::ifstream in(p);
                            summary.assign(std::istreambuf_iterator<char>(in),
                                           std::istreambuf_iterator<char>());
                        }
                    }
                    GenRequest req{s.id, k, summary, c.side, c.side, c.seed};
                    if (stage == Stage::Generate) {
                        generate_image(req, *clients.generator, c.run_dir);
                    } else {
                        const fs::path p = dir / ("det_" + std::to_string(k) + ".json");
                        if (!fs::exists(p)) {
                            std::ifstream img(dir / ("hop_" + std::to_string(k) + ".png"),
                                              std::ios::binary);
                            std::vector<uint8_t> bytes(
                                (std::istreambuf_iterator<char>(img)),
                                std::istreambuf_iterator<char>());
                            DetectionSet det = clients.detector->detect(s.id, k, bytes);
                            write_detections(det, p.string());
                        }
                    }
                }
            } catch (const Error& e) {
                std::cerr << "error: " << s.id << " hop " << k << ": " << e.what() << "\n";
                ++failures;
            }
        }
    }
    return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_eval(const CliOptions& opts) {
    RunConfig c = build_config(opts);
    PipelineClients clients = build_clients(c);
    Dataset d = load_dataset(c.dataset_root);
    EvalReport report = evaluate_run(d, c, clients);
    std::cout << render_aggregate_table(report);
    std::cout << "report files written to " << c.run_dir << "\n";
    if (!report.errors.empty()) {
        std::cerr << report.errors.size() << " evaluation error(s); see errors.json\n";
        return kExitPartial;
    }
    return kExitOk;
}

// Re-derives aggregates and plot data from an existing run's report.csv.
int cmd_report(const CliOptions& opts) {
    RunConfig c = build_config(opts);
    const fs::path csv_path = fs::path(c.run_dir) / "report.csv";
    std::ifstream in(csv_path);
    if (!in) {
        throw ConfigError("no report.csv under " + c.run_dir + "; run eval first");
    }

    Dataset d = load_dataset(c.dataset_root);
    std::map<std::string, std::string> category_of;
    for (const Sample& s : d.samples) category_of[s.id] = to_string(s.category);

    // (sample, metric) -> hop-indexed values
    std::map<std::pair<std::string, std::string>, std::map<int, double>> values;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string sample, category, hop_s, metric, value_s;
        std::getline(ss, sample, ',');
        std::getline(ss, category, ',');
        std::getline(ss, hop_s, ',');
        std::getline(ss, metric, ',');
        std::getline(ss, value_s, ',');
        double v = value_s == "inf" ? std::numeric_limits<double>::infinity()
                                    : std::stod(value_s);
        values[{sample, metric}][std::stoi(hop_s)] = v;
    }

    EvalReport report;
    report.config = c;
    for (const auto& [key, hop_values] : values) {
        MetricSeries series;
        series.sample_id = key.first;
        series.metric_name = key.second;
        const int max_hop = hop_values.rbegin()->first;
        series.per_hop.assign(max_hop, std::numeric_limits<double>::quiet_NaN());
        for (const auto& [hop, v] : hop_values) series.per_hop[hop - 1] = v;
        report.series.push_back(normalize_hops(series, c.grid_size));
        report.series_categories.push_back(category_of[key.first]);
    }
    if (report.series.empty()) {
        throw ConfigError("report.csv has no rows");
    }
    report.corpus_agg = aggregate(report.series, GroupBy::Corpus);
    report.category_agg = aggregate(report.series, GroupBy::Category, report.series_categories);
    for (const AggregateRow& row : aggregate(report.series, GroupBy::GridPoint)) {
        report.grid_agg.emplace_back("corpus", row);
    }
    std::cout << render_aggregate_table(report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ConvGenVisMo: evaluation toolkit for conversational generative vision models"};
    app.require_subcommand(1);

    CliOptions opts;

    std::string validate_root;
    auto* validate = app.add_subcommand("validate", "validate a dataset manifest");
    validate->add_option("--dataset", validate_root, "dataset root directory")->required();

    std::string stats_root, stats_out = "stats";
    auto* stats = app.add_subcommand("stats", "emit corpus statistics CSVs");
    stats->add_option("--dataset", stats_root, "dataset root directory")->required();
    stats->add_option("--out", stats_out, "output directory");

    auto* summarize_cmd = app.add_subcommand("summarize", "stage 1: conversation summaries");
    add_common_options(summarize_cmd, opts);

    auto* generate_cmd = app.add_subcommand("generate", "stage 2: images from summaries");
    add_common_options(generate_cmd, opts);

    auto* detect_cmd = app.add_subcommand("detect", "stage 3a: object detection on images");
    add_common_options(detect_cmd, opts);
    detect_cmd->add_option("--det-threshold", opts.det_threshold,
                           "detector confidence threshold");

    auto* eval_cmd = app.add_subcommand("eval", "stage 3: metrics, series and reports");
    add_common_options(eval_cmd, opts);
    add_eval_options(eval_cmd, opts);

    auto* report_cmd = app.add_subcommand("report", "re-derive aggregates from report.csv");
    add_common_options(report_cmd, opts);
    add_eval_options(report_cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_root);
        if (stats->parsed()) return cmd_stats(stats_root, stats_out);
        if (summarize_cmd->parsed()) return cmd_stage(Stage::Summarize, opts);
        if (generate_cmd->parsed()) return cmd_stage(Stage::Generate, opts);
        if (detect_cmd->parsed()) return cmd_stage(Stage::Detect, opts);
        if (eval_cmd->parsed()) return cmd_eval(opts);
        if (report_cmd->parsed()) return cmd_report(opts);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
