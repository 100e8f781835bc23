#include "cgvm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "cgvm/brisque.hpp"
#include "cgvm/errors.hpp"
#include "cgvm/image.hpp"
#include "cgvm/report.hpp"
#include "cgvm/sha256.hpp"
#include "internal_config_json.hpp"

namespace fs = std::filesystem;

namespace cgvm {

std::string summarize(const Sample& sample, int upto, SummarizerClient& client) {
    return client.summarize(sample, upto);
}

namespace {

std::vector<uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path);
    }
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

std::string artifact_path(const std::string& run_dir, const std::string& sample_id,
                          const std::string& name) {
    return (fs::path(run_dir) / sample_id / name).string();
}

// Stored-or-remote image acquisition; the encoded bytes are kept because
// clip keys embeddings by content hash of the artifact on disk.
std::vector<uint8_t> acquire_image_bytes(const GenRequest& req, GeneratorClient& client,
                                         const std::string& run_dir) {
    const std::string path =
        artifact_path(run_dir, req.sample_id, "hop_" + std::to_string(req.hop) + ".png");
    if (fs::is_regular_file(path)) {
        return read_bytes(path);
    }
    std::vector<uint8_t> bytes = client.generate(req);
    if (client.is_remote()) {
        fs::create_directories(fs::path(path).parent_path());
        write_bytes(path, bytes);  // persist before returning: crash-safe resume
    }
    return bytes;
}

}  // namespace

RgbImage generate_image(const GenRequest& req, GeneratorClient& client,
                        const std::string& run_dir) {
    if (req.summary.empty() && client.is_remote()) {
        throw Error("refusing to send an empty prompt for " + req.sample_id);
    }
    auto bytes = acquire_image_bytes(req, client, run_dir);
    return decode_bytes(bytes, req.sample_id + " hop " + std::to_string(req.hop));
}

void write_run_record(const RunConfig& config, const std::string& dataset_hash,
                      const std::string& status) {
    nlohmann::ordered_json j;
    j["run_id"] = config.run_id;
    j["dataset_hash"] = dataset_hash;
    j["status"] = status;
    j["config"] = detail::config_to_json(config);
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["updated_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    fs::create_directories(config.run_dir);
    std::ofstream out(fs::path(config.run_dir) / "run.json");
    out << j.dump(2) << '\n';
}

namespace {

const std::vector<std::string>& metric_order() {
    static const std::vector<std::string> order = {
        "mse",       "psnr",         "ssim",          "ssim_luminance",
        "ssim_contrast", "ssim_structure", "uqi",     "brisque",
        "clip",      "ep_precision", "ep_recall",     "ep_f1",
        "iou_common", "iou_precision", "iou_recall"};
    return order;
}

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct SampleResult {
    std::vector<ReportRow> rows;
    std::vector<EvalError> errors;
    std::vector<std::string> flags;
    std::map<std::string, std::vector<double>> per_metric;  // metric -> per-hop values
};

DetectionSet ground_truth_detections(const Sample& sample, double sx, double sy) {
    DetectionSet det;
    det.image_id = sample.id;
    det.origin = DetectionOrigin::HumanAnnotation;
    for (const ElementInstance& e : sample.metadata.elements) {
        ElementInstance inst;
        inst.label = normalize_label(e.label);
        inst.score = 1.0;
        if (e.bbox) {
            inst.bbox = BoundingBox{e.bbox->x * sx, e.bbox->y * sy, e.bbox->w * sx,
                                    e.bbox->h * sy};
        }
        det.instances.push_back(std::move(inst));
    }
    return det;
}

class SampleEvaluator {
public:
    SampleEvaluator(const Dataset& dataset, const RunConfig& config, PipelineClients& clients,
                    const SvrModel* brisque_model, ClipScorer* clip)
        : dataset_(dataset),
          config_(config),
          clients_(clients),
          brisque_model_(brisque_model),
          clip_(clip) {}

    SampleResult evaluate(const Sample& sample) const {
        SampleResult res;
        const int hops = int(sample.hops.size());
        for (const std::string& m : metric_order()) {
            res.per_metric[m].assign(size_t(hops), kMissing);
        }

        const std::string gt_path = dataset_.image_file(sample);
        const std::vector<uint8_t> gt_bytes = read_bytes(gt_path);
        const RgbImage gt_raw = decode(gt_path);
        const RgbImage gt_std = standardize(gt_raw, config_.side);
        const ImagePlane gt_luma = to_luma(gt_std);
        const double sx = double(config_.side) / gt_raw.width;
        const double sy = double(config_.side) / gt_raw.height;

        const bool want_ep = config_.metrics.count("ep") > 0;
        const bool want_iou = config_.metrics.count("iou") > 0;
        DetectionSet gt_det;
        if (want_ep || want_iou) {
            gt_det = ground_truth_detections(sample, sx, sy);
        }

        for (int k = 1; k <= hops; ++k) {
            ensure_summary(sample, k, res);

            std::vector<uint8_t> gen_bytes;
            RgbImage gen_std;
            try {
                GenRequest req{sample.id, k, summary_text(sample, k), config_.side, config_.side,
                               config_.seed};
                gen_bytes = acquire_image_bytes(req, *clients_.generator, config_.run_dir);
                gen_std = standardize(
                    decode_bytes(gen_bytes, sample.id + " hop " + std::to_string(k)),
                    config_.side);
            } catch (const Error& e) {
                res.errors.push_back({sample.id, k, "generate", e.what()});
                continue;  // no image, no metrics for this hop
            }
            const ImagePlane gen_luma = to_luma(gen_std);

            const FormulaMode mode = config_.literal_paper_formulas ? FormulaMode::LiteralPaper
                                                                    : FormulaMode::Standard;
            if (config_.metrics.count("psnr")) {
                run_metric(res, sample, k, "mse",
                           [&] { return mse(gt_luma, gen_luma, mode); });
                try {
                    PsnrValue p = psnr(gt_luma, gen_luma, mode);
                    if (p.infinite) {
                        res.rows.push_back({sample.id, to_string(sample.category), k, "psnr", 0.0,
                                            true});
                        res.per_metric["psnr"][k - 1] = std::numeric_limits<double>::infinity();
                    } else {
                        res.rows.push_back(
                            {sample.id, to_string(sample.category), k, "psnr", p.db, false});
                        res.per_metric["psnr"][k - 1] = p.db;
                    }
                } catch (const Error& e) {
                    res.errors.push_back({sample.id, k, "psnr", e.what()});
                }
            }
            if (config_.metrics.count("ssim")) {
                try {
                    SsimParams params;
                    params.window = config_.ssim_window;
                    SsimBreakdown b = ssim(gt_luma, gen_luma, params);
                    emit(res, sample, k, "ssim", b.ssim);
                    emit(res, sample, k, "ssim_luminance", b.luminance);
                    emit(res, sample, k, "ssim_contrast", b.contrast);
                    emit(res, sample, k, "ssim_structure", b.structure);
                } catch (const Error& e) {
                    res.errors.push_back({sample.id, k, "ssim", e.what()});
                }
            }
            if (config_.metrics.count("uqi")) {
                run_metric(res, sample, k, "uqi",
                           [&] { return uqi(gt_luma, gen_luma, config_.uqi_mode); });
            }
            if (config_.metrics.count("brisque")) {
                run_metric(res, sample, k, "brisque",
                           [&] { return brisque_score(gen_luma, *brisque_model_); });
            }
            if (config_.metrics.count("clip")) {
                run_metric(res, sample, k, "clip",
                           [&] { return clip_->score(gt_bytes, gen_bytes); });
            }
            if (want_ep || want_iou) {
                evaluate_elements(res, sample, k, gt_det, gen_bytes, want_ep, want_iou);
            }
        }
        return res;
    }

private:
    std::string summary_text(const Sample& sample, int k) const {
        const std::string path =
            artifact_path(config_.run_dir, sample.id, "summary_" + std::to_string(k) + ".txt");
        if (fs::is_regular_file(path)) {
            std::ifstream in(path);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        }
        return {};
    }

    void ensure_summary(const Sample& sample, int k, SampleResult& res) const {
        const std::string path =
            artifact_path(config_.run_dir, sample.id, "summary_" + std::to_string(k) + ".txt");
        if (fs::is_regular_file(path)) {
            return;
        }
        try {
            std::string text = clients_.summarizer->summarize(sample, k);
            fs::create_directories(fs::path(path).parent_path());
            std::ofstream out(path);
            out << text;
        } catch (const Error& e) {
            res.errors.push_back({sample.id, k, "summarize", e.what()});
        }
    }

    void evaluate_elements(SampleResult& res, const Sample& sample, int k,
                           const DetectionSet& gt_det, const std::vector<uint8_t>& gen_bytes,
                           bool want_ep, bool want_iou) const {
        DetectionSet gen_det;
        try {
            const std::string det_path =
                artifact_path(config_.run_dir, sample.id, "det_" + std::to_string(k) + ".json");
            if (fs::is_regular_file(det_path)) {
                gen_det = load_detections(det_path, config_.det_threshold);
            } else {
                gen_det = clients_.detector->detect(sample.id, k, gen_bytes);
                if (clients_.detector->is_remote()) {
                    fs::create_directories(fs::path(det_path).parent_path());
                    write_detections(gen_det, det_path);
                }
            }
        } catch (const Error& e) {
            res.errors.push_back({sample.id, k, "detect", e.what()});
            return;
        }

        if (want_ep) {
            try {
                EpScores s = ep_scores(gt_det, gen_det);
                emit(res, sample, k, "ep_precision", s.precision);
                emit(res, sample, k, "ep_recall", s.recall);
                emit(res, sample, k, "ep_f1", s.f1);
            } catch (const Error& e) {
                res.errors.push_back({sample.id, k, "ep", e.what()});
            }
        }
        if (want_iou) {
            try {
                auto common = iou_variant(gt_det, gen_det, IouVariant::Common,
                                          config_.iou_matching, config_.iou_averaging);
                if (common) {
                    emit(res, sample, k, "iou_common", *common);
                } else {
                    res.flags.push_back("iou_common undefined (no shared classes) for " +
                                        sample.id + " hop " + std::to_string(k));
                }
                emit(res, sample, k, "iou_precision",
                     *iou_variant(gt_det, gen_det, IouVariant::Precision, config_.iou_matching,
                                  config_.iou_averaging));
                emit(res, sample, k, "iou_recall",
                     *iou_variant(gt_det, gen_det, IouVariant::Recall, config_.iou_matching,
                                  config_.iou_averaging));
            } catch (const Error& e) {
                res.errors.push_back({sample.id, k, "iou", e.what()});
            }
        }
    }

    template <typename Fn>
    void run_metric(SampleResult& res, const Sample& sample, int k, const std::string& name,
                    Fn fn) const {
        try {
            emit(res, sample, k, name, fn());
        } catch (const Error& e) {
            res.errors.push_back({sample.id, k, name, e.what()});
        }
    }

    void emit(SampleResult& res, const Sample& sample, int k, const std::string& name,
              double value) const {
        res.rows.push_back({sample.id, to_string(sample.category), k, name, value, false});
        res.per_metric[name][k - 1] = value;
    }

    const Dataset& dataset_;
    const RunConfig& config_;
    PipelineClients& clients_;
    const SvrModel* brisque_model_;
    ClipScorer* clip_;
};

}  // namespace

EvalReport evaluate_run(const Dataset& dataset, const RunConfig& config,
                        PipelineClients& clients) {
    if (config.metrics.count("brisque") && config.brisque_model_path.empty()) {
        throw ConfigError("brisque requested but no model path configured");
    }
    if (config.metrics.count("clip") && !clients.embedder) {
        throw ConfigError("clip requested but no embedding provider configured");
    }
    if (!clients.generator) {
        throw ConfigError("no image generator client configured");
    }

    EvalReport report;
    report.config = config;
    report.dataset_hash = sha256_file((fs::path(dataset.root) / "manifest.json").string());

    fs::create_directories(config.run_dir);
    write_run_record(config, report.dataset_hash, "running");

    SvrModel brisque_model;
    if (config.metrics.count("brisque")) {
        brisque_model = load_svr_model(config.brisque_model_path);
    }
    std::optional<ClipScorer> clip;
    if (config.metrics.count("clip")) {
        clip.emplace(clients.embedder);
    }

    // Fixed evaluation order keeps every report file byte-stable.
    std::vector<const Sample*> ordered;
    for (const Sample& s : dataset.samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const Sample* a, const Sample* b) { return a->id < b->id; });

    SampleEvaluator evaluator(dataset, config, clients, &brisque_model,
                              clip ? &*clip : nullptr);

    std::vector<SampleResult> results(ordered.size());
    const int jobs = config.jobs > 0 ? config.jobs
                                     : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < ordered.size(); i = next.fetch_add(1)) {
            try {
                results[i] = evaluator.evaluate(*ordered[i]);
            } catch (const std::exception& e) {
                results[i].errors.push_back({ordered[i]->id, 0, "sample", e.what()});
            }
        }
    };
    if (jobs <= 1 || ordered.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < std::min(size_t(jobs), ordered.size()); ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) t.join();
    }

    for (size_t i = 0; i < ordered.size(); ++i) {
        const Sample& s = *ordered[i];
        SampleResult& r = results[i];
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
        report.errors.insert(report.errors.end(), r.errors.begin(), r.errors.end());
        report.flags.insert(report.flags.end(), r.flags.begin(), r.flags.end());
        for (const std::string& m : metric_order()) {
            const auto& values = r.per_metric[m];
            bool any = std::any_of(values.begin(), values.end(),
                                   [](double v) { return !std::isnan(v); });
            if (!any) continue;
            MetricSeries series;
            series.sample_id = s.id;
            series.metric_name = m;
            series.per_hop = values;
            series = normalize_hops(series, config.grid_size);
            report.series.push_back(std::move(series));
            report.series_categories.push_back(to_string(s.category));
        }
    }

    if (!report.series.empty()) {
        report.corpus_agg = aggregate(report.series, GroupBy::Corpus);
        report.category_agg =
            aggregate(report.series, GroupBy::Category, report.series_categories);
        for (const AggregateRow& row : aggregate(report.series, GroupBy::GridPoint)) {
            report.grid_agg.emplace_back("corpus", row);
        }
        // Per-category hop curves.
        std::set<std::string> cats(report.series_categories.begin(),
                                   report.series_categories.end());
        for (const std::string& cat : cats) {
            std::vector<MetricSeries> subset;
            for (size_t i = 0; i < report.series.size(); ++i) {
                if (report.series_categories[i] == cat) subset.push_back(report.series[i]);
            }
            for (const AggregateRow& row : aggregate(subset, GroupBy::GridPoint)) {
                report.grid_agg.emplace_back(cat, row);
            }
        }
    }

    write_report_files(report, config.run_dir);
    write_run_record(config, report.dataset_hash, report.errors.empty() ? "complete" : "partial");
    return report;
}

}  // namespace cgvm
