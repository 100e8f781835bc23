#pragma once

#include <json.hpp>

#include "cgvm/pipeline.hpp"

namespace cgvm::detail {

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["run_id"] = c.run_id;
    j["dataset_root"] = c.dataset_root;
    j["side"] = c.side;
    j["grid_size"] = c.grid_size;
    j["metrics"] = std::vector<std::string>(c.metrics.begin(), c.metrics.end());
    j["ssim_window"] = c.ssim_window == SsimWindow::Global ? "global" : "gaussian11";
    j["uqi_mode"] = c.uqi_mode == UqiMode::Global ? "global" : "windowed8x8";
    j["iou_matching"] = c.iou_matching == MatchStrategy::Greedy ? "greedy" : "optimal";
    j["iou_averaging"] = c.iou_averaging == IouAveraging::PerClass ? "class" : "instance";
    j["det_threshold"] = c.det_threshold;
    j["brisque_model"] = c.brisque_model_path;
    j["embed_store"] = c.embed_store_path;
    j["offline"] = c.offline;
    j["literal_paper_formulas"] = c.literal_paper_formulas;
    if (c.seed) {
        j["seed"] = *c.seed;
    } else {
        j["seed"] = nullptr;
    }
    return j;
}

}  // namespace cgvm::detail
