#include "cgvm/element.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cgvm/errors.hpp"

using json = nlohmann::ordered_json;

namespace cgvm {

std::string normalize_label(const std::string& raw,
                            const std::map<std::string, std::string>& synonyms) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (std::isspace(u)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(char(std::tolower(u)));
    }
    // Trailing plural 's', guarded against "-ss" words like "grass".
    if (out.size() > 3 && out.back() == 's' && out[out.size() - 2] != 's') {
        out.pop_back();
    }
    if (auto it = synonyms.find(out); it != synonyms.end()) {
        out = it->second;
    }
    if (out.empty()) {
        throw EmptyAfterNormalization(raw);
    }
    return out;
}

DetectionSet parse_detections(const std::string& text, const std::string& origin_name,
                              double det_threshold) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaViolation(origin_name, std::string("invalid detection JSON: ") + e.what());
    }
    DetectionSet det;
    det.image_id = doc.value("image_id", origin_name);
    const std::string origin = doc.value("origin", "human");
    if (origin == "human") {
        det.origin = DetectionOrigin::HumanAnnotation;
    } else {
        det.origin = DetectionOrigin::Detector;
        det.detector_model = origin;
    }
    if (!doc.contains("instances") || !doc.at("instances").is_array()) {
        throw SchemaViolation(origin_name, "detection file has no 'instances' array");
    }
    for (const json& j : doc.at("instances")) {
        ElementInstance inst;
        inst.label = normalize_label(j.at("label").get<std::string>());
        inst.score = j.value("score", 1.0);
        if (j.contains("bbox") && !j.at("bbox").is_null()) {
            const json& b = j.at("bbox");
            if (!b.is_array() || b.size() != 4) {
                throw SchemaViolation(origin_name, "bbox must be [x, y, w, h]");
            }
            inst.bbox = BoundingBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                                    b[3].get<double>()};
        }
        if (det.origin == DetectionOrigin::Detector && inst.score < det_threshold) {
            continue;
        }
        det.instances.push_back(std::move(inst));
    }
    return det;
}

DetectionSet load_detections(const std::string& path, double det_threshold) {
    std::ifstream in(path);
    if (!in) {
        throw MissingStoredDetections(path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_detections(text, path, det_threshold);
}

void write_detections(const DetectionSet& det, const std::string& path) {
    json doc;
    doc["image_id"] = det.image_id;
    doc["origin"] =
        det.origin == DetectionOrigin::HumanAnnotation ? "human" : det.detector_model;
    doc["instances"] = json::array();
    for (const ElementInstance& inst : det.instances) {
        json j;
        j["label"] = inst.label;
        j["score"] = inst.score;
        if (inst.bbox) {
            j["bbox"] = {inst.bbox->x, inst.bbox->y, inst.bbox->w, inst.bbox->h};
        } else {
            j["bbox"] = nullptr;
        }
        doc["instances"].push_back(j);
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << doc.dump(2) << '\n';
}

namespace {

std::set<std::string> label_set(const DetectionSet& d) {
    std::set<std::string> s;
    for (const ElementInstance& e : d.instances) s.insert(e.label);
    return s;
}

}  // namespace

EpScores ep_scores(const DetectionSet& gt, const DetectionSet& gen) {
    const auto lg = label_set(gt);
    const auto ln = label_set(gen);
    size_t common = 0;
    for (const std::string& l : ln) {
        common += lg.count(l);
    }

    EpScores s;
    if (ln.empty()) {
        s.precision = lg.empty() ? 1.0 : 0.0;
    } else {
        s.precision = double(common) / double(ln.size());
    }
    if (lg.empty()) {
        s.recall = ln.empty() ? 1.0 : 0.0;
    } else {
        s.recall = double(common) / double(lg.size());
    }
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

double iou_box(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

namespace {

// Maximum-sum one-to-one assignment, O(n^3) Hungarian on the negated matrix.
// iou[i][j] is gt instance i vs gen instance j. Returns (gt, gen) pairs.
std::vector<std::pair<int, int>> optimal_matching(const std::vector<std::vector<double>>& iou) {
    const int nr = int(iou.size());
    const int nc = nr ? int(iou[0].size()) : 0;
    const int n = std::max(nr, nc);
    if (n == 0) return {};
    // Pad to square with zero gain.
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) cost[i + 1][j + 1] = -iou[i][j];

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, 1e18);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = -1;
            double delta = 1e18;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<std::pair<int, int>> pairs;
    for (int j = 1; j <= n; ++j) {
        int i = p[j];
        if (i >= 1 && i <= nr && j <= nc) pairs.emplace_back(i - 1, j - 1);
    }
    return pairs;
}

// Greedy descending-IoU matching; ties broken by lower gt index, then
// lower gen index, so results are deterministic.
std::vector<std::pair<int, int>> greedy_matching(const std::vector<std::vector<double>>& iou) {
    struct Cand {
        double v;
        int gt, gen;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < int(iou.size()); ++i)
        for (int j = 0; j < int(iou[i].size()); ++j) cands.push_back({iou[i][j], i, j});
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.v != b.v) return a.v > b.v;
        if (a.gt != b.gt) return a.gt < b.gt;
        return a.gen < b.gen;
    });
    std::vector<char> gt_used(iou.size(), false);
    std::vector<char> gen_used(iou.empty() ? 0 : iou[0].size(), false);
    std::vector<std::pair<int, int>> pairs;
    for (const Cand& c : cands) {
        if (gt_used[c.gt] || gen_used[c.gen]) continue;
        gt_used[c.gt] = true;
        gen_used[c.gen] = true;
        pairs.emplace_back(c.gt, c.gen);
    }
    return pairs;
}

using ByClass = std::map<std::string, std::vector<BoundingBox>>;

ByClass boxes_by_class(const DetectionSet& d) {
    ByClass out;
    for (const ElementInstance& e : d.instances) {
        if (!e.bbox) {
            throw MissingBoxes(d.image_id);
        }
        out[e.label].push_back(*e.bbox);
    }
    return out;
}

}  // namespace

std::optional<double> iou_variant(const DetectionSet& gt, const DetectionSet& gen,
                                  IouVariant variant, MatchStrategy strategy,
                                  IouAveraging averaging) {
    const ByClass gt_boxes = boxes_by_class(gt);
    const ByClass gen_boxes = boxes_by_class(gen);

    // Per-class matched-pair scores plus the unmatched counts on each side.
    struct ClassResult {
        std::vector<double> matched;
        size_t gt_count = 0;
        size_t gen_count = 0;
        bool in_both = false;
    };
    std::map<std::string, ClassResult> results;
    for (const auto& [label, boxes] : gt_boxes) results[label].gt_count = boxes.size();
    for (const auto& [label, boxes] : gen_boxes) results[label].gen_count = boxes.size();

    for (auto& [label, res] : results) {
        res.in_both = res.gt_count > 0 && res.gen_count > 0;
        if (!res.in_both) continue;
        const auto& gb = gt_boxes.at(label);
        const auto& nb = gen_boxes.at(label);
        std::vector<std::vector<double>> mat(gb.size(), std::vector<double>(nb.size()));
        for (size_t i = 0; i < gb.size(); ++i)
            for (size_t j = 0; j < nb.size(); ++j) mat[i][j] = iou_box(gb[i], nb[j]);
        auto pairs = strategy == MatchStrategy::Greedy ? greedy_matching(mat)
                                                       : optimal_matching(mat);
        for (auto [i, j] : pairs) res.matched.push_back(mat[i][j]);
    }

    // Instance scores for the variant's basis in each class.
    std::vector<double> class_scores;
    std::vector<double> instance_scores;
    for (const auto& [label, res] : results) {
        std::vector<double> basis;
        switch (variant) {
            case IouVariant::Common:
                if (!res.in_both) continue;
                basis = res.matched;
                break;
            case IouVariant::Precision:
                if (res.gen_count == 0) continue;
                basis = res.matched;
                basis.resize(res.gen_count, 0.0);  // unmatched gen instances score 0
                break;
            case IouVariant::Recall:
                if (res.gt_count == 0) continue;
                basis = res.matched;
                basis.resize(res.gt_count, 0.0);  // unmatched gt instances score 0
                break;
        }
        if (basis.empty()) continue;
        double sum = 0.0;
        for (double v : basis) sum += v;
        class_scores.push_back(sum / double(basis.size()));
        instance_scores.insert(instance_scores.end(), basis.begin(), basis.end());
    }

    const std::vector<double>& pool =
        averaging == IouAveraging::PerClass ? class_scores : instance_scores;
    if (pool.empty()) {
        if (variant == IouVariant::Common) {
            return std::nullopt;  // undefined: no class present in both images
        }
        return 0.0;
    }
    double sum = 0.0;
    for (double v : pool) sum += v;
    return sum / double(pool.size());
}

}  // namespace cgvm
