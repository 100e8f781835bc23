#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cgvm/element.hpp"
#include "cgvm/errors.hpp"
#include "helpers.hpp"

using namespace cgvm;

namespace {

DetectionSet set_of(std::initializer_list<std::string> labels) {
    DetectionSet s;
    for (const auto& l : labels) s.instances.push_back({l, std::nullopt, 1.0});
    return s;
}

DetectionSet boxes_of(std::initializer_list<std::pair<std::string, BoundingBox>> items) {
    DetectionSet s;
    for (const auto& [label, box] : items) s.instances.push_back({label, box, 1.0});
    return s;
}

/// Counts unit lattice cells for integer-coordinate boxes; exact by construction.
double rasterized_iou(const BoundingBox& a, const BoundingBox& b) {
    int inter = 0, uni = 0;
    const int x0 = int(std::min(a.x, b.x)), x1 = int(std::max(a.x + a.w, b.x + b.w));
    const int y0 = int(std::min(a.y, b.y)), y1 = int(std::max(a.y + a.h, b.y + b.h));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
            const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : double(inter) / uni;
}

}  // namespace

TEST_CASE("label normalization: trim, casefold, collapse, deplural") {
    CHECK(normalize_label("  Dogs ") == "dog");
    CHECK(normalize_label("Ice   Cream") == "ice cream");
    CHECK(normalize_label("GLASS") == "glass");     // -ss guard
    CHECK(normalize_label("bus") == "bus");          // too short to strip
    CHECK(normalize_label("Trees") == "tree");
    CHECK_THROWS_AS(normalize_label("   "), EmptyAfterNormalization);
}

TEST_CASE("label normalization applies synonyms after the rules") {
    const std::map<std::string, std::string> syn = {{"puppy", "dog"}};
    CHECK(normalize_label("Puppys", syn) == "dog");
    CHECK(normalize_label("cat", syn) == "cat");
}

TEST_CASE("element presence on the worked three-label case") {
    const auto gt = set_of({"girl", "snow", "dog"});
    const auto gen = set_of({"girl", "snow", "tree"});
    const EpScores s = ep_scores(gt, gen);
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(2.0 / 3.0));
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("element presence works on distinct labels, not instances") {
    const auto gt = set_of({"star", "star", "robot"});
    const auto gen = set_of({"star", "robot", "robot", "robot"});
    const EpScores s = ep_scores(gt, gen);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
}

TEST_CASE("element presence degenerate conventions") {
    const auto none = set_of({});
    const auto some = set_of({"dog"});
    // both empty: perfect agreement
    CHECK(ep_scores(none, none).precision == 1.0);
    CHECK(ep_scores(none, none).recall == 1.0);
    CHECK(ep_scores(none, none).f1 == 1.0);
    // generated empty, truth not: nothing asserted, nothing found
    CHECK(ep_scores(some, none).precision == 0.0);
    CHECK(ep_scores(some, none).recall == 0.0);
    CHECK(ep_scores(some, none).f1 == 0.0);
    // truth empty, generated not: every assertion is spurious
    CHECK(ep_scores(none, some).precision == 0.0);
    CHECK(ep_scores(none, some).recall == 0.0);
}

TEST_CASE("precision and recall swap when the arguments swap") {
    std::mt19937 rng(29);
    const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
    std::uniform_int_distribution<int> count(0, 5);
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 1000; ++i) {
        DetectionSet x, y;
        for (int k = count(rng); k > 0; --k) x.instances.push_back({pool[pick(rng)], {}, 1.0});
        for (int k = count(rng); k > 0; --k) y.instances.push_back({pool[pick(rng)], {}, 1.0});
        const EpScores fwd = ep_scores(x, y);
        const EpScores rev = ep_scores(y, x);
        CHECK(fwd.precision == doctest::Approx(rev.recall).epsilon(1e-12));
        CHECK(fwd.recall == doctest::Approx(rev.precision).epsilon(1e-12));
        CHECK(fwd.f1 == doctest::Approx(rev.f1).epsilon(1e-12));
    }
}

TEST_CASE("box IoU matches a pixel rasterization oracle") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> pos(0, 40);
    std::uniform_int_distribution<int> len(1, 30);
    for (int i = 0; i < 50; ++i) {
        const BoundingBox a{double(pos(rng)), double(pos(rng)), double(len(rng)),
                            double(len(rng))};
        const BoundingBox b{double(pos(rng)), double(pos(rng)), double(len(rng)),
                            double(len(rng))};
        CHECK(iou_box(a, b) == doctest::Approx(rasterized_iou(a, b)).epsilon(1e-6));
        CHECK(iou_box(a, a) == doctest::Approx(1.0));
    }
    CHECK(iou_box({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
}

TEST_CASE("greedy matching equals exhaustive assignment on small fixtures") {
    // Well-separated instances: each generated box overlaps exactly one
    // ground-truth box, so the greedy choice is trivially optimal.
    const auto gt = boxes_of({{"dog", {0, 0, 10, 10}},
                              {"dog", {50, 50, 10, 10}},
                              {"cat", {100, 0, 12, 12}}});
    const auto gen = boxes_of({{"dog", {2, 2, 10, 10}},
                               {"dog", {52, 48, 10, 10}},
                               {"cat", {101, 1, 12, 12}}});
    for (IouVariant v : {IouVariant::Common, IouVariant::Precision, IouVariant::Recall}) {
        const auto greedy = iou_variant(gt, gen, v, MatchStrategy::Greedy);
        const auto optimal = iou_variant(gt, gen, v, MatchStrategy::Optimal);
        REQUIRE(greedy.has_value());
        REQUIRE(optimal.has_value());
        CHECK(*greedy == doctest::Approx(*optimal).epsilon(1e-12));
    }
}

TEST_CASE("the exhaustive strategy maximizes total overlap") {
    // Overlap pattern where taking the largest pair first is suboptimal:
    // gen A overlaps gt1 at 0.9 and gt2 at 0.8; gen B overlaps only gt1 at 0.8.
    const auto gt = boxes_of({{"dog", {0, 0, 100, 10}}, {"dog", {0, 20, 100, 10}}});
    const auto gen = boxes_of({
        {"dog", {0, 1, 100, 10}},    // strongest with gt1, decent with nothing else
        {"dog", {0, 2, 100, 10}},    // also overlaps only gt1
    });
    const auto greedy = iou_variant(gt, gen, IouVariant::Recall, MatchStrategy::Greedy);
    const auto optimal = iou_variant(gt, gen, IouVariant::Recall, MatchStrategy::Optimal);
    REQUIRE(greedy.has_value());
    REQUIRE(optimal.has_value());
    CHECK(*optimal >= *greedy - 1e-12);
}

TEST_CASE("exhaustive strategy agrees with brute-force permutations") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> pos(0, 30), len(5, 25);
    for (int trial = 0; trial < 200; ++trial) {
        DetectionSet gt, gen;
        std::uniform_int_distribution<int> count(1, 3);
        const int n_gt = count(rng), n_gen = count(rng);
        for (int i = 0; i < n_gt; ++i)
            gt.instances.push_back({"obj", BoundingBox{pos(rng), pos(rng), len(rng), len(rng)}, 1.0});
        for (int i = 0; i < n_gen; ++i)
            gen.instances.push_back({"obj", BoundingBox{pos(rng), pos(rng), len(rng), len(rng)}, 1.0});

        // brute force: best one-to-one assignment by total IoU
        const int n = std::max(n_gt, n_gen);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best_total = -1.0;
        do {
            double total = 0.0;
            for (int g = 0; g < n_gt; ++g) {
                if (perm[g] < n_gen) {
                    total += iou_box(*gt.instances[g].bbox, *gen.instances[perm[g]].bbox);
                }
            }
            best_total = std::max(best_total, total);
        } while (std::next_permutation(perm.begin(), perm.end()));

        // Recall-IoU averages matched overlap over all gt instances
        const auto got = iou_variant(gt, gen, IouVariant::Recall, MatchStrategy::Optimal,
                                     IouAveraging::PerInstance);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(best_total / n_gt).epsilon(1e-9));
    }
}

TEST_CASE("variant ordering and range hold on random detection pairs") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> pos(0, 60), len(5, 40);
    const std::vector<std::string> pool = {"dog", "cat", "tree"};
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> count(0, 4);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        DetectionSet gt, gen;
        for (int i = count(rng); i > 0; --i)
            gt.instances.push_back({pool[pick(rng)], BoundingBox{pos(rng), pos(rng), len(rng), len(rng)}, 1.0});
        for (int i = count(rng); i > 0; --i)
            gen.instances.push_back({pool[pick(rng)], BoundingBox{pos(rng), pos(rng), len(rng), len(rng)}, 1.0});

        const auto common = iou_variant(gt, gen, IouVariant::Common);
        const auto precision = iou_variant(gt, gen, IouVariant::Precision);
        const auto recall = iou_variant(gt, gen, IouVariant::Recall);
        REQUIRE(precision.has_value());
        REQUIRE(recall.has_value());
        CHECK(*precision >= 0.0);
        CHECK(*precision <= 1.0);
        CHECK(*recall >= 0.0);
        CHECK(*recall <= 1.0);
        if (common.has_value()) {
            CHECK(*common >= 0.0);
            CHECK(*common <= 1.0);
            CHECK(*common >= *precision - 1e-12);
            CHECK(*common >= *recall - 1e-12);
            ++checked;
        }
    }
    CHECK(checked > 100);  // the ordering claim must actually be exercised
}

TEST_CASE("common IoU is undefined when no class appears on both sides") {
    const auto gt = boxes_of({{"dog", {0, 0, 10, 10}}});
    const auto gen = boxes_of({{"cat", {0, 0, 10, 10}}});
    CHECK(!iou_variant(gt, gen, IouVariant::Common).has_value());
    CHECK(*iou_variant(gt, gen, IouVariant::Precision) == 0.0);
    CHECK(*iou_variant(gt, gen, IouVariant::Recall) == 0.0);
}

TEST_CASE("detection parsing applies the confidence threshold to detector output") {
    const std::string text = R"({
        "image_id": "x@1",
        "origin": "detr-100",
        "instances": [
            {"label": "Dogs", "score": 0.95, "bbox": [1, 2, 3, 4]},
            {"label": "cat", "score": 0.5, "bbox": [5, 6, 7, 8]}
        ]
    })";
    const DetectionSet det = parse_detections(text, "detr-100", 0.7);
    REQUIRE(det.instances.size() == 1);
    CHECK(det.instances[0].label == "dog");  // normalized on ingestion
    CHECK(det.origin == DetectionOrigin::Detector);

    // human annotations are never thresholded
    const std::string human = R"({
        "image_id": "x@1",
        "instances": [{"label": "cat", "score": 0.5, "bbox": [5, 6, 7, 8]}]
    })";
    const DetectionSet ann = parse_detections(human, "", 0.7);
    CHECK(ann.origin == DetectionOrigin::HumanAnnotation);
    CHECK(ann.instances.size() == 1);
}

TEST_CASE("detection files round-trip") {
    const auto src = testutil::data_dir() / "runs" / "fixture" / "animal_01" / "det_2.json";
    const DetectionSet det = load_detections(src.string(), 0.7);
    CHECK(det.instances.size() == 2);
    const auto dst = testutil::make_temp_dir("det_roundtrip") / "det.json";
    write_detections(det, dst.string());
    const DetectionSet again = load_detections(dst.string(), 0.0);
    CHECK(again.instances.size() == det.instances.size());
    CHECK(again.instances[0].label == det.instances[0].label);
    CHECK(again.instances[0].bbox == det.instances[0].bbox);
}
