#include "cgvm/clients.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cgvm/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace cgvm {

const char* const kSummarizationPrompt =
    "Below is a conversation between Joe and Jill, about an image. Use this conversation to "
    "generate a description of the image, such that it can be given as input to a text-to-image "
    "model as a prompt.";

std::string render_conversation(const Sample& sample, int upto) {
    std::string out;
    for (int k = 0; k < upto; ++k) {
        const Hop& h = sample.hops[k];
        out += "Joe: " + h.joe_message + "\n";
        out += "Jill: " + h.jill_message + "\n";
    }
    return out;
}

std::string summarization_request(const Sample& sample, int upto) {
    return std::string(kSummarizationPrompt) + "\n\n" + render_conversation(sample, upto);
}

namespace {

void check_upto(const Sample& sample, int upto) {
    if (upto < 1 || size_t(upto) > sample.hops.size()) {
        throw Error("hop index " + std::to_string(upto) + " out of range for sample " + sample.id);
    }
}

// Runs fn up to policy.attempts times; retries on transport failure and
// 5xx, with exponential backoff plus jitter.
template <typename Fn>
httplib::Result with_retries(const RetryPolicy& policy, Fn fn) {
    std::mt19937 rng(std::random_device{}());
    httplib::Result res;
    for (int attempt = 0; attempt < policy.attempts; ++attempt) {
        res = fn();
        if (res && res->status < 500) {
            return res;
        }
        if (attempt + 1 < policy.attempts) {
            int delay = policy.base_delay_ms << attempt;
            delay += std::uniform_int_distribution<int>(0, delay / 2)(rng);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
    return res;
}

std::string run_file(const std::string& run_dir, const std::string& sample_id,
                     const std::string& name) {
    return (fs::path(run_dir) / sample_id / name).string();
}

}  // namespace

std::string StoredSummaries::summarize(const Sample& sample, int upto) {
    check_upto(sample, upto);
    if (size_t(upto) > sample.summaries.size()) {
        throw MissingStoredSummary(sample.id, upto);
    }
    return sample.summaries[upto - 1];
}

RemoteTextService::RemoteTextService(std::string base_url, std::string api_key, std::string model)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_(std::move(model)) {}

std::string RemoteTextService::summarize(const Sample& sample, int upto) {
    check_upto(sample, upto);
    json body;
    body["model"] = model_;
    body["messages"] = json::array(
        {{{"role", "user"}, {"content", summarization_request(sample, upto)}}});

    RetryPolicy policy;
    auto res = with_retries(policy, [&] {
        httplib::Client client(base_url_);
        client.set_read_timeout(policy.timeout_s, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        return client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    });
    if (!res) {
        throw ServiceError(0, "no response from " + base_url_);
    }
    if (res->status != 200) {
        throw ServiceError(res->status, res->body);
    }
    json doc = json::parse(res->body);
    if (doc.contains("choices")) {
        return doc["choices"].at(0).at("message").at("content").get<std::string>();
    }
    return doc.at("content").get<std::string>();
}

std::vector<uint8_t> StoredImages::generate(const GenRequest& req) {
    const std::string path =
        run_file(run_dir_, req.sample_id, "hop_" + std::to_string(req.hop) + ".png");
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingStoredImage(path);
    }
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

RemoteImageService::RemoteImageService(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

std::vector<uint8_t> RemoteImageService::generate(const GenRequest& req) {
    json body;
    body["prompt"] = req.summary;
    body["width"] = req.width;
    body["height"] = req.height;
    if (req.seed) {
        body["seed"] = *req.seed;
    }

    RetryPolicy policy;
    auto res = with_retries(policy, [&] {
        httplib::Client client(base_url_);
        client.set_read_timeout(policy.timeout_s, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        return client.Post("/generate", headers, body.dump(), "application/json");
    });
    if (!res) {
        throw ServiceError(0, "no response from " + base_url_);
    }
    if (res->status != 200) {
        throw ServiceError(res->status, res->body);
    }
    return std::vector<uint8_t>(res->body.begin(), res->body.end());
}

DetectionSet StoredDetections::detect(const std::string& sample_id, int hop,
                                      const std::vector<uint8_t>&) {
    const std::string path = run_file(run_dir_, sample_id, "det_" + std::to_string(hop) + ".json");
    return load_detections(path, det_threshold_);
}

RemoteDetector::RemoteDetector(std::string base_url, double det_threshold)
    : base_url_(std::move(base_url)), det_threshold_(det_threshold) {}

DetectionSet RemoteDetector::detect(const std::string& sample_id, int hop,
                                    const std::vector<uint8_t>& png_bytes) {
    RetryPolicy policy;
    auto res = with_retries(policy, [&] {
        httplib::Client client(base_url_);
        client.set_read_timeout(policy.timeout_s, 0);
        return client.Post("/detect", reinterpret_cast<const char*>(png_bytes.data()),
                           png_bytes.size(), "application/octet-stream");
    });
    if (!res) {
        throw ServiceError(0, "no response from " + base_url_);
    }
    if (res->status != 200) {
        throw ServiceError(res->status, res->body);
    }
    DetectionSet det = parse_detections(res->body, sample_id + "@" + std::to_string(hop),
                                        det_threshold_);
    det.image_id = sample_id + "@" + std::to_string(hop);
    return det;
}

}  // namespace cgvm
