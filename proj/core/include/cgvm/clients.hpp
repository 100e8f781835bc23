#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgvm/dataset.hpp"
#include "cgvm/element.hpp"

namespace cgvm {

/// The exact summarization instruction sent ahead of the rendered conversation.
extern const char* const kSummarizationPrompt;

/// Renders hops 1..upto as "Joe: ...\nJill: ..." lines.
std::string render_conversation(const Sample& sample, int upto);

/// Full request text: prompt, blank line, rendered conversation.
std::string summarization_request(const Sample& sample, int upto);

// --- summaries -------------------------------------------------------------

class SummarizerClient {
public:
    virtual ~SummarizerClient() = default;
    virtual std::string summarize(const Sample& sample, int upto) = 0;
    virtual bool is_remote() const = 0;
};

/// Replays Sample.summaries (pipeline step-1 outputs shipped in the dataset).
class StoredSummaries : public SummarizerClient {
public:
    std::string summarize(const Sample& sample, int upto) override;
    bool is_remote() const override { return false; }
};

/// Chat-completion-style HTTP service (CGVM_LLM_URL / CGVM_LLM_KEY / CGVM_LLM_MODEL).
class RemoteTextService : public SummarizerClient {
public:
    RemoteTextService(std::string base_url, std::string api_key, std::string model);
    std::string summarize(const Sample& sample, int upto) override;
    bool is_remote() const override { return true; }

private:
    std::string base_url_, api_key_, model_;
};

// --- generated images --------------------------------------------------------

struct GenRequest {
    std::string sample_id;
    int hop = 1;
    std::string summary;
    int width = 512;
    int height = 512;
    std::optional<uint64_t> seed;
};

class GeneratorClient {
public:
    virtual ~GeneratorClient() = default;
    /// Returns encoded PNG bytes for one (sample, hop).
    virtual std::vector<uint8_t> generate(const GenRequest& req) = 0;
    virtual bool is_remote() const = 0;
};

/// Reads run-directory artifacts: <run_dir>/<sample_id>/hop_<K>.png.
class StoredImages : public GeneratorClient {
public:
    explicit StoredImages(std::string run_dir) : run_dir_(std::move(run_dir)) {}
    std::vector<uint8_t> generate(const GenRequest& req) override;
    bool is_remote() const override { return false; }

private:
    std::string run_dir_;
};

/// Text-to-image HTTP service (CGVM_T2I_URL / CGVM_T2I_KEY).
class RemoteImageService : public GeneratorClient {
public:
    RemoteImageService(std::string base_url, std::string api_key);
    std::vector<uint8_t> generate(const GenRequest& req) override;
    bool is_remote() const override { return true; }

private:
    std::string base_url_, api_key_;
};

// --- detections --------------------------------------------------------------

class DetectorClient {
public:
    virtual ~DetectorClient() = default;
    virtual DetectionSet detect(const std::string& sample_id, int hop,
                                const std::vector<uint8_t>& png_bytes) = 0;
    virtual bool is_remote() const = 0;
};

/// Reads <run_dir>/<sample_id>/det_<K>.json.
class StoredDetections : public DetectorClient {
public:
    StoredDetections(std::string run_dir, double det_threshold = 0.7)
        : run_dir_(std::move(run_dir)), det_threshold_(det_threshold) {}
    DetectionSet detect(const std::string& sample_id, int hop,
                        const std::vector<uint8_t>& png_bytes) override;
    bool is_remote() const override { return false; }

private:
    std::string run_dir_;
    double det_threshold_;
};

/// Object-detection HTTP service (CGVM_DET_URL): image bytes in, detection JSON out.
class RemoteDetector : public DetectorClient {
public:
    RemoteDetector(std::string base_url, double det_threshold = 0.7);
    DetectionSet detect(const std::string& sample_id, int hop,
                        const std::vector<uint8_t>& png_bytes) override;
    bool is_remote() const override { return true; }

private:
    std::string base_url_;
    double det_threshold_;
};

/// Shared retry policy for the remote clients: bounded attempts with
/// exponential backoff and jitter, 60 s request timeout.
struct RetryPolicy {
    int attempts = 3;
    int base_delay_ms = 250;
    int timeout_s = 60;
};

}  // namespace cgvm
