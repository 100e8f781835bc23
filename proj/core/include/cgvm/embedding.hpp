#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

namespace cgvm {

struct Embedding {
    std::vector<double> values;
    std::string model_id;
};

/// cos(a, b) = dot / (|a||b|). Throws on length/model mismatch or a zero vector.
double cosine(const Embedding& a, const Embedding& b);

/// Source of image embeddings, keyed by the SHA-256 of the image bytes so
/// regenerated identical images hit the same entry. The numeric core never
/// runs a network in-process; embeddings arrive through this seam.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Embedding embed(const std::vector<uint8_t>& image_bytes,
                            const std::string& content_hash) = 0;
    virtual std::string model_id() const = 0;
};

/// Precomputed vectors from a store file. Line format:
///   <sha256>  <model_id>  <dim>  <v1> <v2> ...
/// Lookups never touch the network.
class FileStoreProvider : public EmbeddingProvider {
public:
    explicit FileStoreProvider(const std::string& store_path);
    Embedding embed(const std::vector<uint8_t>& image_bytes,
                    const std::string& content_hash) override;
    std::string model_id() const override { return model_id_; }
    size_t size() const { return store_.size(); }

private:
    std::map<std::string, Embedding> store_;
    std::string model_id_;
};

/// POST /embed against the service at CGVM_EMBED_URL (bearer token from
/// CGVM_EMBED_TOKEN). Responses are cached per content hash; in-flight
/// requests are capped.
class RemoteEmbeddingProvider : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(std::string base_url, std::string token = "",
                                     int max_in_flight = 4);
    Embedding embed(const std::vector<uint8_t>& image_bytes,
                    const std::string& content_hash) override;
    std::string model_id() const override;

private:
    std::string base_url_;
    std::string token_;
    std::counting_semaphore<64> gate_;
    std::mutex mu_;
    std::map<std::string, Embedding> cache_;
    std::string seen_model_id_;
};

/// Cosine of the two images' embeddings; results are memoized by
/// (hash(y), hash(yhat), model_id).
class ClipScorer {
public:
    explicit ClipScorer(std::shared_ptr<EmbeddingProvider> provider)
        : provider_(std::move(provider)) {}

    double score(const std::vector<uint8_t>& y_bytes, const std::vector<uint8_t>& yhat_bytes);
    double score_files(const std::string& y_path, const std::string& yhat_path);

private:
    std::shared_ptr<EmbeddingProvider> provider_;
    std::mutex mu_;
    std::map<std::string, double> cache_;
};

}  // namespace cgvm
