#pragma once

#include <stdexcept>
#include <string>

namespace cgvm {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(std::string what) : std::runtime_error(std::move(what)) {}
};

// --- image / decode ---

class DecodeError : public Error {
public:
    DecodeError(const std::string& path, const std::string& cause)
        : Error("decode failed for '" + path + "': " + cause), path(path), cause(cause) {}
    std::string path;
    std::string cause;
};

class InvalidSide : public Error {
public:
    explicit InvalidSide(int side)
        : Error("standardization side must be >= 8, got " + std::to_string(side)) {}
};

// --- dataset ---

class SchemaViolation : public Error {
public:
    SchemaViolation(const std::string& field, const std::string& reason)
        : Error("schema violation at '" + field + "': " + reason), field(field), reason(reason) {}
    std::string field;
    std::string reason;
};

class MissingImage : public Error {
public:
    explicit MissingImage(const std::string& path)
        : Error("referenced image does not exist: " + path), path(path) {}
    std::string path;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id)
        : Error("duplicate sample id: " + id), id(id) {}
    std::string id;
};

class SummaryCountMismatch : public Error {
public:
    SummaryCountMismatch(const std::string& id, size_t summaries, size_t hops)
        : Error("sample '" + id + "' has " + std::to_string(summaries) + " summaries for " +
                std::to_string(hops) + " hops"),
          id(id) {}
    std::string id;
};

// --- metrics ---

class DimensionMismatch : public Error {
public:
    DimensionMismatch(int w1, int h1, int w2, int h2)
        : Error("image dimensions differ: " + std::to_string(w1) + "x" + std::to_string(h1) +
                " vs " + std::to_string(w2) + "x" + std::to_string(h2)) {}
};

class TooSmallForWindow : public Error {
public:
    TooSmallForWindow(int side, int window)
        : Error("image side " + std::to_string(side) + " smaller than window " +
                std::to_string(window)) {}
};

class DegenerateFit : public Error {
public:
    explicit DegenerateFit(const std::string& why) : Error("degenerate fit: " + why) {}
};

class ModelLoadError : public Error {
public:
    ModelLoadError(const std::string& path, const std::string& reason)
        : Error("cannot load model '" + path + "': " + reason) {}
};

// --- embeddings ---

class LengthMismatch : public Error {
public:
    LengthMismatch(size_t a, size_t b)
        : Error("embedding lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ModelMismatch : public Error {
public:
    ModelMismatch(const std::string& a, const std::string& b)
        : Error("embedding model ids differ: '" + a + "' vs '" + b + "'") {}
};

class ZeroVector : public Error {
public:
    ZeroVector() : Error("embedding is the zero vector") {}
};

class EmbeddingMissing : public Error {
public:
    explicit EmbeddingMissing(const std::string& hash)
        : Error("no stored embedding for content hash " + hash), hash(hash) {}
    std::string hash;
};

class ProviderUnavailable : public Error {
public:
    explicit ProviderUnavailable(const std::string& why)
        : Error("embedding provider unavailable: " + why) {}
};

// --- elements ---

class EmptyAfterNormalization : public Error {
public:
    explicit EmptyAfterNormalization(const std::string& raw)
        : Error("label '" + raw + "' is empty after normalization") {}
};

class MissingBoxes : public Error {
public:
    explicit MissingBoxes(const std::string& image_id)
        : Error("detection set '" + image_id + "' has instances without bounding boxes"),
          image_id(image_id) {}
    std::string image_id;
};

// --- hop analysis ---

class EmptySeries : public Error {
public:
    EmptySeries() : Error("metric series has no per-hop values") {}
};

class EmptyGroup : public Error {
public:
    explicit EmptyGroup(const std::string& group)
        : Error("aggregation group '" + group + "' is empty") {}
};

// --- pipeline / services ---

class ServiceError : public Error {
public:
    ServiceError(int status, const std::string& detail)
        : Error("service error (status " + std::to_string(status) + "): " + detail),
          status(status) {}
    int status;
};

class MissingStoredSummary : public Error {
public:
    MissingStoredSummary(const std::string& sample_id, int hop)
        : Error("sample '" + sample_id + "' has no stored summary for hop " +
                std::to_string(hop)) {}
};

class MissingStoredImage : public Error {
public:
    explicit MissingStoredImage(const std::string& path)
        : Error("no stored generated image at " + path), path(path) {}
    std::string path;
};

class MissingStoredDetections : public Error {
public:
    explicit MissingStoredDetections(const std::string& path)
        : Error("no stored detection file at " + path), path(path) {}
    std::string path;
};

class IncompleteRun : public Error {
public:
    explicit IncompleteRun(const std::string& missing)
        : Error("run is missing artifacts: " + missing) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& why) : Error("config error: " + why) {}
};

}  // namespace cgvm
