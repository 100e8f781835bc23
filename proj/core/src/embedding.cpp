#include "cgvm/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "cgvm/errors.hpp"
#include "cgvm/sha256.hpp"

namespace cgvm {

double cosine(const Embedding& a, const Embedding& b) {
    if (a.values.size() != b.values.size()) {
        throw LengthMismatch(a.values.size(), b.values.size());
    }
    if (a.model_id != b.model_id) {
        throw ModelMismatch(a.model_id, b.model_id);
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw ZeroVector();
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

FileStoreProvider::FileStoreProvider(const std::string& store_path) {
    std::ifstream in(store_path);
    if (!in) {
        throw ProviderUnavailable("cannot read embedding store " + store_path);
    }
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string hash, model;
        size_t dim = 0;
        if (!(ss >> hash >> model >> dim)) {
            throw ProviderUnavailable("malformed store line " + std::to_string(lineno));
        }
        Embedding e;
        e.model_id = model;
        e.values.resize(dim);
        for (size_t i = 0; i < dim; ++i) {
            if (!(ss >> e.values[i])) {
                throw ProviderUnavailable("short vector on store line " + std::to_string(lineno));
            }
        }
        if (model_id_.empty()) {
            model_id_ = model;
        } else if (model_id_ != model) {
            throw ProviderUnavailable("mixed model ids in store " + store_path);
        }
        store_[hash] = std::move(e);
    }
}

Embedding FileStoreProvider::embed(const std::vector<uint8_t>&, const std::string& content_hash) {
    auto it = store_.find(content_hash);
    if (it == store_.end()) {
        throw EmbeddingMissing(content_hash);
    }
    return it->second;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string base_url, std::string token,
                                                 int max_in_flight)
    : base_url_(std::move(base_url)),
      token_(std::move(token)),
      gate_(max_in_flight > 0 ? max_in_flight : 4) {}

Embedding RemoteEmbeddingProvider::embed(const std::vector<uint8_t>& image_bytes,
                                         const std::string& content_hash) {
    {
        std::lock_guard lk(mu_);
        if (auto it = cache_.find(content_hash); it != cache_.end()) {
            return it->second;
        }
    }

    gate_.acquire();
    httplib::Client client(base_url_);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!token_.empty()) {
        headers.emplace("Authorization", "Bearer " + token_);
    }
    auto res = client.Post("/embed", headers,
                           reinterpret_cast<const char*>(image_bytes.data()), image_bytes.size(),
                           "application/octet-stream");
    gate_.release();

    if (!res) {
        throw ProviderUnavailable("no response from " + base_url_);
    }
    if (res->status != 200) {
        throw ServiceError(res->status, res->body);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderUnavailable(std::string("bad embed response: ") + e.what());
    }
    Embedding e;
    e.model_id = doc.at("model_id").get<std::string>();
    for (const auto& v : doc.at("vector")) {
        e.values.push_back(v.get<double>());
    }

    std::lock_guard lk(mu_);
    if (seen_model_id_.empty()) seen_model_id_ = e.model_id;
    cache_[content_hash] = e;
    return e;
}

std::string RemoteEmbeddingProvider::model_id() const {
    return seen_model_id_.empty() ? "remote" : seen_model_id_;
}

double ClipScorer::score(const std::vector<uint8_t>& y_bytes,
                         const std::vector<uint8_t>& yhat_bytes) {
    const std::string hy = sha256_hex(y_bytes);
    const std::string hyh = sha256_hex(yhat_bytes);
    const std::string key = hy + ":" + hyh + ":" + provider_->model_id();
    {
        std::lock_guard lk(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    Embedding ey = provider_->embed(y_bytes, hy);
    Embedding eyh = provider_->embed(yhat_bytes, hyh);
    double v = cosine(ey, eyh);
    std::lock_guard lk(mu_);
    cache_[key] = v;
    return v;
}

double ClipScorer::score_files(const std::string& y_path, const std::string& yhat_path) {
    auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error("cannot read " + p);
        return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    };
    return score(read(y_path), read(yhat_path));
}

}  // namespace cgvm
