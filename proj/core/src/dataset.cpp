#include "cgvm/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cgvm/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace cgvm {

std::string to_string(Category c) {
    switch (c) {
        case Category::Cartoon: return "cartoon";
        case Category::Nature: return "nature";
        case Category::Painting: return "painting";
        case Category::Product: return "product";
        case Category::Animal: return "animal";
        case Category::Human: return "human";
    }
    return "?";
}

std::string to_string(Source s) {
    switch (s) {
        case Source::Unique: return "unique";
        case Source::Pinterest: return "pinterest";
        case Source::Flickr: return "flickr";
    }
    return "?";
}

Category category_from_string(const std::string& s) {
    if (s == "cartoon") return Category::Cartoon;
    if (s == "nature") return Category::Nature;
    if (s == "painting") return Category::Painting;
    if (s == "product") return Category::Product;
    if (s == "animal") return Category::Animal;
    if (s == "human") return Category::Human;
    throw SchemaViolation("category", "unknown value '" + s + "'");
}

Source source_from_string(const std::string& s) {
    if (s == "unique") return Source::Unique;
    if (s == "pinterest") return Source::Pinterest;
    if (s == "flickr") return Source::Flickr;
    throw SchemaViolation("source", "unknown value '" + s + "'");
}

std::string Dataset::image_file(const Sample& s) const {
    return (fs::path(root) / s.image_path).string();
}

namespace {

constexpr int kSchemaVersion = 1;

json require(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key)) {
        throw SchemaViolation(ctx + "." + key, "missing required field");
    }
    return obj.at(key);
}

Sample parse_sample(const json& j, size_t idx) {
    const std::string ctx = "samples[" + std::to_string(idx) + "]";
    Sample s;
    s.id = require(j, "id", ctx).get<std::string>();
    s.category = category_from_string(require(j, "category", ctx).get<std::string>());
    s.source = source_from_string(require(j, "source", ctx).get<std::string>());
    s.image_path = require(j, "image", ctx).get<std::string>();

    const json chats = require(j, "chats", ctx);
    if (!chats.is_array() || chats.empty()) {
        throw SchemaViolation(ctx + ".chats", "must be a non-empty array");
    }
    int index = 1;
    for (const json& hop : chats) {
        Hop h;
        h.index = index++;
        h.joe_message = require(hop, "joe", ctx + ".chats").get<std::string>();
        h.jill_message = require(hop, "jill", ctx + ".chats").get<std::string>();
        if (h.joe_message.empty()) {
            throw SchemaViolation(ctx + ".chats[" + std::to_string(h.index - 1) + "].joe",
                                  "Joe's message must be non-empty");
        }
        s.hops.push_back(std::move(h));
    }

    if (j.contains("llm_desc") && !j.at("llm_desc").is_null()) {
        for (const json& d : j.at("llm_desc")) {
            s.summaries.push_back(d.get<std::string>());
        }
        if (!s.summaries.empty() && s.summaries.size() != s.hops.size()) {
            throw SummaryCountMismatch(s.id, s.summaries.size(), s.hops.size());
        }
    }

    const json elements = require(j, "elements", ctx);
    for (const json& e : elements) {
        ElementInstance inst;
        inst.label = require(e, "label", ctx + ".elements").get<std::string>();
        if (inst.label.empty()) {
            throw SchemaViolation(ctx + ".elements.label", "label must be non-empty");
        }
        if (e.contains("bbox") && !e.at("bbox").is_null()) {
            const json& b = e.at("bbox");
            if (!b.is_array() || b.size() != 4) {
                throw SchemaViolation(ctx + ".elements.bbox", "must be [x, y, w, h]");
            }
            BoundingBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                            b[3].get<double>()};
            if (box.w <= 0 || box.h <= 0) {
                throw SchemaViolation(ctx + ".elements.bbox", "width and height must be positive");
            }
            inst.bbox = box;
        }
        s.metadata.elements.push_back(std::move(inst));
    }
    return s;
}

json sample_to_json(const Sample& s) {
    json j;
    j["id"] = s.id;
    j["category"] = to_string(s.category);
    j["source"] = to_string(s.source);
    j["image"] = s.image_path;
    j["elements"] = json::array();
    for (const ElementInstance& e : s.metadata.elements) {
        json je;
        je["label"] = e.label;
        if (e.bbox) {
            je["bbox"] = {e.bbox->x, e.bbox->y, e.bbox->w, e.bbox->h};
        } else {
            je["bbox"] = nullptr;
        }
        j["elements"].push_back(je);
    }
    j["chats"] = json::array();
    for (const Hop& h : s.hops) {
        j["chats"].push_back({{"joe", h.joe_message}, {"jill", h.jill_message}});
    }
    j["llm_desc"] = s.summaries;
    return j;
}

}  // namespace

Dataset load_dataset(const std::string& root) {
    const fs::path manifest = fs::path(root) / "manifest.json";
    std::ifstream in(manifest);
    if (!in) {
        throw SchemaViolation("manifest", "cannot read " + manifest.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaViolation("manifest", std::string("invalid JSON: ") + e.what());
    }

    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
        doc.at("schema_version").get<int>() != kSchemaVersion) {
        throw SchemaViolation("schema_version",
                              "must be " + std::to_string(kSchemaVersion));
    }

    Dataset d;
    d.root = root;
    const json samples = require(doc, "samples", "manifest");
    std::set<std::string> ids;
    size_t idx = 0;
    for (const json& js : samples) {
        Sample s = parse_sample(js, idx++);
        if (!ids.insert(s.id).second) {
            throw DuplicateId(s.id);
        }
        const fs::path img = fs::path(root) / s.image_path;
        if (!fs::is_regular_file(img)) {
            throw MissingImage(img.string());
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

void write_dataset(const Dataset& d) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["samples"] = json::array();
    for (const Sample& s : d.samples) {
        doc["samples"].push_back(sample_to_json(s));
    }
    const fs::path manifest = fs::path(d.root) / "manifest.json";
    std::ofstream out(manifest);
    if (!out) {
        throw Error("cannot write " + manifest.string());
    }
    out << doc.dump(2) << '\n';
}

std::vector<std::string> validate_dataset(const std::string& root) {
    // Whole-manifest load first; on failure re-walk sample by sample so the
    // report names every offender, not just the first.
    std::vector<std::string> problems;
    try {
        load_dataset(root);
        return problems;
    } catch (const Error&) {
        // fall through to per-sample scan
    }

    const fs::path manifest = fs::path(root) / "manifest.json";
    std::ifstream in(manifest);
    if (!in) {
        problems.push_back("manifest: cannot read " + manifest.string());
        return problems;
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        problems.push_back(std::string("manifest: invalid JSON: ") + e.what());
        return problems;
    }
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
        doc.at("schema_version").get<int>() != kSchemaVersion) {
        problems.push_back("schema_version: must be " + std::to_string(kSchemaVersion));
    }
    if (!doc.contains("samples") || !doc.at("samples").is_array()) {
        problems.push_back("manifest.samples: missing or not an array");
        return problems;
    }
    std::set<std::string> ids;
    size_t idx = 0;
    for (const json& js : doc.at("samples")) {
        try {
            Sample s = parse_sample(js, idx);
            if (!ids.insert(s.id).second) {
                problems.push_back("duplicate sample id: " + s.id);
            }
            const fs::path img = fs::path(root) / s.image_path;
            if (!fs::is_regular_file(img)) {
                problems.push_back("missing image: " + img.string());
            }
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
        ++idx;
    }
    return problems;
}

}  // namespace cgvm
