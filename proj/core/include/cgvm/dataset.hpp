#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cgvm {

enum class Category { Cartoon, Nature, Painting, Product, Animal, Human };
enum class Source { Unique, Pinterest, Flickr };

std::string to_string(Category c);
std::string to_string(Source s);
Category category_from_string(const std::string& s);  // throws SchemaViolation
Source source_from_string(const std::string& s);      // throws SchemaViolation

struct BoundingBox {
    double x = 0, y = 0;  // top-left, pixels
    double w = 0, h = 0;
    bool operator==(const BoundingBox&) const = default;
};

struct ElementInstance {
    std::string label;  // normalized lowercase
    std::optional<BoundingBox> bbox;
    double score = 1.0;  // detector confidence; 1.0 for human annotation
    bool operator==(const ElementInstance&) const = default;
};

struct ElementAnnotation {
    std::vector<ElementInstance> elements;
    bool operator==(const ElementAnnotation&) const = default;
};

/// One conversation round-trip. Joe always opens.
struct Hop {
    int index = 1;  // 1-based, contiguous within a conversation
    std::string joe_message;
    std::string jill_message;
    bool operator==(const Hop&) const = default;
};

struct Sample {
    std::string id;
    Category category = Category::Nature;
    Source source = Source::Unique;
    std::string image_path;  // relative to dataset root
    std::vector<Hop> hops;
    std::vector<std::string> summaries;  // one per hop prefix; may be empty
    ElementAnnotation metadata;
    bool operator==(const Sample&) const = default;
};

struct Dataset {
    std::string root;
    std::vector<Sample> samples;

    std::string image_file(const Sample& s) const;  // root-joined absolute-ish path
};

/// Loads and fully validates manifest.json under root. All schema and
/// referential errors are typed; a Dataset is never partially returned.
Dataset load_dataset(const std::string& root);

/// Writes manifest.json under d.root (images are expected to already exist).
void write_dataset(const Dataset& d);

/// Collects every validation problem instead of stopping at the first.
/// Empty result means the dataset loads cleanly.
std::vector<std::string> validate_dataset(const std::string& root);

struct StatsReport {
    std::map<int, int> conversation_length_histogram;
    std::map<std::string, std::map<int, int>> length_histogram_per_category;
    std::map<std::string, std::map<std::string, int>> source_per_category;
    std::map<std::string, std::map<std::string, int>> element_frequency_per_category;
    int sample_count = 0;
};

StatsReport dataset_stats(const Dataset& d);

}  // namespace cgvm
