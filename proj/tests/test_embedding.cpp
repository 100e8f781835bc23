#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "cgvm/embedding.hpp"
#include "cgvm/errors.hpp"
#include "cgvm/sha256.hpp"
#include "helpers.hpp"

using namespace cgvm;
namespace fs = std::filesystem;

namespace {

Embedding vec(std::initializer_list<double> v, const std::string& model = "m") {
    return {std::vector<double>(v), model};
}

}  // namespace

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex(std::string("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex(std::string("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::vector<uint8_t> abc = {'a', 'b', 'c'};
    CHECK(sha256_hex(abc) == sha256_hex(std::string("abc")));
}

TEST_CASE("sha256 of a file equals sha256 of its bytes") {
    const fs::path p = testutil::data_dir() / "misc" / "tiny.png";
    CHECK(sha256_file(p.string()) == sha256_hex(testutil::read_bytes(p)));
}

TEST_CASE("cosine similarity basics") {
    CHECK(cosine(vec({1, 0}), vec({1, 0})) == doctest::Approx(1.0));
    CHECK(cosine(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
    CHECK(cosine(vec({1, 0}), vec({-1, 0})) == doctest::Approx(-1.0));
    CHECK(cosine(vec({3, 4}), vec({6, 8})) == doctest::Approx(1.0));
}

TEST_CASE("cosine rejects mismatched or empty operands") {
    CHECK_THROWS_AS(cosine(vec({1, 0}), vec({1, 0, 0})), LengthMismatch);
    CHECK_THROWS_AS(cosine(vec({1, 0}, "a"), vec({1, 0}, "b")), ModelMismatch);
    CHECK_THROWS_AS(cosine(vec({0, 0}), vec({1, 0})), ZeroVector);
}

TEST_CASE("file store serves vectors keyed by content hash") {
    FileStoreProvider store((testutil::data_dir() / "embeddings.store").string());
    CHECK(store.size() > 0);
    CHECK(store.model_id() == "fixture-clip-v1");

    const fs::path img = testutil::dataset_dir() / "images" / "animal_01.png";
    const auto bytes = testutil::read_bytes(img);
    const Embedding e = store.embed(bytes, sha256_hex(bytes));
    CHECK(e.values.size() == 8);
    CHECK(e.model_id == "fixture-clip-v1");

    CHECK_THROWS_AS(store.embed({}, std::string(64, '0')), EmbeddingMissing);
}

TEST_CASE("file store rejects mixed embedding models") {
    const fs::path p = testutil::make_temp_dir("emb_mixed") / "store.txt";
    testutil::write_file(p, std::string(64, 'a') + " model-one 2 0.5 0.5\n" +
                                std::string(64, 'b') + " model-two 2 0.5 0.5\n");
    CHECK_THROWS_AS(FileStoreProvider(p.string()), ProviderUnavailable);
}

TEST_CASE("file store rejects a malformed line") {
    const fs::path p = testutil::make_temp_dir("emb_bad") / "store.txt";
    testutil::write_file(p, std::string(64, 'a') + " model 3 0.5 0.5\n");  // dim != count
    CHECK_THROWS_AS(FileStoreProvider(p.string()), Error);
}

TEST_CASE("identical bytes score a perfect clip similarity") {
    auto provider = std::make_shared<FileStoreProvider>(
        (testutil::data_dir() / "embeddings.store").string());
    ClipScorer scorer(provider);
    const fs::path img = testutil::dataset_dir() / "images" / "nature_02.png";
    CHECK(scorer.score_files(img.string(), img.string()) == doctest::Approx(1.0));
}

TEST_CASE("clip scores are memoized per content pair") {
    // A provider that counts lookups shows the second identical request is free.
    class Counting : public EmbeddingProvider {
    public:
        Embedding embed(const std::vector<uint8_t>&, const std::string&) override {
            ++calls;
            return {{1.0, 2.0}, "m"};
        }
        std::string model_id() const override { return "m"; }
        int calls = 0;
    };
    auto provider = std::make_shared<Counting>();
    ClipScorer scorer(provider);
    const std::vector<uint8_t> a = {1, 2, 3}, b = {4, 5, 6};
    scorer.score(a, b);
    const int after_first = provider->calls;
    scorer.score(a, b);
    CHECK(provider->calls == after_first);
}
