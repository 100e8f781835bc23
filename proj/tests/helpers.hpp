#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cgvm/image.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(CGVM_TEST_DATA); }
inline fs::path dataset_dir() { return data_dir() / "dataset"; }
inline fs::path model_path() { return fs::path(CGVM_ASSETS) / "brisque_svr.txt"; }

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::vector<uint8_t> read_bytes(const fs::path& p) {
    const std::string s = read_file(p);
    return std::vector<uint8_t>(s.begin(), s.end());
}

inline void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

/// Fresh scratch directory; wiped on creation so reruns start clean.
inline fs::path make_temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("cgvm_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

inline cgvm::ImagePlane random_plane(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.0, 255.0);
    cgvm::ImagePlane p;
    p.width = w;
    p.height = h;
    p.samples.resize(size_t(w) * h);
    for (double& s : p.samples) s = dist(rng);
    return p;
}

/// Correlated second plane so structural metrics land away from 0 and 1.
inline cgvm::ImagePlane perturb(const cgvm::ImagePlane& src, double noise, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, noise);
    cgvm::ImagePlane p = src;
    for (double& s : p.samples) {
        s = std::min(255.0, std::max(0.0, s + dist(rng)));
    }
    return p;
}

}  // namespace testutil
