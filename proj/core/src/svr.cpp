#include <cmath>
#include <fstream>
#include <sstream>

#include "cgvm/brisque.hpp"
#include "cgvm/errors.hpp"

namespace cgvm {

SvrModel load_svr_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ModelLoadError(path, "file not readable");
    }
    SvrModel m;
    std::string line, section;
    bool have_gamma = false, have_rho = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line == "GAMMA" || line == "RHO" || line == "RANGES" || line == "SV") {
            section = line;
            continue;
        }
        std::istringstream ss(line);
        if (section == "GAMMA") {
            ss >> m.gamma;
            have_gamma = true;
        } else if (section == "RHO") {
            ss >> m.rho;
            have_rho = true;
        } else if (section == "RANGES") {
            double lo, hi;
            if (!(ss >> lo >> hi)) {
                throw ModelLoadError(path, "bad RANGES line: " + line);
            }
            if (lo >= hi) {
                throw ModelLoadError(path, "range min must be < max");
            }
            m.ranges.emplace_back(lo, hi);
        } else if (section == "SV") {
            double coef;
            if (!(ss >> coef)) {
                throw ModelLoadError(path, "bad SV line: " + line);
            }
            std::array<double, 36> sv{};
            for (double& v : sv) {
                if (!(ss >> v)) {
                    throw ModelLoadError(path, "support vector has fewer than 36 values");
                }
            }
            m.coefficients.push_back(coef);
            m.support_vectors.push_back(sv);
        } else {
            throw ModelLoadError(path, "content before any section header");
        }
    }
    if (!have_gamma || !have_rho) {
        throw ModelLoadError(path, "missing GAMMA or RHO section");
    }
    if (m.ranges.size() != 36) {
        throw ModelLoadError(path, "RANGES must have exactly 36 lines, got " +
                                       std::to_string(m.ranges.size()));
    }
    if (m.support_vectors.empty()) {
        throw ModelLoadError(path, "no support vectors");
    }
    return m;
}

double svr_predict(const SvrModel& model, const BrisqueFeatures& f) {
    // LIBSVM-style scaling of each feature to [-1, 1] over its training range.
    std::array<double, 36> x;
    for (size_t i = 0; i < 36; ++i) {
        const auto& [lo, hi] = model.ranges[i];
        x[i] = -1.0 + 2.0 * (f.values[i] - lo) / (hi - lo);
    }
    double acc = 0.0;
    for (size_t s = 0; s < model.support_vectors.size(); ++s) {
        const auto& sv = model.support_vectors[s];
        double d2 = 0.0;
        for (size_t i = 0; i < 36; ++i) {
            double d = x[i] - sv[i];
            d2 += d * d;
        }
        acc += model.coefficients[s] * std::exp(-model.gamma * d2);
    }
    return acc - model.rho;
}

}  // namespace cgvm
