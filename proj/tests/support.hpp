#pragma once

// Test-side oracles and helpers. The oracles are deliberately independent of
// the library code paths they check.

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "dldroid/types.hpp"

namespace support {

template <typename F>
dldroid::ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const dldroid::Error& e) {
        return e.code();
    }
    FAIL("expected a dldroid::Error to be thrown");
    return dldroid::ErrorCode::Io;
}

// Naive double-loop information gain: explicit subset entropies, no shared
// arithmetic with ranking::info_gain.
inline double naive_info_gain(const std::vector<std::uint8_t>& column,
                              const std::vector<dldroid::Label>& labels) {
    auto subset_entropy = [&](int want_value) {
        std::size_t n = 0, malware = 0;
        for (std::size_t i = 0; i < column.size(); ++i) {
            if (want_value >= 0 && column[i] != static_cast<std::uint8_t>(want_value)) continue;
            ++n;
            if (labels[i] == dldroid::Label::Malware) ++malware;
        }
        if (n == 0) return std::pair<double, std::size_t>{0.0, 0};
        double h = 0.0;
        for (std::size_t count : {malware, n - malware}) {
            if (count == 0) continue;
            double p = static_cast<double>(count) / static_cast<double>(n);
            h -= p * std::log2(p);
        }
        return std::pair<double, std::size_t>{h, n};
    };
    auto [h_all, n_all] = subset_entropy(-1);
    auto [h0, n0] = subset_entropy(0);
    auto [h1, n1] = subset_entropy(1);
    if (n_all == 0) return 0.0;
    double n = static_cast<double>(n_all);
    return h_all - (static_cast<double>(n0) / n) * h0 - (static_cast<double>(n1) / n) * h1;
}

// Trapezoidal area under the ROC curve, sweeping thresholds through the
// unique score values (tied scores advance TP and FP together).
inline double trapezoid_auc(const std::vector<double>& scores,
                            const std::vector<dldroid::Label>& labels) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double pos = 0, neg = 0;
    for (auto l : labels) (l == dldroid::Label::Malware ? pos : neg) += 1.0;

    double tp = 0, fp = 0, area = 0, prev_tpr = 0, prev_fpr = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == dldroid::Label::Malware ? tp : fp) += 1.0;
            ++j;
        }
        double tpr = tp / pos;
        double fpr = fp / neg;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_tpr = tpr;
        prev_fpr = fpr;
        i = j;
    }
    return area;
}

inline dldroid::Dataset random_dataset(std::mt19937_64& rng, std::size_t n_features,
                                       std::size_t n_samples, bool force_both_classes = true) {
    std::vector<dldroid::Feature> features;
    for (std::size_t f = 0; f < n_features; ++f) {
        char name[16];
        std::snprintf(name, sizeof name, "f%03zu", f);
        features.push_back({name, dldroid::FeatureCategory::Attribute});
    }
    dldroid::Dataset ds;
    ds.catalog = dldroid::FeatureCatalog::from_features(std::move(features));
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::size_t i = 0; i < n_samples; ++i) {
        dldroid::Sample s;
        if (force_both_classes && i < 2)
            s.label = i == 0 ? dldroid::Label::Malware : dldroid::Label::Benign;
        else
            s.label = bit(rng) ? dldroid::Label::Malware : dldroid::Label::Benign;
        for (std::size_t f = 0; f < n_features; ++f)
            s.bits.push_back(static_cast<std::uint8_t>(bit(rng)));
        ds.add(std::move(s));
    }
    return ds;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text(const std::filesystem::path& path) {
    auto bytes = read_bytes(path);
    return {bytes.begin(), bytes.end()};
}

// Unique per-test scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dldroid_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace support
