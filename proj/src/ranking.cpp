#include "dldroid/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace dldroid::ranking {

double entropy(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

// IG from the 2x2 contingency of (bit value, class).
double info_gain_from_counts(std::size_t m1, std::size_t b1, std::size_t n_m, std::size_t n_b) {
    const std::size_t m0 = n_m - m1;
    const std::size_t b0 = n_b - b1;
    const std::size_t n = n_m + n_b;
    if (n == 0) return 0.0;
    const std::size_t marginal[2] = {n_m, n_b};
    const std::size_t ones[2] = {m1, b1};
    const std::size_t zeros[2] = {m0, b0};
    const double n1 = static_cast<double>(m1 + b1);
    const double n0 = static_cast<double>(m0 + b0);
    double cond = (n1 / n) * entropy(ones) + (n0 / n) * entropy(zeros);
    double ig = entropy(marginal) - cond;
    return ig < 0.0 ? 0.0 : ig; // clamp rounding residue
}

} // namespace

double info_gain(std::span<const std::uint8_t> column, std::span<const Label> labels) {
    if (column.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, "column length " + std::to_string(column.size()) +
                                                   " != labels length " + std::to_string(labels.size()));
    std::size_t m1 = 0, b1 = 0, n_m = 0, n_b = 0;
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (labels[i] == Label::Malware) {
            ++n_m;
            if (column[i]) ++m1;
        } else {
            ++n_b;
            if (column[i]) ++b1;
        }
    }
    return info_gain_from_counts(m1, b1, n_m, n_b);
}

RankedList rank_features(const Dataset& ds) {
    const std::size_t n_m = ds.count(Label::Malware);
    const std::size_t n_b = ds.count(Label::Benign);
    if (n_m == 0 || n_b == 0)
        throw Error(ErrorCode::SingleClassDataset, "ranking requires both classes present");

    RankedList rl;
    rl.scores.reserve(ds.catalog.size());
    for (std::size_t f = 0; f < ds.catalog.size(); ++f) {
        std::size_t m1 = 0, b1 = 0;
        for (const auto& s : ds.samples) {
            if (!s.bits[f]) continue;
            if (s.label == Label::Malware)
                ++m1;
            else
                ++b1;
        }
        rl.scores.push_back({ds.catalog.at(f).name, m1, b1, info_gain_from_counts(m1, b1, n_m, n_b)});
    }
    std::sort(rl.scores.begin(), rl.scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.info_gain != b.info_gain) return a.info_gain > b.info_gain;
        return a.name < b.name;
    });
    return rl;
}

Dataset select_top_k(const Dataset& ds, std::size_t k, const RankedList& rl) {
    if (k > ds.catalog.size())
        throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " exceeds catalog size " +
                                              std::to_string(ds.catalog.size()));
    std::vector<Feature> kept;
    std::vector<std::size_t> src_index;
    kept.reserve(k);
    src_index.reserve(k);
    for (std::size_t r = 0; r < k; ++r) {
        auto idx = ds.catalog.index_of(rl.scores.at(r).name);
        if (!idx)
            throw Error(ErrorCode::InvalidArgument,
                        "ranked feature not in dataset catalog: '" + rl.scores[r].name + "'");
        kept.push_back(ds.catalog.at(*idx));
        src_index.push_back(*idx);
    }

    Dataset out;
    out.catalog = FeatureCatalog::from_features(std::move(kept));
    out.samples.reserve(ds.samples.size());
    for (const auto& s : ds.samples) {
        Sample p;
        p.app_id = s.app_id;
        p.label = s.label;
        p.bits.reserve(k);
        for (auto i : src_index) p.bits.push_back(s.bits[i]);
        out.samples.push_back(std::move(p));
    }
    return out;
}

} // namespace dldroid::ranking
