#pragma once

#include <span>
#include <string>
#include <vector>

#include "dldroid/types.hpp"

namespace dldroid::ranking {

/// Shannon entropy of a count histogram, in bits. 0*log(0) is 0; an empty or
/// single-class histogram has entropy 0.
double entropy(std::span<const std::size_t> counts);

/// IG = H(labels) - sum_v (n_v/n) * H(labels | column = v), v in {0,1}.
double info_gain(std::span<const std::uint8_t> column, std::span<const Label> labels);

struct FeatureScore {
    std::string name;
    std::size_t malware_present = 0;
    std::size_t benign_present = 0;
    double info_gain = 0.0;
};

/// Sorted by info_gain descending, ties broken by name ascending; covers
/// every catalog feature exactly once.
struct RankedList {
    std::vector<FeatureScore> scores;
};

RankedList rank_features(const Dataset& ds);

/// Projects the dataset onto the first k ranked features, in ranked order.
Dataset select_top_k(const Dataset& ds, std::size_t k, const RankedList& rl);

} // namespace dldroid::ranking
