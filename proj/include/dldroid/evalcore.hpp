#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dldroid/types.hpp"

namespace dldroid::eval {

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments; // per-sample fold index in [0, k)
};

/// Deterministic given (dataset order, k, seed); per-class fold sizes differ
/// by at most one.
FoldPlan stratified_k_fold(const Dataset& ds, int k, std::uint64_t seed);

struct ConfusionCounts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t positives() const { return tp + fn; }
    std::size_t negatives() const { return tn + fp; }
    std::size_t total() const { return tp + tn + fp + fn; }
};

/// Predicts malware iff score >= threshold. Malware is the positive class.
ConfusionCounts confusion(std::span<const double> scores, std::span<const Label> labels,
                          double threshold);

struct EvalReport {
    double tpr = 0, tnr = 0, fpr = 0, fnr = 0;
    double precision = 0, recall = 0, accuracy = 0;
    double fm_malware = 0, fm_benign = 0, weighted_fm = 0;
    double auc = 0;
    bool zero_denominator = false; // some ratio had an empty denominator and was reported as 0
};

/// Ratio metrics and both per-class F-measures from pooled counts. AUC is not
/// derivable from counts and is left 0; cross_validate fills it.
EvalReport metrics(const ConfusionCounts& c);

/// Class-size weighted F-measure.
double weighted_fm(double fm_m, double n_m, double fm_b, double n_b);

/// Mann-Whitney AUC: [#(pos,neg) pairs with s_pos > s_neg + 0.5 * #ties] / (n_pos * n_neg).
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual double score(std::span<const std::uint8_t> bits) const = 0;
};

/// Trains on a fold's training split; the seed varies per fold.
using TrainFn = std::function<std::unique_ptr<Classifier>(const Dataset& train, std::uint64_t seed)>;

inline constexpr double kDecisionThreshold = 0.5;

/// Pooled (micro) k-fold cross validation: per-fold confusion counts are
/// summed, metrics computed on the pooled counts, AUC on the pooled
/// out-of-fold scores.
EvalReport cross_validate(const TrainFn& trainer, const Dataset& ds, int k, std::uint64_t seed);

} // namespace dldroid::eval
