#include "dldroid/evalcore.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace dldroid::eval {

FoldPlan stratified_k_fold(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        by_class[static_cast<std::size_t>(ds.samples[i].label)].push_back(i);
    // Classes smaller than k are fine (some folds just miss that class); an
    // absent class cannot be stratified at all.
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].empty())
            throw Error(ErrorCode::ClassTooSmall, std::string(c ? "malware" : "benign") +
                                                      " class has no samples for " +
                                                      std::to_string(k) + "-fold stratification");
    }

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(ds.samples.size(), 0);
    std::mt19937_64 rng(seed);
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            plan.assignments[members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return plan;
}

ConfusionCounts confusion(std::span<const double> scores, std::span<const Label> labels,
                          double threshold) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, "scores length " + std::to_string(scores.size()) +
                                                   " != labels length " + std::to_string(labels.size()));
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool predicted_malware = scores[i] >= threshold;
        if (labels[i] == Label::Malware)
            predicted_malware ? ++c.tp : ++c.fn;
        else
            predicted_malware ? ++c.fp : ++c.tn;
    }
    return c;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& zero_flag) {
    if (den == 0) {
        zero_flag = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double f_measure(double precision, double recall, bool& zero_flag) {
    if (precision + recall == 0.0) {
        zero_flag = true;
        return 0.0;
    }
    return 2.0 * recall * precision / (recall + precision);
}

} // namespace

EvalReport metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw Error(ErrorCode::EmptyEvalSet, "no samples in evaluation set");
    EvalReport r;
    r.tpr = ratio(c.tp, c.tp + c.fn, r.zero_denominator);
    r.tnr = ratio(c.tn, c.tn + c.fp, r.zero_denominator);
    r.fpr = ratio(c.fp, c.fp + c.tn, r.zero_denominator);
    r.fnr = ratio(c.fn, c.fn + c.tp, r.zero_denominator);
    r.precision = ratio(c.tp, c.tp + c.fp, r.zero_denominator);
    r.recall = r.tpr;
    r.accuracy = ratio(c.tp + c.tn, c.total(), r.zero_denominator);
    r.fm_malware = f_measure(r.precision, r.recall, r.zero_denominator);

    // Benign F-measure swaps the positive class.
    double precision_b = ratio(c.tn, c.tn + c.fn, r.zero_denominator);
    double recall_b = r.tnr;
    r.fm_benign = f_measure(precision_b, recall_b, r.zero_denominator);
    r.weighted_fm = weighted_fm(r.fm_malware, static_cast<double>(c.positives()), r.fm_benign,
                                static_cast<double>(c.negatives()));
    return r;
}

double weighted_fm(double fm_m, double n_m, double fm_b, double n_b) {
    if (n_m + n_b == 0.0) return 0.0;
    return (fm_m * n_m + fm_b * n_b) / (n_m + n_b);
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, "scores length != labels length");
    std::size_t n_pos = 0, n_neg = 0;
    for (auto l : labels) (l == Label::Malware ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw Error(ErrorCode::SingleClassEvalSet, "AUC requires both classes present");

    // Rank-sum with midranks for ties: U = sum of positive ranks - n_pos*(n_pos+1)/2.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j); // average of ranks i+1..j
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] == Label::Malware) rank_sum_pos += midrank;
        i = j;
    }
    double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport cross_validate(const TrainFn& trainer, const Dataset& ds, int k, std::uint64_t seed) {
    FoldPlan plan = stratified_k_fold(ds, k, seed);

    ConfusionCounts pooled;
    std::vector<double> oof_scores;
    std::vector<Label> oof_labels;
    oof_scores.reserve(ds.samples.size());
    oof_labels.reserve(ds.samples.size());

    for (int fold = 0; fold < k; ++fold) {
        Dataset train;
        train.catalog = ds.catalog;
        std::vector<std::size_t> held_out;
        for (std::size_t i = 0; i < ds.samples.size(); ++i) {
            if (plan.assignments[i] == fold)
                held_out.push_back(i);
            else
                train.add(ds.samples[i]);
        }
        auto model = trainer(train, seed + static_cast<std::uint64_t>(fold));

        std::vector<double> scores;
        std::vector<Label> labels;
        scores.reserve(held_out.size());
        labels.reserve(held_out.size());
        for (auto i : held_out) {
            scores.push_back(model->score(ds.samples[i].bits));
            labels.push_back(ds.samples[i].label);
        }
        auto c = confusion(scores, labels, kDecisionThreshold);
        pooled.tp += c.tp;
        pooled.tn += c.tn;
        pooled.fp += c.fp;
        pooled.fn += c.fn;
        oof_scores.insert(oof_scores.end(), scores.begin(), scores.end());
        oof_labels.insert(oof_labels.end(), labels.begin(), labels.end());
    }

    EvalReport report = metrics(pooled);
    report.auc = roc_auc(oof_scores, oof_labels);
    return report;
}

} // namespace dldroid::eval
