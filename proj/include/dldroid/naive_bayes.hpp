#pragma once

#include <span>
#include <vector>

#include "dldroid/evalcore.hpp"
#include "dldroid/types.hpp"

namespace dldroid::learn {

/// Bernoulli naive Bayes with Laplace smoothing (alpha = 1), log-space.
struct NbModel {
    double log_prior_malware = 0.0;
    double log_prior_benign = 0.0;
    std::vector<double> log_p1_malware, log_p0_malware;
    std::vector<double> log_p1_benign, log_p0_benign;
    int input_width = 0;
};

NbModel nb_train(const Dataset& train);

/// Posterior P(malware | bits).
double nb_predict(const NbModel& model, std::span<const std::uint8_t> bits);

class NbClassifier : public eval::Classifier {
public:
    explicit NbClassifier(NbModel model) : model_(std::move(model)) {}
    double score(std::span<const std::uint8_t> bits) const override {
        return nb_predict(model_, bits);
    }

private:
    NbModel model_;
};

eval::TrainFn nb_trainer();

} // namespace dldroid::learn
