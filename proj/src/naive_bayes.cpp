#include "dldroid/naive_bayes.hpp"

#include <cmath>

namespace dldroid::learn {

NbModel nb_train(const Dataset& train) {
    const std::size_t n_m = train.count(Label::Malware);
    const std::size_t n_b = train.count(Label::Benign);
    if (n_m == 0 || n_b == 0)
        throw Error(ErrorCode::SingleClassTrainSet, "naive Bayes requires both classes");

    const std::size_t width = train.catalog.size();
    std::vector<std::size_t> ones_m(width, 0), ones_b(width, 0);
    for (const auto& s : train.samples) {
        auto& ones = s.label == Label::Malware ? ones_m : ones_b;
        for (std::size_t f = 0; f < width; ++f) ones[f] += s.bits[f];
    }

    NbModel m;
    m.input_width = static_cast<int>(width);
    const double n = static_cast<double>(n_m + n_b);
    m.log_prior_malware = std::log(static_cast<double>(n_m) / n);
    m.log_prior_benign = std::log(static_cast<double>(n_b) / n);
    m.log_p1_malware.resize(width);
    m.log_p0_malware.resize(width);
    m.log_p1_benign.resize(width);
    m.log_p0_benign.resize(width);
    for (std::size_t f = 0; f < width; ++f) {
        double p1m = (static_cast<double>(ones_m[f]) + 1.0) / (static_cast<double>(n_m) + 2.0);
        double p1b = (static_cast<double>(ones_b[f]) + 1.0) / (static_cast<double>(n_b) + 2.0);
        m.log_p1_malware[f] = std::log(p1m);
        m.log_p0_malware[f] = std::log1p(-p1m);
        m.log_p1_benign[f] = std::log(p1b);
        m.log_p0_benign[f] = std::log1p(-p1b);
    }
    return m;
}

double nb_predict(const NbModel& model, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != model.input_width)
        throw Error(ErrorCode::ShapeMismatch, "input width != model width");
    double log_m = model.log_prior_malware;
    double log_b = model.log_prior_benign;
    for (std::size_t f = 0; f < bits.size(); ++f) {
        if (bits[f]) {
            log_m += model.log_p1_malware[f];
            log_b += model.log_p1_benign[f];
        } else {
            log_m += model.log_p0_malware[f];
            log_b += model.log_p0_benign[f];
        }
    }
    // P(m|x) = 1 / (1 + exp(log_b - log_m))
    return 1.0 / (1.0 + std::exp(log_b - log_m));
}

eval::TrainFn nb_trainer() {
    return [](const Dataset& train, std::uint64_t) -> std::unique_ptr<eval::Classifier> {
        return std::make_unique<NbClassifier>(nb_train(train));
    };
}

} // namespace dldroid::learn
