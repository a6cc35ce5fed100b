#include "dldroid/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dldroid::learn {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

double softplus(double z) { return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_config(const MlpConfig& cfg) {
    if (cfg.hidden_layers.empty())
        throw Error(ErrorCode::InvalidArgument, "at least one hidden layer required");
    for (int w : cfg.hidden_layers)
        if (w <= 0) throw Error(ErrorCode::InvalidArgument, "hidden layer widths must be positive");
    if (cfg.batch_size <= 0 || cfg.epochs < 0)
        throw Error(ErrorCode::InvalidArgument, "bad batch size or epoch count");
}

struct ForwardPass {
    std::vector<Eigen::MatrixXd> pre;  // pre-activations per layer
    std::vector<Eigen::MatrixXd> post; // post-activations; post[0] is the input
    Eigen::VectorXd output;            // sigmoid scores
};

ForwardPass forward(const MlpModel& m, const Eigen::MatrixXd& x) {
    ForwardPass f;
    f.post.push_back(x);
    const std::size_t layers = m.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (f.post.back() * m.weights[l]).rowwise() + m.biases[l].transpose();
        f.pre.push_back(z);
        if (l + 1 < layers)
            f.post.push_back(z.cwiseMax(0.0));
        else
            f.output = z.col(0).unaryExpr([](double v) { return sigmoid(v); });
    }
    return f;
}

double bce_loss(const Eigen::MatrixXd& logits, const Eigen::VectorXd& y) {
    // softplus(z) - y*z is the numerically stable form of the cross-entropy.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        sum += softplus(logits(i, 0)) - y(i) * logits(i, 0);
    return sum / static_cast<double>(y.size());
}

double l2_penalty(const MlpModel& m) {
    double sum = 0.0;
    for (const auto& w : m.weights) sum += w.squaredNorm();
    return 0.5 * m.config.l2 * sum;
}

struct AdamState {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    long step = 0;

    explicit AdamState(const MlpModel& model) {
        for (const auto& w : model.weights) {
            mw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
            vw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        }
        for (const auto& b : model.biases) {
            mb.push_back(Eigen::VectorXd::Zero(b.size()));
            vb.push_back(Eigen::VectorXd::Zero(b.size()));
        }
    }

    void update(MlpModel& model, const MlpGradients& g, double lr) {
        ++step;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            mw[l] = kBeta1 * mw[l] + (1.0 - kBeta1) * g.dw[l];
            vw[l] = kBeta2 * vw[l] + (1.0 - kBeta2) * g.dw[l].cwiseProduct(g.dw[l]);
            model.weights[l].array() -=
                lr * (mw[l].array() / bc1) / ((vw[l].array() / bc2).sqrt() + kEpsilon);
            mb[l] = kBeta1 * mb[l] + (1.0 - kBeta1) * g.db[l];
            vb[l] = kBeta2 * vb[l] + (1.0 - kBeta2) * g.db[l].cwiseProduct(g.db[l]);
            model.biases[l].array() -=
                lr * (mb[l].array() / bc1) / ((vb[l].array() / bc2).sqrt() + kEpsilon);
        }
    }
};

double validation_wfm(const MlpModel& model, const Dataset& valid) {
    std::vector<double> scores = mlp_predict_batch(model, valid);
    std::vector<Label> labels;
    labels.reserve(valid.samples.size());
    for (const auto& s : valid.samples) labels.push_back(s.label);
    auto c = eval::confusion(scores, labels, eval::kDecisionThreshold);
    return eval::metrics(c).weighted_fm;
}

} // namespace

int MlpConfig::total_neurons() const {
    return std::accumulate(hidden_layers.begin(), hidden_layers.end(), 0);
}

Eigen::MatrixXd dataset_matrix(const Dataset& ds) {
    Eigen::MatrixXd x(ds.samples.size(), ds.catalog.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        for (std::size_t j = 0; j < ds.catalog.size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.samples[i].bits[j];
    return x;
}

Eigen::VectorXd dataset_targets(const Dataset& ds) {
    Eigen::VectorXd y(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        y(static_cast<Eigen::Index>(i)) = ds.samples[i].label == Label::Malware ? 1.0 : 0.0;
    return y;
}

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    ForwardPass f = forward(model, x);
    return bce_loss(f.pre.back(), y) + l2_penalty(model);
}

MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    ForwardPass f = forward(model, x);
    const std::size_t layers = model.weights.size();
    const double batch = static_cast<double>(y.size());

    MlpGradients g;
    g.dw.resize(layers);
    g.db.resize(layers);

    // dL/dz at the output for mean cross-entropy.
    Eigen::MatrixXd delta = (f.output - y) / batch;
    for (std::size_t l = layers; l-- > 0;) {
        g.dw[l] = f.post[l].transpose() * delta + model.config.l2 * model.weights[l];
        g.db[l] = delta.colwise().sum().transpose();
        if (l > 0)
            delta = (delta * model.weights[l].transpose())
                        .cwiseProduct((f.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    return g;
}

MlpModel mlp_train(const MlpConfig& cfg, const Dataset& train, const Dataset& valid) {
    validate_config(cfg);
    if (train.count(Label::Malware) == 0 || train.count(Label::Benign) == 0)
        throw Error(ErrorCode::SingleClassTrainSet, "training set must contain both classes");
    if (!valid.samples.empty() && valid.catalog.size() != train.catalog.size())
        throw Error(ErrorCode::ShapeMismatch, "validation width differs from training width");

    MlpModel model;
    model.config = cfg;
    model.input_width = static_cast<int>(train.catalog.size());

    std::vector<int> dims;
    dims.push_back(model.input_width);
    dims.insert(dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    dims.push_back(1);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        double scale = std::sqrt(2.0 / static_cast<double>(dims[l]));
        Eigen::MatrixXd w(dims[l], dims[l + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = normal(rng) * scale;
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }

    const Eigen::MatrixXd x = dataset_matrix(train);
    const Eigen::VectorXd y = dataset_targets(train);
    const std::size_t n = train.samples.size();

    AdamState adam(model);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const bool early_stop = !valid.samples.empty();
    double best_wfm = -1.0;
    int stale = 0;
    MlpModel best = model;
    int epochs_run = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t len = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            Eigen::MatrixXd xb(len, x.cols());
            Eigen::VectorXd yb(len);
            for (std::size_t r = 0; r < len; ++r) {
                xb.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(order[start + r]));
                yb(static_cast<Eigen::Index>(r)) = y(static_cast<Eigen::Index>(order[start + r]));
            }
            MlpGradients g = mlp_gradients(model, xb, yb);
            adam.update(model, g, cfg.learning_rate);
        }
        ++epochs_run;

        if (early_stop) {
            double wfm = validation_wfm(model, valid);
            if (wfm > best_wfm + 1e-12) {
                best_wfm = wfm;
                best = model;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                break;
            }
        }
    }

    if (early_stop && best_wfm >= 0.0) {
        best.epochs_run = epochs_run;
        best.final_loss = mlp_loss(best, x, y);
        return best;
    }
    model.epochs_run = epochs_run;
    model.final_loss = n > 0 ? mlp_loss(model, x, y) : 0.0;
    return model;
}

double mlp_predict(const MlpModel& model, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != model.input_width)
        throw Error(ErrorCode::ShapeMismatch, "input width " + std::to_string(bits.size()) +
                                                  " != model width " + std::to_string(model.input_width));
    Eigen::MatrixXd x(1, model.input_width);
    for (std::size_t j = 0; j < bits.size(); ++j) x(0, static_cast<Eigen::Index>(j)) = bits[j];
    return forward(model, x).output(0);
}

std::vector<double> mlp_predict_batch(const MlpModel& model, const Dataset& ds) {
    if (static_cast<int>(ds.catalog.size()) != model.input_width)
        throw Error(ErrorCode::ShapeMismatch, "dataset width != model width");
    ForwardPass f = forward(model, dataset_matrix(ds));
    return {f.output.data(), f.output.data() + f.output.size()};
}

eval::TrainFn mlp_trainer(MlpConfig cfg) {
    return [cfg](const Dataset& train, std::uint64_t seed) -> std::unique_ptr<eval::Classifier> {
        MlpConfig fold_cfg = cfg;
        fold_cfg.seed = seed;

        Dataset fit;
        Dataset valid;
        fit.catalog = train.catalog;
        valid.catalog = train.catalog;
        // A 10% validation split below 2 samples per class makes the early
        // stop signal meaningless; train on everything instead.
        const std::size_t n_m = train.count(Label::Malware);
        const std::size_t n_b = train.count(Label::Benign);
        if (n_m >= 20 && n_b >= 20) {
            auto plan = eval::stratified_k_fold(train, 10, seed);
            for (std::size_t i = 0; i < train.samples.size(); ++i)
                (plan.assignments[i] == 0 ? valid : fit).add(train.samples[i]);
        } else {
            fit.samples = train.samples;
        }
        return std::make_unique<MlpClassifier>(mlp_train(fold_cfg, fit, valid));
    };
}

} // namespace dldroid::learn
