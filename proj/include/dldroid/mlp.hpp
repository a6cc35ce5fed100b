#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "dldroid/evalcore.hpp"
#include "dldroid/types.hpp"

namespace dldroid::learn {

struct MlpConfig {
    std::vector<int> hidden_layers = {200, 200, 200};
    std::uint64_t seed = 42;
    int epochs = 10;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double l2 = 1e-5;
    int patience = 3; // early-stop rounds on validation weighted FM

    int total_neurons() const;
};

/// Rectifier hidden layers, single sigmoid output. weights[l] is
/// (fan_in x fan_out); biases[l] has fan_out entries.
struct MlpModel {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    int input_width = 0;
    MlpConfig config;
    int epochs_run = 0;
    double final_loss = 0.0;
};

/// Mini-batch Adam on binary cross-entropy + L2, deterministic given the
/// config seed. `valid` may be empty, which disables early stopping.
MlpModel mlp_train(const MlpConfig& cfg, const Dataset& train, const Dataset& valid);

double mlp_predict(const MlpModel& model, std::span<const std::uint8_t> bits);
std::vector<double> mlp_predict_batch(const MlpModel& model, const Dataset& ds);

struct MlpGradients {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;
};

/// Loss/gradient entry points on explicit batches; the gradient-check tests
/// compare these against finite differences.
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

Eigen::MatrixXd dataset_matrix(const Dataset& ds);
Eigen::VectorXd dataset_targets(const Dataset& ds);

class MlpClassifier : public eval::Classifier {
public:
    explicit MlpClassifier(MlpModel model) : model_(std::move(model)) {}
    double score(std::span<const std::uint8_t> bits) const override {
        return mlp_predict(model_, bits);
    }
    const MlpModel& model() const { return model_; }

private:
    MlpModel model_;
};

/// Cross-validation adapter: carves a stratified 10% validation split from
/// each training fold (skipped when a class has fewer than 20 samples).
eval::TrainFn mlp_trainer(MlpConfig cfg);

} // namespace dldroid::learn
