#pragma once

#include <memory>
#include <span>

#include "dldroid/evalcore.hpp"
#include "dldroid/types.hpp"

namespace dldroid::learn {

/// Binary-feature tree node; feature < 0 marks a leaf. `zero`/`one` follow
/// the split feature's bit value.
struct TreeNode {
    int feature = -1;
    double score = 0.0; // leaf: malware fraction of the training samples that reached it
    std::unique_ptr<TreeNode> zero;
    std::unique_ptr<TreeNode> one;

    bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
    std::unique_ptr<TreeNode> root;
    int input_width = 0;
    int max_depth = 0;
    int min_leaf = 1;
    int node_count = 0;
};

/// Greedy information-gain splits; stops on purity, depth limit, min_leaf,
/// or zero gain.
TreeModel tree_train(const Dataset& train, int max_depth, int min_leaf);

double tree_predict(const TreeModel& model, std::span<const std::uint8_t> bits);

class TreeClassifier : public eval::Classifier {
public:
    explicit TreeClassifier(TreeModel model) : model_(std::move(model)) {}
    double score(std::span<const std::uint8_t> bits) const override {
        return tree_predict(model_, bits);
    }

private:
    TreeModel model_;
};

eval::TrainFn tree_trainer(int max_depth, int min_leaf);

} // namespace dldroid::learn
