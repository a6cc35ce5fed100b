#include "dldroid/decision_tree.hpp"

#include "dldroid/ranking.hpp"

#include <vector>

namespace dldroid::learn {

namespace {

struct Builder {
    const Dataset& ds;
    int max_depth;
    int min_leaf;
    int nodes = 0;

    std::unique_ptr<TreeNode> build(const std::vector<std::size_t>& members, int depth) {
        auto node = std::make_unique<TreeNode>();
        ++nodes;

        std::size_t malware = 0;
        for (auto i : members)
            if (ds.samples[i].label == Label::Malware) ++malware;
        node->score = members.empty() ? 0.0
                                      : static_cast<double>(malware) / static_cast<double>(members.size());

        const bool pure = malware == 0 || malware == members.size();
        if (pure || depth >= max_depth) return node;

        std::vector<Label> labels;
        labels.reserve(members.size());
        for (auto i : members) labels.push_back(ds.samples[i].label);

        int best_feature = -1;
        double best_gain = 0.0;
        std::vector<std::uint8_t> column(members.size());
        for (std::size_t f = 0; f < ds.catalog.size(); ++f) {
            std::size_t ones = 0;
            for (std::size_t r = 0; r < members.size(); ++r) {
                column[r] = ds.samples[members[r]].bits[f];
                ones += column[r];
            }
            const std::size_t zeros = members.size() - ones;
            if (ones < static_cast<std::size_t>(min_leaf) || zeros < static_cast<std::size_t>(min_leaf))
                continue;
            double gain = ranking::info_gain(column, labels);
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
            }
        }
        if (best_feature < 0 || best_gain <= 0.0) return node;

        std::vector<std::size_t> left, right;
        for (auto i : members)
            (ds.samples[i].bits[static_cast<std::size_t>(best_feature)] ? right : left).push_back(i);
        node->feature = best_feature;
        node->zero = build(left, depth + 1);
        node->one = build(right, depth + 1);
        return node;
    }
};

} // namespace

TreeModel tree_train(const Dataset& train, int max_depth, int min_leaf) {
    if (train.count(Label::Malware) == 0 || train.count(Label::Benign) == 0)
        throw Error(ErrorCode::SingleClassTrainSet, "tree training requires both classes");
    if (max_depth < 0 || min_leaf < 1)
        throw Error(ErrorCode::InvalidArgument, "bad depth or leaf bound");

    std::vector<std::size_t> all(train.samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    Builder b{train, max_depth, min_leaf};
    TreeModel model;
    model.root = b.build(all, 0);
    model.input_width = static_cast<int>(train.catalog.size());
    model.max_depth = max_depth;
    model.min_leaf = min_leaf;
    model.node_count = b.nodes;
    return model;
}

double tree_predict(const TreeModel& model, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != model.input_width)
        throw Error(ErrorCode::ShapeMismatch, "input width != model width");
    const TreeNode* node = model.root.get();
    while (!node->is_leaf())
        node = (bits[static_cast<std::size_t>(node->feature)] ? node->one : node->zero).get();
    return node->score;
}

eval::TrainFn tree_trainer(int max_depth, int min_leaf) {
    return [max_depth, min_leaf](const Dataset& train, std::uint64_t) -> std::unique_ptr<eval::Classifier> {
        return std::make_unique<TreeClassifier>(tree_train(train, max_depth, min_leaf));
    };
}

} // namespace dldroid::learn
