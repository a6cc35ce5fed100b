#include "dldroid/model_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace dldroid::learn {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json meta_json(const ModelMeta& meta) {
    return json{{"tool_version", meta.tool_version},
                {"command_line", meta.command_line},
                {"seed", meta.seed}};
}

json load_envelope(const std::filesystem::path& path, const std::string& kind,
                   const FeatureCatalog& catalog) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "bad model file " + path.string() + ": " + e.what());
    }
    if (j.value("format_version", -1) != kFormatVersion)
        throw Error(ErrorCode::Io, "unsupported model format version in " + path.string());
    if (j.value("kind", "") != kind)
        throw Error(ErrorCode::Io, "model file " + path.string() + " holds a '" +
                                       j.value("kind", "?") + "' model, expected '" + kind + "'");
    if (j.value("catalog_fingerprint", "") != catalog_fingerprint(catalog))
        throw Error(ErrorCode::CatalogMismatch,
                    "model was trained against a different feature catalog");
    return j;
}

void write_envelope(json j, const std::string& kind, const FeatureCatalog& catalog,
                    const std::filesystem::path& path, const ModelMeta& meta) {
    j["format_version"] = kFormatVersion;
    j["kind"] = kind;
    j["catalog_fingerprint"] = catalog_fingerprint(catalog);
    j["meta"] = meta_json(meta);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    return m;
}

json tree_json(const TreeNode* node) {
    if (node->is_leaf()) return json{{"score", node->score}};
    return json{{"feature", node->feature},
                {"zero", tree_json(node->zero.get())},
                {"one", tree_json(node->one.get())}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j, int& count) {
    auto node = std::make_unique<TreeNode>();
    ++count;
    if (j.contains("feature")) {
        node->feature = j.at("feature").get<int>();
        node->zero = tree_from_json(j.at("zero"), count);
        node->one = tree_from_json(j.at("one"), count);
    } else {
        node->score = j.at("score").get<double>();
    }
    return node;
}

} // namespace

std::string catalog_fingerprint(const FeatureCatalog& catalog) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](char ch) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ULL;
    };
    for (const auto& f : catalog.features()) {
        for (char ch : f.name) mix(ch);
        mix('\n');
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void save_mlp(const MlpModel& model, const FeatureCatalog& catalog,
              const std::filesystem::path& path, const ModelMeta& meta) {
    json j;
    j["input_width"] = model.input_width;
    j["config"] = {{"hidden_layers", model.config.hidden_layers},
                   {"seed", model.config.seed},
                   {"epochs", model.config.epochs},
                   {"batch_size", model.config.batch_size},
                   {"learning_rate", model.config.learning_rate},
                   {"l2", model.config.l2},
                   {"patience", model.config.patience}};
    j["epochs_run"] = model.epochs_run;
    j["final_loss"] = model.final_loss;
    json layers = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        json b = json::array();
        for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) b.push_back(model.biases[l](i));
        layers.push_back(json{{"weights", matrix_json(model.weights[l])}, {"biases", std::move(b)}});
    }
    j["layers"] = std::move(layers);
    write_envelope(std::move(j), "mlp", catalog, path, meta);
}

MlpModel load_mlp(const std::filesystem::path& path, const FeatureCatalog& catalog) {
    json j = load_envelope(path, "mlp", catalog);
    MlpModel m;
    m.input_width = j.at("input_width").get<int>();
    const json& cfg = j.at("config");
    m.config.hidden_layers = cfg.at("hidden_layers").get<std::vector<int>>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.config.epochs = cfg.at("epochs").get<int>();
    m.config.batch_size = cfg.at("batch_size").get<int>();
    m.config.learning_rate = cfg.at("learning_rate").get<double>();
    m.config.l2 = cfg.at("l2").get<double>();
    m.config.patience = cfg.at("patience").get<int>();
    m.epochs_run = j.value("epochs_run", 0);
    m.final_loss = j.value("final_loss", 0.0);
    for (const auto& layer : j.at("layers")) {
        m.weights.push_back(matrix_from_json(layer.at("weights")));
        const auto& b = layer.at("biases");
        Eigen::VectorXd bias(b.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            bias(static_cast<Eigen::Index>(i)) = b[i].get<double>();
        m.biases.push_back(std::move(bias));
    }
    return m;
}

void save_nb(const NbModel& model, const FeatureCatalog& catalog,
             const std::filesystem::path& path, const ModelMeta& meta) {
    json j;
    j["input_width"] = model.input_width;
    j["log_prior_malware"] = model.log_prior_malware;
    j["log_prior_benign"] = model.log_prior_benign;
    j["log_p1_malware"] = model.log_p1_malware;
    j["log_p0_malware"] = model.log_p0_malware;
    j["log_p1_benign"] = model.log_p1_benign;
    j["log_p0_benign"] = model.log_p0_benign;
    write_envelope(std::move(j), "nb", catalog, path, meta);
}

NbModel load_nb(const std::filesystem::path& path, const FeatureCatalog& catalog) {
    json j = load_envelope(path, "nb", catalog);
    NbModel m;
    m.input_width = j.at("input_width").get<int>();
    m.log_prior_malware = j.at("log_prior_malware").get<double>();
    m.log_prior_benign = j.at("log_prior_benign").get<double>();
    m.log_p1_malware = j.at("log_p1_malware").get<std::vector<double>>();
    m.log_p0_malware = j.at("log_p0_malware").get<std::vector<double>>();
    m.log_p1_benign = j.at("log_p1_benign").get<std::vector<double>>();
    m.log_p0_benign = j.at("log_p0_benign").get<std::vector<double>>();
    return m;
}

void save_tree(const TreeModel& model, const FeatureCatalog& catalog,
               const std::filesystem::path& path, const ModelMeta& meta) {
    json j;
    j["input_width"] = model.input_width;
    j["max_depth"] = model.max_depth;
    j["min_leaf"] = model.min_leaf;
    j["root"] = tree_json(model.root.get());
    write_envelope(std::move(j), "tree", catalog, path, meta);
}

TreeModel load_tree(const std::filesystem::path& path, const FeatureCatalog& catalog) {
    json j = load_envelope(path, "tree", catalog);
    TreeModel m;
    m.input_width = j.at("input_width").get<int>();
    m.max_depth = j.at("max_depth").get<int>();
    m.min_leaf = j.at("min_leaf").get<int>();
    int count = 0;
    m.root = tree_from_json(j.at("root"), count);
    m.node_count = count;
    return m;
}

std::string peek_model_kind(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "bad model file " + path.string() + ": " + e.what());
    }
    return j.value("kind", "");
}

} // namespace dldroid::learn
