#pragma once

#include <filesystem>
#include <string>

#include "dldroid/decision_tree.hpp"
#include "dldroid/mlp.hpp"
#include "dldroid/naive_bayes.hpp"
#include "dldroid/types.hpp"

namespace dldroid::learn {

/// FNV-1a 64 over the newline-joined feature name list, hex encoded.
std::string catalog_fingerprint(const FeatureCatalog& catalog);

struct ModelMeta {
    std::string tool_version;
    std::string command_line;
    std::uint64_t seed = 0;
};

/// Versioned JSON containers. Loading verifies the format version, model
/// kind, and catalog fingerprint (CatalogMismatch on a different catalog).
void save_mlp(const MlpModel& model, const FeatureCatalog& catalog,
              const std::filesystem::path& path, const ModelMeta& meta = {});
MlpModel load_mlp(const std::filesystem::path& path, const FeatureCatalog& catalog);

void save_nb(const NbModel& model, const FeatureCatalog& catalog,
             const std::filesystem::path& path, const ModelMeta& meta = {});
NbModel load_nb(const std::filesystem::path& path, const FeatureCatalog& catalog);

void save_tree(const TreeModel& model, const FeatureCatalog& catalog,
               const std::filesystem::path& path, const ModelMeta& meta = {});
TreeModel load_tree(const std::filesystem::path& path, const FeatureCatalog& catalog);

/// Kind string stored in a model file ("mlp", "nb", "tree").
std::string peek_model_kind(const std::filesystem::path& path);

} // namespace dldroid::learn
