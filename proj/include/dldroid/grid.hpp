#pragma once

#include <vector>

#include "dldroid/evalcore.hpp"
#include "dldroid/mlp.hpp"

namespace dldroid::learn {

struct GridRow {
    MlpConfig config;
    eval::EvalReport report;
    double wall_seconds = 0.0;
};

/// Rows sorted by weighted FM descending; `best` points at the winner after
/// tie-breaking by fewer total neurons, fewer layers, then shorter runtime.
struct GridResult {
    std::vector<GridRow> rows;
    std::size_t best = 0;
};

/// The 22 hidden-layer combinations explored in the experiments.
std::vector<std::vector<int>> default_grid();

GridResult grid_search(const std::vector<MlpConfig>& configs, const Dataset& ds, int k,
                       std::uint64_t seed);

} // namespace dldroid::learn
