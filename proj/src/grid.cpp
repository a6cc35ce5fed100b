#include "dldroid/grid.hpp"

#include <algorithm>
#include <chrono>

namespace dldroid::learn {

std::vector<std::vector<int>> default_grid() {
    return {
        {50, 50},
        {100, 100},
        {200, 200},
        {300, 300},
        {400, 400},
        {500, 500},
        {50, 50, 50},
        {100, 50, 100},
        {50, 100, 50},
        {100, 100, 100},
        {100, 200, 100},
        {200, 100, 200},
        {200, 200, 200},
        {300, 100, 300},
        {300, 300, 300},
        {400, 400, 400},
        {500, 500, 500},
        {50, 50, 50, 50},
        {100, 100, 100, 100},
        {200, 200, 200, 200},
        {300, 300, 300, 300},
        {400, 400, 400, 400},
    };
}

GridResult grid_search(const std::vector<MlpConfig>& configs, const Dataset& ds, int k,
                       std::uint64_t seed) {
    if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "grid must contain at least one config");
    for (const auto& cfg : configs) {
        if (cfg.hidden_layers.empty() || cfg.hidden_layers.size() > 4)
            throw Error(ErrorCode::InvalidArgument, "grid configs must have 1 to 4 hidden layers");
    }

    GridResult result;
    result.rows.reserve(configs.size());
    for (const auto& cfg : configs) {
        auto start = std::chrono::steady_clock::now();
        auto report = eval::cross_validate(mlp_trainer(cfg), ds, k, seed);
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        result.rows.push_back({cfg, report, elapsed.count()});
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), [](const GridRow& a, const GridRow& b) {
        if (a.report.weighted_fm != b.report.weighted_fm)
            return a.report.weighted_fm > b.report.weighted_fm;
        if (a.config.total_neurons() != b.config.total_neurons())
            return a.config.total_neurons() < b.config.total_neurons();
        if (a.config.hidden_layers.size() != b.config.hidden_layers.size())
            return a.config.hidden_layers.size() < b.config.hidden_layers.size();
        return a.wall_seconds < b.wall_seconds;
    });
    result.best = 0;
    return result;
}

} // namespace dldroid::learn
