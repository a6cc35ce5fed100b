#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dldroid/types.hpp"

namespace dldroid::synth {

struct GenParams {
    std::size_t n_malware = 0;
    std::size_t n_benign = 0;
    FeatureCatalog catalog;
    std::vector<double> p_malware; // per-feature Bernoulli activation, malware apps
    std::vector<double> p_benign;  // per-feature Bernoulli activation, benign apps
    int max_depth = 3;
    std::uint64_t seed = 42;
};

struct LatentFeature {
    std::uint32_t feature = 0; // catalog index
    int depth = 0;             // 0 = static (permission), >= 1 = runtime reachability depth
};

struct AppBehaviorModel {
    std::string app_id;
    Label label = Label::Benign;
    std::vector<LatentFeature> latent; // ascending by catalog index
};

enum class ExploreMode { Stateless, Stateful };

/// `trigger_rate` is the per-depth trigger probability: a latent feature at
/// depth d is observed with probability trigger_rate^d. The event budget is
/// carried as run metadata; the coverage model does not consume it.
struct ExplorePolicy {
    ExploreMode mode = ExploreMode::Stateless;
    double trigger_rate = 0.6;
    std::uint64_t event_budget = 0;
};

ExplorePolicy default_stateless(); // Monkey-like: r = 0.6, 4000-event budget
ExplorePolicy default_stateful();  // DroidBot-like: r = 0.9, 1800-event budget

/// Derived per-app stream so parallel and sequential generation agree.
std::uint64_t app_seed(std::uint64_t seed, std::size_t app_index);

/// Deterministic given params.seed. Malware apps come first.
std::vector<AppBehaviorModel> gen_corpus(const GenParams& params);

/// Observes each latent feature independently with probability r^depth;
/// depth-0 features are always observed.
ObservationSet explore(const AppBehaviorModel& app, const FeatureCatalog& catalog,
                       const ExplorePolicy& policy, std::uint64_t seed);

struct ScenarioDatasets {
    Dataset stateless;
    Dataset stateful;
};

/// Two datasets over the same apps and labels, differing only in observed
/// dynamic bits. With `coupled` the same uniform draw is shared per
/// (app, feature), so a higher trigger rate observes a superset per app.
ScenarioDatasets build_scenario_datasets(const std::vector<AppBehaviorModel>& corpus,
                                         const FeatureCatalog& catalog,
                                         const ExplorePolicy& stateless_policy,
                                         const ExplorePolicy& stateful_policy, std::uint64_t seed,
                                         bool coupled = true);

/// Reference corpus parameters: class-conditional activation rates for the
/// well-known SMS/telephony/install tokens, low uninformative background
/// rates everywhere else.
GenParams reference_params(const FeatureCatalog& catalog, std::size_t n_malware,
                           std::size_t n_benign, std::uint64_t seed);

} // namespace dldroid::synth
