#include <doctest.h>

#include "dldroid/ingest.hpp"
#include "dldroid/ranking.hpp"
#include "dldroid/synthcorpus.hpp"
#include "support.hpp"

#include <cmath>

using namespace dldroid;
using support::error_code_of;

namespace {

FeatureCatalog small_catalog() {
    return FeatureCatalog::from_features({
        {"api.alpha", FeatureCategory::Attribute},
        {"api.beta", FeatureCategory::Attribute},
        {"action.GAMMA", FeatureCategory::ActionEvent},
        {"permission.DELTA", FeatureCategory::Permission},
        {"permission.EPSILON", FeatureCategory::Permission},
    });
}

synth::GenParams uniform_params(const FeatureCatalog& cat, double p, std::size_t n_m,
                                std::size_t n_b, std::uint64_t seed) {
    synth::GenParams params;
    params.n_malware = n_m;
    params.n_benign = n_b;
    params.catalog = cat;
    params.p_malware.assign(cat.size(), p);
    params.p_benign.assign(cat.size(), p);
    params.seed = seed;
    return params;
}

std::size_t popcount(const std::vector<std::uint8_t>& bits) {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

} // namespace

TEST_SUITE("synthcorpus") {

TEST_CASE("activation probability extremes") {
    auto cat = small_catalog();
    SUBCASE("p = 1 fills the latent set") {
        auto corpus = synth::gen_corpus(uniform_params(cat, 1.0, 3, 3, 1));
        REQUIRE(corpus.size() == 6);
        for (const auto& app : corpus) CHECK(app.latent.size() == cat.size());
    }
    SUBCASE("p = 0 leaves latent sets empty") {
        auto corpus = synth::gen_corpus(uniform_params(cat, 0.0, 3, 3, 1));
        for (const auto& app : corpus) CHECK(app.latent.empty());
    }
}

TEST_CASE("permission features always sit at depth zero") {
    auto cat = small_catalog();
    auto corpus = synth::gen_corpus(uniform_params(cat, 1.0, 5, 5, 9));
    for (const auto& app : corpus)
        for (const auto& lf : app.latent) {
            if (cat.at(lf.feature).category == FeatureCategory::Permission)
                CHECK(lf.depth == 0);
            else {
                CHECK(lf.depth >= 1);
                CHECK(lf.depth <= 3);
            }
        }
}

TEST_CASE("gen_corpus validates parameters") {
    synth::GenParams params;
    CHECK(error_code_of([&] { synth::gen_corpus(params); }) == ErrorCode::EmptyCatalog);

    auto bad = uniform_params(small_catalog(), 0.5, 2, 2, 1);
    bad.p_malware[0] = 1.5;
    CHECK(error_code_of([&] { synth::gen_corpus(bad); }) == ErrorCode::InvalidArgument);

    auto short_vec = uniform_params(small_catalog(), 0.5, 2, 2, 1);
    short_vec.p_benign.pop_back();
    CHECK(error_code_of([&] { synth::gen_corpus(short_vec); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("gen_corpus is reproducible and seed-sensitive") {
    auto params = uniform_params(small_catalog(), 0.5, 20, 20, 77);
    auto a = synth::gen_corpus(params);
    auto b = synth::gen_corpus(params);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].app_id == b[i].app_id);
        CHECK(a[i].latent.size() == b[i].latent.size());
        for (std::size_t j = 0; j < a[i].latent.size(); ++j) {
            CHECK(a[i].latent[j].feature == b[i].latent[j].feature);
            CHECK(a[i].latent[j].depth == b[i].latent[j].depth);
        }
    }
    params.seed = 78;
    auto c = synth::gen_corpus(params);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i)
        any_diff = a[i].latent.size() != c[i].latent.size();
    CHECK(any_diff);
}

TEST_CASE("empirical presence rates stay within 3 sigma of the binomial") {
    auto cat = small_catalog();
    synth::GenParams params = uniform_params(cat, 0.0, 1000, 1000, 4242);
    auto idx = cat.index_of("permission.DELTA");
    REQUIRE(idx.has_value());
    params.p_malware[*idx] = 0.45;
    params.p_benign[*idx] = 0.05;
    auto corpus = synth::gen_corpus(params);

    std::size_t malware_hits = 0, benign_hits = 0;
    for (const auto& app : corpus) {
        bool has = false;
        for (const auto& lf : app.latent) has = has || lf.feature == *idx;
        if (app.label == Label::Malware && has) ++malware_hits;
        if (app.label == Label::Benign && has) ++benign_hits;
    }
    double sigma_m = std::sqrt(1000 * 0.45 * 0.55);
    double sigma_b = std::sqrt(1000 * 0.05 * 0.95);
    CHECK(std::abs(static_cast<double>(malware_hits) - 450.0) <= 3.0 * sigma_m);
    CHECK(std::abs(static_cast<double>(benign_hits) - 50.0) <= 3.0 * sigma_b);
}

TEST_CASE("explore respects depth and trigger rate") {
    // One app with 10,000 depth-2 latent features.
    std::vector<Feature> features;
    for (int f = 0; f < 10000; ++f)
        features.push_back({"api.f" + std::to_string(f), FeatureCategory::Attribute});
    auto cat = FeatureCatalog::from_features(std::move(features));
    synth::AppBehaviorModel app;
    app.app_id = "probe";
    app.label = Label::Malware;
    for (std::uint32_t f = 0; f < cat.size(); ++f) app.latent.push_back({f, 2});

    SUBCASE("r = 1 observes everything") {
        synth::ExplorePolicy all{synth::ExploreMode::Stateful, 1.0, 0};
        auto obs = synth::explore(app, cat, all, 5);
        CHECK(obs.tokens.size() == app.latent.size());
    }
    SUBCASE("depth-0 features always observed") {
        synth::AppBehaviorModel shallow;
        shallow.latent = {{0, 0}, {1, 0}};
        synth::ExplorePolicy weak{synth::ExploreMode::Stateless, 0.01, 0};
        auto obs = synth::explore(shallow, cat, weak, 5);
        CHECK(obs.tokens.size() == 2);
    }
    SUBCASE("observed fraction tracks r^d within 3 sigma") {
        for (double r : {0.6, 0.9}) {
            synth::ExplorePolicy policy{synth::ExploreMode::Stateless, r, 0};
            auto obs = synth::explore(app, cat, policy, 123);
            double expect = r * r;
            double sigma = std::sqrt(10000.0 * expect * (1.0 - expect));
            CHECK(std::abs(static_cast<double>(obs.tokens.size()) - 10000.0 * expect) <=
                  3.0 * sigma);
        }
    }
}

TEST_CASE("scenario datasets share apps and couple draws") {
    auto cat = small_catalog();
    auto corpus = synth::gen_corpus(uniform_params(cat, 0.7, 100, 100, 15));
    auto scenarios = synth::build_scenario_datasets(corpus, cat, synth::default_stateless(),
                                                    synth::default_stateful(), 15);

    REQUIRE(scenarios.stateless.samples.size() == corpus.size());
    REQUIRE(scenarios.stateful.samples.size() == corpus.size());

    auto perm_delta = *cat.index_of("permission.DELTA");
    auto perm_eps = *cat.index_of("permission.EPSILON");
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& sl = scenarios.stateless.samples[i];
        const auto& sf = scenarios.stateful.samples[i];
        CHECK(sl.app_id == corpus[i].app_id);
        CHECK(sl.app_id == sf.app_id);
        CHECK(sl.label == sf.label);

        // coupled draws: stateful observations are a superset
        for (std::size_t f = 0; f < cat.size(); ++f)
            if (sl.bits[f]) CHECK(sf.bits[f]);

        // permission bits identical across scenarios
        CHECK(sl.bits[perm_delta] == sf.bits[perm_delta]);
        CHECK(sl.bits[perm_eps] == sf.bits[perm_eps]);

        // observed is a subset of latent
        std::set<std::uint32_t> latent;
        for (const auto& lf : corpus[i].latent) latent.insert(lf.feature);
        for (std::size_t f = 0; f < cat.size(); ++f)
            if (sf.bits[f]) CHECK(latent.count(static_cast<std::uint32_t>(f)) == 1);
    }
}

TEST_CASE("equal trigger rates give identical coupled datasets") {
    auto cat = small_catalog();
    auto corpus = synth::gen_corpus(uniform_params(cat, 0.6, 50, 50, 21));
    synth::ExplorePolicy same_a{synth::ExploreMode::Stateless, 0.7, 0};
    synth::ExplorePolicy same_b{synth::ExploreMode::Stateful, 0.7, 0};
    auto scenarios = synth::build_scenario_datasets(corpus, cat, same_a, same_b, 21);
    CHECK(ingest::data_equal(scenarios.stateless, scenarios.stateful));
}

TEST_CASE("scenario builds are reproducible") {
    auto cat = small_catalog();
    auto corpus = synth::gen_corpus(uniform_params(cat, 0.5, 30, 30, 33));
    auto a = synth::build_scenario_datasets(corpus, cat, synth::default_stateless(),
                                            synth::default_stateful(), 33);
    auto b = synth::build_scenario_datasets(corpus, cat, synth::default_stateless(),
                                            synth::default_stateful(), 33);
    CHECK(ingest::data_equal(a.stateless, b.stateless));
    CHECK(ingest::data_equal(a.stateful, b.stateful));
}

TEST_CASE("stateful exploration yields higher info gain for the telephony probe") {
    auto cat = ingest::load_catalog(DLDROID_CATALOG_FILE);
    auto params = synth::reference_params(cat, 400, 400, 42);
    auto corpus = synth::gen_corpus(params);
    auto scenarios = synth::build_scenario_datasets(corpus, cat, synth::default_stateless(),
                                                    synth::default_stateful(), 42);

    auto idx = *cat.index_of("TelephonyManager;->getDeviceId");
    std::vector<std::uint8_t> col_sl, col_sf;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        col_sl.push_back(scenarios.stateless.samples[i].bits[idx]);
        col_sf.push_back(scenarios.stateful.samples[i].bits[idx]);
        labels.push_back(scenarios.stateless.samples[i].label);
    }
    double ig_sl = ranking::info_gain(col_sl, labels);
    double ig_sf = ranking::info_gain(col_sf, labels);
    CHECK(ig_sf > ig_sl);
}

} // TEST_SUITE
