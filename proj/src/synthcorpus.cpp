#include "dldroid/synthcorpus.hpp"

#include "dldroid/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string_view>

namespace dldroid::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void validate(const GenParams& p) {
    if (p.catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "corpus catalog is empty");
    if (p.p_malware.size() != p.catalog.size() || p.p_benign.size() != p.catalog.size())
        throw Error(ErrorCode::LengthMismatch, "probability vectors must match catalog width");
    for (const auto& probs : {p.p_malware, p.p_benign})
        for (double v : probs)
            if (!(v >= 0.0 && v <= 1.0))
                throw Error(ErrorCode::InvalidArgument, "activation probabilities must be in [0,1]");
    if (p.max_depth < 0) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 0");
}

std::string make_app_id(Label label, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s_%05zu", label == Label::Malware ? "mal" : "ben", i);
    return buf;
}

} // namespace

ExplorePolicy default_stateless() { return {ExploreMode::Stateless, 0.6, 4000}; }
ExplorePolicy default_stateful() { return {ExploreMode::Stateful, 0.9, 1800}; }

std::uint64_t app_seed(std::uint64_t seed, std::size_t app_index) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(app_index) + 1));
}

std::vector<AppBehaviorModel> gen_corpus(const GenParams& params) {
    validate(params);
    std::vector<AppBehaviorModel> corpus;
    corpus.reserve(params.n_malware + params.n_benign);
    const std::size_t total = params.n_malware + params.n_benign;
    for (std::size_t i = 0; i < total; ++i) {
        const Label label = i < params.n_malware ? Label::Malware : Label::Benign;
        const std::size_t class_index = label == Label::Malware ? i : i - params.n_malware;
        const auto& probs = label == Label::Malware ? params.p_malware : params.p_benign;

        AppBehaviorModel app;
        app.app_id = make_app_id(label, class_index);
        app.label = label;
        std::mt19937_64 rng(app_seed(params.seed, i));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t f = 0; f < params.catalog.size(); ++f) {
            if (unit(rng) >= probs[f]) continue;
            int depth = 0;
            if (params.catalog.at(f).category != FeatureCategory::Permission && params.max_depth > 0) {
                std::uniform_int_distribution<int> d(1, params.max_depth);
                depth = d(rng);
            }
            app.latent.push_back({static_cast<std::uint32_t>(f), depth});
        }
        corpus.push_back(std::move(app));
    }
    return corpus;
}

ObservationSet explore(const AppBehaviorModel& app, const FeatureCatalog& catalog,
                       const ExplorePolicy& policy, std::uint64_t seed) {
    ObservationSet obs;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& lf : app.latent) {
        const double p = std::pow(policy.trigger_rate, lf.depth);
        if (unit(rng) < p) obs.tokens.insert(catalog.at(lf.feature).name);
    }
    return obs;
}

ScenarioDatasets build_scenario_datasets(const std::vector<AppBehaviorModel>& corpus,
                                         const FeatureCatalog& catalog,
                                         const ExplorePolicy& stateless_policy,
                                         const ExplorePolicy& stateful_policy, std::uint64_t seed,
                                         bool coupled) {
    ScenarioDatasets out;
    out.stateless.catalog = catalog;
    out.stateful.catalog = catalog;

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& app = corpus[i];
        ObservationSet obs_sl, obs_sf;
        if (coupled) {
            std::mt19937_64 rng(app_seed(seed, i));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (const auto& lf : app.latent) {
                const double u = unit(rng);
                const std::string& name = catalog.at(lf.feature).name;
                if (u < std::pow(stateless_policy.trigger_rate, lf.depth)) obs_sl.tokens.insert(name);
                if (u < std::pow(stateful_policy.trigger_rate, lf.depth)) obs_sf.tokens.insert(name);
            }
        } else {
            obs_sl = explore(app, catalog, stateless_policy, app_seed(seed ^ 0x5B5Bu, i));
            obs_sf = explore(app, catalog, stateful_policy, app_seed(seed ^ 0xA7A7u, i));
        }
        out.stateless.add(ingest::vectorize(obs_sl, app.label, catalog, app.app_id));
        out.stateful.add(ingest::vectorize(obs_sf, app.label, catalog, app.app_id));
    }
    return out;
}

namespace {

struct TokenRate {
    std::string_view token;
    double p_malware;
    double p_benign;
};

// Activation rates for the reference corpus. Derived from the per-class
// presence ratios of the usual SMS/telephony suspects in a ~11.5k malware /
// ~19.6k benign corpus.
constexpr TokenRate kReferenceRates[] = {
    {"permission.SEND_SMS", 0.446, 0.055},
    {"permission.READ_PHONE_STATE", 0.913, 0.519},
    {"TelephonyManager;->getDeviceId", 0.426, 0.103},
    {"com.android.vending.INSTALL_REFERRER", 0.064, 0.371},
    {"permission.RECEIVE_SMS", 0.352, 0.080},
    {"action.MOUNT_UNMOUNT_FILESYSTEMS", 0.251, 0.040},
    {"permission.WRITE_SMS", 0.247, 0.039},
    {"permission.READ_SMS", 0.312, 0.073},
    {"permission.SYSTEM_ALERT_WINDOW", 0.375, 0.116},
    {"action.SMS_RECEIVED", 0.210, 0.034},
    {"TelephonyManager;->getSubscriberId", 0.173, 0.020},
    {"action.USER_PRESENT", 0.229, 0.046},
    {"permission.INSTALL_PACKAGES", 0.143, 0.015},
    {"permission.ACCESS_MTK_MMHW", 0.095, 0.001},
    {"permission.GET_TASKS", 0.503, 0.257},
    {"permission.RECEIVE_BOOT_COMPLETED", 0.578, 0.325},
    {"methods/HttpPost;-><init>", 0.296, 0.101},
    {"permission.USE_CREDENTIALS", 0.027, 0.172},
    {"TelephonyManager;->getLine1Number", 0.124, 0.014},
    {"permission.ACCESS_WIFI_STATE", 0.731, 0.500},
    {"WifiManager;->getConnectionInfo", 0.233, 0.040},
    {"content/Context;->bindService", 0.050, 0.116},
    {"Ljava/util/TimerTask;-><init>", 0.643, 0.207},
    {"Ljava/io/FileOutputStream;->write", 0.328, 0.080},
    {"PackageManager;->checkPermission", 0.237, 0.044},
    {"Landroid/net/NetworkInfo;->getState", 0.142, 0.020},
    {"Ljava/io/File;->exists", 0.540, 0.171},
    {"security/MessageDigest;->getInstance", 0.426, 0.142},
    {"Landroid/content/Context;->unbindService", 0.023, 0.069},
    {"action.PHONE_STATE", 0.090, 0.011},
    {"action.PACKAGE_ADDED", 0.134, 0.026},
    {"TelephonyManager;->getSimSerialNumber", 0.075, 0.008},
    {"SmsManager;->sendTextMessage", 0.031, 0.0001},
    {"action.NEW_OUTGOING_CALL", 0.057, 0.009},
    {"permission.GET_ACCOUNTS", 0.262, 0.438},
};

} // namespace

GenParams reference_params(const FeatureCatalog& catalog, std::size_t n_malware,
                           std::size_t n_benign, std::uint64_t seed) {
    GenParams p;
    p.n_malware = n_malware;
    p.n_benign = n_benign;
    p.catalog = catalog;
    p.seed = seed;
    p.max_depth = 3;
    p.p_malware.resize(catalog.size());
    p.p_benign.resize(catalog.size());

    // Background features: low base rates, a slice of them weakly skewed
    // toward one class so the aggregate signal resembles a corpus where most
    // top-ranked features carry some information.
    std::mt19937_64 rng(splitmix64(seed ^ 0xC0FFEEULL));
    std::uniform_real_distribution<double> background(0.02, 0.10);
    std::uniform_real_distribution<double> skew(0.04, 0.12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t f = 0; f < catalog.size(); ++f) {
        const double base = background(rng);
        p.p_malware[f] = base;
        p.p_benign[f] = base;
        if (unit(rng) < 0.4) {
            auto& biased = unit(rng) < 0.5 ? p.p_malware[f] : p.p_benign[f];
            biased = base + skew(rng);
        }
    }
    for (const auto& rate : kReferenceRates) {
        if (auto idx = catalog.index_of(rate.token)) {
            p.p_malware[*idx] = rate.p_malware;
            p.p_benign[*idx] = rate.p_benign;
        }
    }
    return p;
}

} // namespace dldroid::synth
