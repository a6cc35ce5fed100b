#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dldroid {

enum class ErrorCode {
    Io,
    DuplicateFeature,
    UnknownCategory,
    HeaderMismatch,
    NonBinaryCell,
    UnknownLabel,
    NotAZip,
    EntryMissing,
    UnsupportedCompression,
    CorruptEntry,
    BadMagic,
    TruncatedChunk,
    BadStringIndex,
    LengthMismatch,
    SingleClassDataset,
    KTooLarge,
    ClassTooSmall,
    EmptyEvalSet,
    SingleClassEvalSet,
    SingleClassTrainSet,
    ShapeMismatch,
    WidthMismatch,
    EmptyCatalog,
    CatalogMismatch,
    InvalidArgument,
};

/// Library-wide exception; `code()` identifies the failed contract.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

enum class Label : std::uint8_t { Benign = 0, Malware = 1 };

enum class FeatureCategory : std::uint8_t { Attribute = 0, ActionEvent = 1, Permission = 2 };

std::string_view to_string(FeatureCategory c);
FeatureCategory category_from_string(std::string_view s); // throws UnknownCategory

struct Feature {
    std::string name;
    FeatureCategory category = FeatureCategory::Attribute;
};

/// Ordered schema of named binary features. The order is the vector layout
/// and is preserved across save/load.
class FeatureCatalog {
public:
    FeatureCatalog() = default;

    /// Throws DuplicateFeature if a name repeats.
    static FeatureCatalog from_features(std::vector<Feature> features);

    std::size_t size() const { return features_.size(); }
    bool empty() const { return features_.empty(); }
    const Feature& at(std::size_t i) const { return features_.at(i); }
    const std::vector<Feature>& features() const { return features_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }

    /// Counts indexed by FeatureCategory value: {attribute, action_event, permission}.
    std::array<std::size_t, 3> category_counts() const;

    bool operator==(const FeatureCatalog& other) const { return names_equal(other); }
    bool names_equal(const FeatureCatalog& other) const;

private:
    std::vector<Feature> features_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Tokens seen for one app: catalog hits in `tokens`, everything else in
/// `unknown` (token -> occurrence count).
struct ObservationSet {
    std::set<std::string> tokens;
    std::map<std::string, std::size_t> unknown;
};

struct Sample {
    std::string app_id;
    Label label = Label::Benign;
    std::vector<std::uint8_t> bits;
};

struct Dataset {
    FeatureCatalog catalog;
    std::vector<Sample> samples;

    /// Throws WidthMismatch if the sample width differs from the catalog.
    void add(Sample s);

    std::size_t width() const { return catalog.size(); }
    std::size_t count(Label l) const;
};

} // namespace dldroid
