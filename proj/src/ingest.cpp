#include "dldroid/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dldroid {

std::string_view to_string(FeatureCategory c) {
    switch (c) {
    case FeatureCategory::Attribute: return "attribute";
    case FeatureCategory::ActionEvent: return "action_event";
    case FeatureCategory::Permission: return "permission";
    }
    return "attribute";
}

FeatureCategory category_from_string(std::string_view s) {
    if (s == "attribute") return FeatureCategory::Attribute;
    if (s == "action_event") return FeatureCategory::ActionEvent;
    if (s == "permission") return FeatureCategory::Permission;
    throw Error(ErrorCode::UnknownCategory, "unknown feature category: '" + std::string(s) + "'");
}

FeatureCatalog FeatureCatalog::from_features(std::vector<Feature> features) {
    FeatureCatalog c;
    c.features_ = std::move(features);
    c.index_.reserve(c.features_.size());
    for (std::size_t i = 0; i < c.features_.size(); ++i) {
        auto [it, inserted] = c.index_.emplace(c.features_[i].name, i);
        if (!inserted)
            throw Error(ErrorCode::DuplicateFeature,
                        "duplicate feature name: '" + c.features_[i].name + "'");
    }
    return c;
}

std::optional<std::size_t> FeatureCatalog::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::array<std::size_t, 3> FeatureCatalog::category_counts() const {
    std::array<std::size_t, 3> counts{0, 0, 0};
    for (const auto& f : features_) counts[static_cast<std::size_t>(f.category)]++;
    return counts;
}

bool FeatureCatalog::names_equal(const FeatureCatalog& other) const {
    if (features_.size() != other.features_.size()) return false;
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name != other.features_[i].name) return false;
    return true;
}

void Dataset::add(Sample s) {
    if (s.bits.size() != catalog.size())
        throw Error(ErrorCode::WidthMismatch,
                    "sample width " + std::to_string(s.bits.size()) + " does not match catalog width " +
                        std::to_string(catalog.size()));
    samples.push_back(std::move(s));
}

std::size_t Dataset::count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [l](const Sample& s) { return s.label == l; }));
}

namespace ingest {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace

FeatureCatalog load_catalog(const std::filesystem::path& path) {
    std::string text = read_file_text(path);
    std::vector<Feature> features;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto comma = t.rfind(',');
        if (comma == std::string_view::npos)
            throw Error(ErrorCode::UnknownCategory,
                        path.string() + ":" + std::to_string(line_no) + ": expected `name,category`");
        auto name = trim(t.substr(0, comma));
        auto cat = trim(t.substr(comma + 1));
        if (name.empty())
            throw Error(ErrorCode::UnknownCategory,
                        path.string() + ":" + std::to_string(line_no) + ": empty feature name");
        try {
            features.push_back({std::string(name), category_from_string(cat)});
        } catch (const Error&) {
            throw Error(ErrorCode::UnknownCategory, path.string() + ":" + std::to_string(line_no) +
                                                        ": unknown category '" + std::string(cat) + "'");
        }
    }
    return FeatureCatalog::from_features(std::move(features));
}

void save_catalog(const FeatureCatalog& catalog, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& f : catalog.features()) out << f.name << ',' << to_string(f.category) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

ObservationSet parse_dynamic_log(std::string_view text, const FeatureCatalog& catalog) {
    ObservationSet obs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        auto token = trim(line);
        if (!token.empty() && token.front() != '#') {
            if (catalog.contains(token))
                obs.tokens.emplace(token);
            else
                obs.unknown[std::string(token)]++;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return obs;
}

Sample vectorize(const ObservationSet& obs, Label label, const FeatureCatalog& catalog,
                 std::string app_id) {
    Sample s;
    s.app_id = std::move(app_id);
    s.label = label;
    s.bits.resize(catalog.size(), 0);
    for (const auto& token : obs.tokens) {
        auto idx = catalog.index_of(token);
        if (!idx)
            throw Error(ErrorCode::WidthMismatch, "token not in catalog: '" + token + "'");
        s.bits[*idx] = 1;
    }
    return s;
}

void write_csv(const Dataset& ds, std::ostream& out) {
    if (ds.catalog.empty())
        throw Error(ErrorCode::EmptyCatalog, "cannot write a dataset with an empty catalog");
    for (std::size_t i = 0; i < ds.catalog.size(); ++i) out << ds.catalog.at(i).name << ',';
    out << "class\n";
    for (const auto& s : ds.samples) {
        for (auto b : s.bits) out << (b ? '1' : '0') << ',';
        out << (s.label == Label::Malware ? '1' : '0') << '\n';
    }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_csv(ds, out);
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

FeatureCategory infer_category(std::string_view token) {
    if (token.starts_with("permission.")) return FeatureCategory::Permission;
    if (token.starts_with("action.")) return FeatureCategory::ActionEvent;
    return FeatureCategory::Attribute;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

} // namespace

Dataset read_csv(std::istream& in) {
    std::string line;
    // Leading comment lines carry tool metadata; skip them.
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        have_header = true;
        break;
    }
    if (!have_header) throw Error(ErrorCode::HeaderMismatch, "missing CSV header row");

    auto header = split_commas(line);
    if (header.size() < 2 || trim(header.back()) != "class")
        throw Error(ErrorCode::HeaderMismatch, "CSV header must end with a `class` column");
    std::vector<Feature> features;
    for (std::size_t i = 0; i + 1 < header.size(); ++i) {
        auto name = trim(header[i]);
        if (name.empty()) throw Error(ErrorCode::HeaderMismatch, "empty feature name in CSV header");
        features.push_back({std::string(name), infer_category(name)});
    }

    Dataset ds;
    ds.catalog = FeatureCatalog::from_features(std::move(features));
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        auto cells = split_commas(line);
        if (cells.size() != ds.catalog.size() + 1)
            throw Error(ErrorCode::HeaderMismatch,
                        "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(ds.catalog.size() + 1));
        Sample s;
        s.bits.reserve(ds.catalog.size());
        for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
            auto cell = trim(cells[c]);
            if (cell == "0")
                s.bits.push_back(0);
            else if (cell == "1")
                s.bits.push_back(1);
            else
                throw Error(ErrorCode::NonBinaryCell, "non-binary cell at row " + std::to_string(row) +
                                                          ", col " + std::to_string(c + 1));
        }
        auto cls = trim(cells.back());
        if (cls == "1")
            s.label = Label::Malware;
        else if (cls == "0")
            s.label = Label::Benign;
        else
            throw Error(ErrorCode::UnknownLabel, "unknown class label at row " + std::to_string(row));
        ds.add(std::move(s));
    }
    return ds;
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_csv(in);
}

bool data_equal(const Dataset& a, const Dataset& b) {
    if (!a.catalog.names_equal(b.catalog)) return false;
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& x = a.samples[i];
        const auto& y = b.samples[i];
        if (x.label != y.label || x.bits != y.bits) return false;
    }
    return true;
}

} // namespace ingest
} // namespace dldroid
