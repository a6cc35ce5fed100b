#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "dldroid/types.hpp"

namespace dldroid::ingest {

/// Reads a catalog file: one `name,category` per line, `#` comments,
/// categories in {attribute, action_event, permission}.
FeatureCatalog load_catalog(const std::filesystem::path& path);

void save_catalog(const FeatureCatalog& catalog, const std::filesystem::path& path);

/// One token per non-comment line, trimmed; repeats collapse into the set.
/// Tokens not in the catalog are counted in `unknown` and never abort parsing.
ObservationSet parse_dynamic_log(std::string_view text, const FeatureCatalog& catalog);

/// bits[i] = 1 iff catalog.at(i).name is in obs.tokens.
Sample vectorize(const ObservationSet& obs, Label label, const FeatureCatalog& catalog,
                 std::string app_id = {});

/// CSV layout: header `name1,...,nameK,class`, 0/1 cells, class 1 = malware,
/// LF line endings. read_csv skips leading `#` comment lines and infers
/// categories from the token spelling (`permission.` / `action.` prefixes).
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

/// Round-trip equality: feature names, bits, labels, and order. Categories
/// and app ids are excluded (the CSV does not carry them).
bool data_equal(const Dataset& a, const Dataset& b);

FeatureCategory infer_category(std::string_view token);

} // namespace dldroid::ingest
