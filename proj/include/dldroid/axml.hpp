#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dldroid/types.hpp"

namespace dldroid::axml {

/// Decompressed AndroidManifest.xml bytes from an APK.
std::vector<std::uint8_t> open_apk(std::span<const std::uint8_t> apk_bytes);

struct TypedValue {
    std::uint8_t data_type = 0; // Res_value dataType; 0x03 = string
    std::uint32_t data = 0;
};

struct Attribute {
    std::int32_t ns = -1;        // string pool index, -1 = none
    std::int32_t name = -1;      // string pool index
    std::int32_t raw_value = -1; // string pool index, -1 = none
    TypedValue value;
};

struct Element {
    enum class Kind { Start, End };
    Kind kind = Kind::Start;
    std::int32_t ns = -1;
    std::int32_t name = -1;
    std::vector<Attribute> attributes; // start events only
};

struct AxmlDocument {
    std::vector<std::string> string_pool;
    std::vector<std::uint32_t> resource_map; // attribute name index -> resource id
    std::vector<Element> elements;

    /// Throws BadStringIndex when idx is out of pool range or negative.
    const std::string& string_at(std::int32_t idx) const;
};

/// Decodes the chunked binary XML: string pool (UTF-16LE or UTF-8 per the
/// pool flag), resource map, namespace events, and element start/end events.
AxmlDocument parse_axml(std::span<const std::uint8_t> bytes);

struct ManifestInfo {
    std::string package;
    std::vector<std::string> permissions; // document order, first occurrence kept
    std::vector<std::string> warnings;
};

/// android:name of every uses-permission / uses-permission-sdk-23 element.
ManifestInfo extract_permissions(const AxmlDocument& doc);

/// Declared permission name -> catalog token spelling
/// (android.permission.SEND_SMS -> permission.SEND_SMS).
std::string permission_token(std::string_view declared);
std::set<std::string> permissions_to_tokens(const ManifestInfo& info);

} // namespace dldroid::axml
