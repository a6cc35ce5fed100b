#include "dldroid/axml.hpp"

#include "dldroid/zip.hpp"

#include <string_view>

namespace dldroid::axml {

namespace {

// Chunk types per the AOSP resource format.
constexpr std::uint16_t kResStringPool = 0x0001;
constexpr std::uint16_t kResXmlTree = 0x0003;
constexpr std::uint16_t kResXmlStartNamespace = 0x0100;
constexpr std::uint16_t kResXmlEndNamespace = 0x0101;
constexpr std::uint16_t kResXmlStartElement = 0x0102;
constexpr std::uint16_t kResXmlEndElement = 0x0103;
constexpr std::uint16_t kResXmlResourceMap = 0x0180;

constexpr std::uint8_t kTypeString = 0x03;

// android:name attribute resource ids accepted for permission extraction.
constexpr std::uint32_t kNameAttrResIds[] = {0x0101003e, 0x01010003};

struct Cursor {
    std::span<const std::uint8_t> data;

    void need(std::size_t off, std::size_t len) const {
        if (off + len > data.size())
            throw Error(ErrorCode::TruncatedChunk,
                        "chunk truncated at offset " + std::to_string(off));
    }
    std::uint16_t u16(std::size_t off) const {
        need(off, 2);
        return static_cast<std::uint16_t>(data[off] | (data[off + 1] << 8));
    }
    std::uint32_t u32(std::size_t off) const {
        need(off, 4);
        return static_cast<std::uint32_t>(data[off]) | (static_cast<std::uint32_t>(data[off + 1]) << 8) |
               (static_cast<std::uint32_t>(data[off + 2]) << 16) |
               (static_cast<std::uint32_t>(data[off + 3]) << 24);
    }
    std::int32_t index(std::size_t off) const { return static_cast<std::int32_t>(u32(off)); }
};

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_utf16le(const Cursor& c, std::size_t off, std::size_t units) {
    std::string out;
    out.reserve(units);
    for (std::size_t i = 0; i < units; ++i) {
        std::uint32_t unit = c.u16(off + 2 * i);
        if (unit >= 0xD800 && unit <= 0xDBFF && i + 1 < units) {
            std::uint32_t low = c.u16(off + 2 * (i + 1));
            if (low >= 0xDC00 && low <= 0xDFFF) {
                append_utf8(out, 0x10000 + ((unit - 0xD800) << 10) + (low - 0xDC00));
                ++i;
                continue;
            }
        }
        append_utf8(out, unit);
    }
    return out;
}

std::vector<std::string> parse_string_pool(const Cursor& c, std::size_t pos, std::size_t chunk_size) {
    const std::uint16_t header_size = c.u16(pos + 2);
    const std::uint32_t string_count = c.u32(pos + 8);
    const std::uint32_t flags = c.u32(pos + 16);
    const std::uint32_t strings_start = c.u32(pos + 20);
    const bool utf8 = (flags & (1u << 8)) != 0;

    std::vector<std::string> pool;
    pool.reserve(string_count);
    for (std::uint32_t i = 0; i < string_count; ++i) {
        const std::uint32_t rel = c.u32(pos + header_size + 4u * i);
        std::size_t off = pos + strings_start + rel;
        if (off >= pos + chunk_size)
            throw Error(ErrorCode::TruncatedChunk, "string data outside pool chunk");
        if (utf8) {
            // Two length prefixes: UTF-16 length then byte length.
            c.need(off, 1);
            if (c.data[off] & 0x80) {
                c.need(off, 2);
                off += 2;
            } else {
                off += 1;
            }
            c.need(off, 1);
            std::uint32_t bytelen = c.data[off] & 0xFF;
            if (bytelen & 0x80) {
                c.need(off, 2);
                bytelen = ((bytelen & 0x7F) << 8) | c.data[off + 1];
                off += 2;
            } else {
                off += 1;
            }
            c.need(off, bytelen);
            pool.emplace_back(reinterpret_cast<const char*>(c.data.data() + off), bytelen);
        } else {
            std::uint32_t units = c.u16(off);
            off += 2;
            if (units & 0x8000) {
                units = ((units & 0x7FFF) << 16) | c.u16(off);
                off += 2;
            }
            c.need(off, 2 * units);
            pool.push_back(decode_utf16le(c, off, units));
        }
    }
    return pool;
}

} // namespace

const std::string& AxmlDocument::string_at(std::int32_t idx) const {
    if (idx < 0 || static_cast<std::size_t>(idx) >= string_pool.size())
        throw Error(ErrorCode::BadStringIndex, "string pool index " + std::to_string(idx) +
                                                   " out of range (pool size " +
                                                   std::to_string(string_pool.size()) + ")");
    return string_pool[static_cast<std::size_t>(idx)];
}

std::vector<std::uint8_t> open_apk(std::span<const std::uint8_t> apk_bytes) {
    return zip::extract_entry(apk_bytes, "AndroidManifest.xml");
}

AxmlDocument parse_axml(std::span<const std::uint8_t> bytes) {
    Cursor c{bytes};
    if (bytes.size() < 8 || c.u16(0) != kResXmlTree)
        throw Error(ErrorCode::BadMagic, "not a binary XML document");
    const std::uint32_t file_size = c.u32(4);
    if (file_size > bytes.size())
        throw Error(ErrorCode::TruncatedChunk, "declared size exceeds input");

    AxmlDocument doc;
    std::size_t pos = c.u16(2); // file header size, normally 8
    while (pos + 8 <= file_size) {
        const std::uint16_t type = c.u16(pos);
        const std::uint16_t header_size = c.u16(pos + 2);
        const std::uint32_t size = c.u32(pos + 4);
        if (size < 8 || pos + size > file_size)
            throw Error(ErrorCode::TruncatedChunk, "chunk at offset " + std::to_string(pos) +
                                                       " extends past end of document");

        switch (type) {
        case kResStringPool:
            doc.string_pool = parse_string_pool(c, pos, size);
            break;
        case kResXmlResourceMap: {
            const std::size_t count = (size - header_size) / 4;
            doc.resource_map.reserve(count);
            for (std::size_t i = 0; i < count; ++i)
                doc.resource_map.push_back(c.u32(pos + header_size + 4 * i));
            break;
        }
        case kResXmlStartElement: {
            Element el;
            el.kind = Element::Kind::Start;
            const std::size_t body = pos + header_size;
            el.ns = c.index(body);
            el.name = c.index(body + 4);
            const std::uint16_t attr_start = c.u16(body + 8);
            const std::uint16_t attr_size = c.u16(body + 10);
            const std::uint16_t attr_count = c.u16(body + 12);
            for (std::uint16_t a = 0; a < attr_count; ++a) {
                const std::size_t ap = body + attr_start + static_cast<std::size_t>(a) * attr_size;
                Attribute attr;
                attr.ns = c.index(ap);
                attr.name = c.index(ap + 4);
                attr.raw_value = c.index(ap + 8);
                attr.value.data_type = static_cast<std::uint8_t>(c.u16(ap + 14) >> 8);
                attr.value.data = c.u32(ap + 16);
                el.attributes.push_back(attr);
            }
            doc.elements.push_back(std::move(el));
            break;
        }
        case kResXmlEndElement: {
            Element el;
            el.kind = Element::Kind::End;
            el.ns = c.index(pos + header_size);
            el.name = c.index(pos + header_size + 4);
            doc.elements.push_back(std::move(el));
            break;
        }
        case kResXmlStartNamespace:
        case kResXmlEndNamespace:
        default:
            break; // skipped by chunk size
        }
        pos += size;
    }
    return doc;
}

namespace {

bool is_name_attribute(const AxmlDocument& doc, const Attribute& attr) {
    if (attr.name >= 0 && static_cast<std::size_t>(attr.name) < doc.string_pool.size() &&
        doc.string_pool[static_cast<std::size_t>(attr.name)] == "name")
        return true;
    if (attr.name >= 0 && static_cast<std::size_t>(attr.name) < doc.resource_map.size()) {
        const std::uint32_t res_id = doc.resource_map[static_cast<std::size_t>(attr.name)];
        for (auto id : kNameAttrResIds)
            if (res_id == id) return true;
    }
    return false;
}

// A string attribute value is preferred from rawValue; a string-typed value
// falls back to the typed data. Anything else has no string form.
const std::string* attribute_string(const AxmlDocument& doc, const Attribute& attr) {
    if (attr.raw_value >= 0) return &doc.string_at(attr.raw_value);
    if (attr.value.data_type == kTypeString)
        return &doc.string_at(static_cast<std::int32_t>(attr.value.data));
    return nullptr;
}

} // namespace

ManifestInfo extract_permissions(const AxmlDocument& doc) {
    ManifestInfo info;
    std::set<std::string> seen;
    for (const auto& el : doc.elements) {
        if (el.kind != Element::Kind::Start || el.name < 0) continue;
        const std::string& local = doc.string_at(el.name);
        if (local == "manifest") {
            for (const auto& attr : el.attributes) {
                if (attr.name >= 0 && doc.string_at(attr.name) == "package") {
                    if (const std::string* v = attribute_string(doc, attr)) info.package = *v;
                }
            }
            continue;
        }
        if (local != "uses-permission" && local != "uses-permission-sdk-23") continue;

        const Attribute* name_attr = nullptr;
        for (const auto& attr : el.attributes) {
            if (is_name_attribute(doc, attr)) {
                name_attr = &attr;
                break;
            }
        }
        if (!name_attr) {
            info.warnings.push_back("<" + local + "> element without a name attribute, skipped");
            continue;
        }
        const std::string* value = attribute_string(doc, *name_attr);
        if (!value) {
            info.warnings.push_back("<" + local + "> name attribute is not a string, skipped");
            continue;
        }
        if (seen.insert(*value).second) info.permissions.push_back(*value);
    }
    return info;
}

std::string permission_token(std::string_view declared) {
    // android.permission.X and vendor-prefixed *.permission.X both map to
    // permission.X; names without a `permission` segment keep their final
    // segment.
    constexpr std::string_view marker = "permission.";
    auto pos = declared.rfind(marker);
    if (pos != std::string_view::npos && (pos == 0 || declared[pos - 1] == '.'))
        return "permission." + std::string(declared.substr(pos + marker.size()));
    auto dot = declared.rfind('.');
    auto tail = dot == std::string_view::npos ? declared : declared.substr(dot + 1);
    return "permission." + std::string(tail);
}

std::set<std::string> permissions_to_tokens(const ManifestInfo& info) {
    std::set<std::string> tokens;
    for (const auto& p : info.permissions) tokens.insert(permission_token(p));
    return tokens;
}

} // namespace dldroid::axml
