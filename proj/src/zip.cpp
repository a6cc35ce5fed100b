#include "dldroid/zip.hpp"

#include "dldroid/types.hpp"

#include <zlib.h>

#include <cstring>
#include <string>

namespace dldroid::zip {

namespace {

constexpr std::uint32_t kEocdSignature = 0x06054b50;    // PK\x05\x06
constexpr std::uint32_t kCentralSignature = 0x02014b50; // PK\x01\x02
constexpr std::uint32_t kLocalSignature = 0x04034b50;   // PK\x03\x04
constexpr std::size_t kEocdMinSize = 22;
constexpr std::size_t kMaxCommentLength = 0xFFFF;

std::uint16_t read_u16(std::span<const std::uint8_t> data, std::size_t off) {
    return static_cast<std::uint16_t>(data[off] | (data[off + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> data, std::size_t off) {
    return static_cast<std::uint32_t>(data[off]) | (static_cast<std::uint32_t>(data[off + 1]) << 8) |
           (static_cast<std::uint32_t>(data[off + 2]) << 16) |
           (static_cast<std::uint32_t>(data[off + 3]) << 24);
}

std::size_t find_eocd(std::span<const std::uint8_t> archive) {
    if (archive.size() < kEocdMinSize)
        throw Error(ErrorCode::NotAZip, "input too small for a ZIP archive");
    const std::size_t lowest =
        archive.size() > kEocdMinSize + kMaxCommentLength ? archive.size() - kEocdMinSize - kMaxCommentLength
                                                          : 0;
    for (std::size_t pos = archive.size() - kEocdMinSize;; --pos) {
        if (read_u32(archive, pos) == kEocdSignature) {
            std::size_t comment_len = read_u16(archive, pos + 20);
            if (pos + kEocdMinSize + comment_len <= archive.size()) return pos;
        }
        if (pos == lowest) break;
    }
    throw Error(ErrorCode::NotAZip, "ZIP end-of-central-directory record not found");
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> compressed,
                                      std::size_t expected_size) {
    std::vector<std::uint8_t> out(expected_size);
    z_stream strm{};
    if (inflateInit2(&strm, -MAX_WBITS) != Z_OK)
        throw Error(ErrorCode::CorruptEntry, "inflate initialization failed");
    strm.next_in = const_cast<Bytef*>(compressed.data());
    strm.avail_in = static_cast<uInt>(compressed.size());
    strm.next_out = out.data();
    strm.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&strm, Z_FINISH);
    bool complete = rc == Z_STREAM_END && strm.total_out == expected_size;
    inflateEnd(&strm);
    if (!complete)
        throw Error(ErrorCode::CorruptEntry, "DEFLATE stream is corrupt or truncated");
    return out;
}

} // namespace

std::vector<std::uint8_t> extract_entry(std::span<const std::uint8_t> archive,
                                        std::string_view entry_name) {
    const std::size_t eocd = find_eocd(archive);
    const std::uint16_t total_entries = read_u16(archive, eocd + 10);
    const std::uint32_t cd_offset = read_u32(archive, eocd + 16);

    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < total_entries; ++i) {
        if (pos + 46 > archive.size() || read_u32(archive, pos) != kCentralSignature)
            throw Error(ErrorCode::NotAZip, "corrupt central directory");
        const std::uint16_t method = read_u16(archive, pos + 10);
        const std::uint32_t crc = read_u32(archive, pos + 16);
        const std::uint32_t comp_size = read_u32(archive, pos + 20);
        const std::uint32_t uncomp_size = read_u32(archive, pos + 24);
        const std::uint16_t name_len = read_u16(archive, pos + 28);
        const std::uint16_t extra_len = read_u16(archive, pos + 30);
        const std::uint16_t comment_len = read_u16(archive, pos + 32);
        const std::uint32_t local_offset = read_u32(archive, pos + 42);
        if (pos + 46 + name_len > archive.size())
            throw Error(ErrorCode::NotAZip, "corrupt central directory entry name");
        std::string_view name(reinterpret_cast<const char*>(archive.data() + pos + 46), name_len);

        if (name == entry_name) {
            if (method != 0 && method != 8)
                throw Error(ErrorCode::UnsupportedCompression,
                            "unsupported compression method " + std::to_string(method) + " for '" +
                                std::string(entry_name) + "'");
            if (local_offset + 30 > archive.size() || read_u32(archive, local_offset) != kLocalSignature)
                throw Error(ErrorCode::CorruptEntry, "bad local file header");
            // Name/extra lengths in the local header may differ from the
            // central directory's; the data offset must use the local ones.
            const std::uint16_t local_name_len = read_u16(archive, local_offset + 26);
            const std::uint16_t local_extra_len = read_u16(archive, local_offset + 28);
            const std::size_t data_offset =
                static_cast<std::size_t>(local_offset) + 30 + local_name_len + local_extra_len;
            if (data_offset + comp_size > archive.size())
                throw Error(ErrorCode::CorruptEntry, "entry data extends past end of archive");

            std::span<const std::uint8_t> data = archive.subspan(data_offset, comp_size);
            std::vector<std::uint8_t> content;
            if (method == 0) {
                if (comp_size != uncomp_size)
                    throw Error(ErrorCode::CorruptEntry, "stored entry size mismatch");
                content.assign(data.begin(), data.end());
            } else {
                content = inflate_raw(data, uncomp_size);
            }

            std::uint32_t actual =
                static_cast<std::uint32_t>(crc32(0L, content.data(), static_cast<uInt>(content.size())));
            if (actual != crc)
                throw Error(ErrorCode::CorruptEntry, "CRC-32 mismatch for '" + std::string(entry_name) +
                                                         "'");
            return content;
        }
        pos += 46u + name_len + extra_len + comment_len;
    }
    throw Error(ErrorCode::EntryMissing, "archive has no entry named '" + std::string(entry_name) + "'");
}

} // namespace dldroid::zip
