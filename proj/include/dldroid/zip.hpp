#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace dldroid::zip {

/// Locates `entry_name` through the central directory and returns its
/// decompressed bytes. Supports methods 0 (stored) and 8 (DEFLATE); the
/// inflated data is CRC-32 checked against the central directory record.
std::vector<std::uint8_t> extract_entry(std::span<const std::uint8_t> archive,
                                        std::string_view entry_name);

} // namespace dldroid::zip
