#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace varigen {

/// Lowercase hex SHA-256 of a byte range.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(const std::vector<unsigned char>& bytes);

/// SHA-256 of a file's contents (streaming).
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace varigen
