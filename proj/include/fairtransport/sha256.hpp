#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fairtransport {

/// SHA-256 (FIPS 180-4) of a byte string, as 64 lowercase hex characters.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's raw bytes. Throws IoError if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

/// Reads a whole file as bytes. Throws IoError if unreadable.
std::string read_file_bytes(const std::filesystem::path& path);

/// Writes bytes to a file, replacing it. Throws IoError on failure.
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace fairtransport
