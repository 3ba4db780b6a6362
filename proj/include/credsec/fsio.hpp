#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "credsec/digest.hpp"

namespace credsec::fsio {

/// Whole-file read. Throws Error{not_found} when the file does not exist and
/// Error{persistence_failure} on other I/O errors.
Bytes read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling, fsyncs, then renames over `path`.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void atomic_write(const std::filesystem::path& path, std::string_view text);

/// Appends and fsyncs; returns the offset the data was written at.
std::uint64_t append_durable(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace credsec::fsio
