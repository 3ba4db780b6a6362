#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "credsec/digest.hpp"

namespace credsec::lds {

/// Mutable envelope store: one file per (roll, course) at
/// <root>/<roll>/<course>.cred. Writes go through temp-file + rename, so a
/// crashed write leaves either the old or the new value. The store keeps no
/// integrity metadata of its own.
class LocalStore {
public:
    explicit LocalStore(std::filesystem::path root);

    /// Throws Error{invalid_key} or Error{persistence_failure}.
    void put(const std::string& roll, const std::string& course, std::span<const std::uint8_t> envelope);

    /// Returns stored bytes as-is. Throws Error{not_found}.
    Bytes get(const std::string& roll, const std::string& course) const;

    /// Replaces the stored value without any bookkeeping (adversary / test hook).
    void overwrite_raw(const std::string& roll, const std::string& course, std::span<const std::uint8_t> bytes);

    bool contains(const std::string& roll, const std::string& course) const;

    /// Throws Error{invalid_key} for empty names, path separators, "." or "..".
    std::filesystem::path path_for(const std::string& roll, const std::string& course) const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::mutex& key_mutex(const std::filesystem::path& path);

    std::filesystem::path root_;
    std::mutex table_mutex_;
    std::unordered_map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
};

}  // namespace credsec::lds
