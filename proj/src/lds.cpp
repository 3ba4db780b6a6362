#include "credsec/lds.hpp"

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

namespace credsec::lds {
namespace {

void check_component(const std::string& name, const char* what) {
    if (name.empty() || name == "." || name == ".." || name.find_first_of(std::string("/\\\0", 3)) != std::string::npos) {
        throw Error(Errc::invalid_key, std::string("invalid ") + what + " '" + name + "'");
    }
}

}  // namespace

LocalStore::LocalStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) {
        throw Error(Errc::persistence_failure, "cannot create store directory " + root_.string());
    }
}

std::filesystem::path LocalStore::path_for(const std::string& roll, const std::string& course) const {
    check_component(roll, "roll");
    check_component(course, "course");
    return root_ / roll / (course + ".cred");
}

std::mutex& LocalStore::key_mutex(const std::filesystem::path& path) {
    std::lock_guard lock(table_mutex_);
    auto& slot = key_mutexes_[path.string()];
    if (!slot) {
        slot = std::make_unique<std::mutex>();
    }
    return *slot;
}

void LocalStore::put(const std::string& roll, const std::string& course, std::span<const std::uint8_t> envelope) {
    const auto path = path_for(roll, course);
    std::lock_guard lock(key_mutex(path));
    fsio::atomic_write(path, envelope);
}

Bytes LocalStore::get(const std::string& roll, const std::string& course) const {
    const auto path = path_for(roll, course);
    try {
        return fsio::read_file(path);
    } catch (const Error& e) {
        if (e.code() == Errc::not_found) {
            throw Error(Errc::not_found, "no stored credential for " + roll + "/" + course);
        }
        throw;
    }
}

void LocalStore::overwrite_raw(const std::string& roll, const std::string& course,
                               std::span<const std::uint8_t> bytes) {
    put(roll, course, bytes);
}

bool LocalStore::contains(const std::string& roll, const std::string& course) const {
    return std::filesystem::exists(path_for(roll, course));
}

}  // namespace credsec::lds
