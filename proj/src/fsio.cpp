#include "credsec/fsio.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>

#include "credsec/error.hpp"

namespace credsec::fsio {
namespace {

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& path) {
    throw Error(Errc::persistence_failure, what + " " + path.string() + ": " + std::strerror(errno));
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }
    int get() const { return fd_; }

private:
    int fd_;
};

void write_all(int fd, std::span<const std::uint8_t> data, const std::filesystem::path& path) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("write", path);
        }
        done += static_cast<std::size_t>(n);
    }
}

void sync_dir(const std::filesystem::path& dir) {
    Fd fd(::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY));
    if (fd.get() >= 0) {
        ::fsync(fd.get());
    }
}

std::atomic<unsigned> g_tmp_counter{0};

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) {
            throw Error(Errc::not_found, "no such file " + path.string());
        }
        fail("open", path);
    }
    Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        fail("read", path);
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const auto tmp = path.parent_path() /
                     ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                      std::to_string(g_tmp_counter.fetch_add(1)));
    {
        Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
        if (fd.get() < 0) {
            fail("create", tmp);
        }
        write_all(fd.get(), data, tmp);
        if (::fsync(fd.get()) != 0) {
            fail("fsync", tmp);
        }
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        fail("rename", path);
    }
    sync_dir(path.parent_path());
}

void atomic_write(const std::filesystem::path& path, std::string_view text) {
    atomic_write(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t append_durable(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    Fd fd(::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
    if (fd.get() < 0) {
        fail("open", path);
    }
    const off_t offset = ::lseek(fd.get(), 0, SEEK_END);
    if (offset < 0) {
        fail("seek", path);
    }
    write_all(fd.get(), data, path);
    if (::fsync(fd.get()) != 0) {
        fail("fsync", path);
    }
    return static_cast<std::uint64_t>(offset);
}

}  // namespace credsec::fsio
