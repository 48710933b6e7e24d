#include "canontrace/cache.hpp"

#include <cstdio>
#include <stdexcept>

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

namespace canontrace {

namespace {

constexpr std::uint32_t kMagic = 0x43544543;  // "CTEC"
constexpr std::uint32_t kVersion = 1;

struct Header {
    std::uint32_t magic;
    std::uint32_t version;
    std::uint64_t key;
    std::uint64_t n_values;
    std::uint64_t n_vector_entries;  // 0 when no eigenvectors stored
    double order;
};

// RAII advisory lock on an open descriptor.
struct FileLock {
    int fd;
    FileLock(int fd_, int op) : fd(fd_) {
        if (fd >= 0) ::flock(fd, op);
    }
    ~FileLock() {
        if (fd >= 0) ::flock(fd, LOCK_UN);
    }
};

}  // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

EigenCache::EigenCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) ::mkdir(dir_.c_str(), 0755);  // best effort; errors surface on use
}

std::string EigenCache::path_for(std::uint64_t key) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(key));
    return dir_ + "/" + buf + ".eig";
}

bool EigenCache::load(std::uint64_t key, std::vector<double>& values,
                      std::vector<double>* vectors, double* order) const {
    if (!enabled()) return false;
    const std::string path = path_for(key);
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) {
        ++misses_;
        return false;
    }
    FileLock lock(fd, LOCK_SH);
    Header h{};
    bool ok = ::read(fd, &h, sizeof(h)) == static_cast<ssize_t>(sizeof(h)) && h.magic == kMagic &&
              h.version == kVersion && h.key == key;
    if (ok) {
        values.resize(h.n_values);
        const ssize_t want = static_cast<ssize_t>(h.n_values * sizeof(double));
        ok = ::read(fd, values.data(), want) == want;
        if (ok && vectors != nullptr) {
            if (h.n_vector_entries == 0) {
                ok = false;  // caller needs vectors but the entry has none
            } else {
                vectors->resize(h.n_vector_entries);
                const ssize_t vwant = static_cast<ssize_t>(h.n_vector_entries * sizeof(double));
                ok = ::read(fd, vectors->data(), vwant) == vwant;
            }
        }
        if (ok && order != nullptr) *order = h.order;
    }
    ::close(fd);
    if (ok)
        ++hits_;
    else
        ++misses_;
    return ok;
}

void EigenCache::store(std::uint64_t key, const std::vector<double>& values,
                       const std::vector<double>* vectors, double order) const {
    if (!enabled()) return;
    const std::string path = path_for(key);
    const std::string tmp = path + ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw std::runtime_error("EigenCache: cannot write " + tmp);
    {
        FileLock lock(fd, LOCK_EX);
        Header h{kMagic, kVersion, key, values.size(),
                 vectors != nullptr ? vectors->size() : 0, order};
        bool ok = ::write(fd, &h, sizeof(h)) == static_cast<ssize_t>(sizeof(h));
        if (ok) {
            const ssize_t want = static_cast<ssize_t>(values.size() * sizeof(double));
            ok = ::write(fd, values.data(), want) == want;
        }
        if (ok && vectors != nullptr && !vectors->empty()) {
            const ssize_t vwant = static_cast<ssize_t>(vectors->size() * sizeof(double));
            ok = ::write(fd, vectors->data(), vwant) == vwant;
        }
        ::close(fd);
        if (!ok) {
            ::unlink(tmp.c_str());
            throw std::runtime_error("EigenCache: short write to " + tmp);
        }
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        throw std::runtime_error("EigenCache: cannot publish " + path);
    }
}

}  // namespace canontrace
