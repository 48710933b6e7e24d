#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace canontrace {

// FNV-1a hash of a canonical description string; used as the cache key.
std::uint64_t fnv1a_hash(const std::string& text);

// On-disk eigendecomposition cache.  One binary file per key:
// header (magic, version, key, n, order, flags) followed by little-endian
// doubles (eigenvalues, then the column-major eigenvector matrix when
// present).  Access is serialized with advisory file locks.
class EigenCache {
public:
    explicit EigenCache(std::string dir);

    bool enabled() const { return !dir_.empty(); }

    // Returns true and fills `values` (and `vectors` when want_vectors and
    // the entry stores them) on a hit.  vectors is packed column-major n x n.
    bool load(std::uint64_t key, std::vector<double>& values, std::vector<double>* vectors,
              double* order = nullptr) const;

    void store(std::uint64_t key, const std::vector<double>& values,
               const std::vector<double>* vectors, double order) const;

    int hits() const { return hits_; }
    int misses() const { return misses_; }

private:
    std::string dir_;
    mutable int hits_ = 0;
    mutable int misses_ = 0;

    std::string path_for(std::uint64_t key) const;
};

}  // namespace canontrace
