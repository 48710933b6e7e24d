#pragma once

#include <cstdint>

#include "canontrace/grid_field.hpp"

namespace canontrace {

// Real band-limited random field: independent Gaussian Fourier modes on
// 0 < |m| <= band (Euclidean mode norm), Hermitian-symmetrized so the field
// is real, then rescaled to the requested sup norm.  Deterministic in seed.
CoefficientField random_band_limited(const GridSpec& spec, int band, double amplitude,
                                     std::uint64_t seed);

}  // namespace canontrace
