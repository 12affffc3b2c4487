#pragma once

#include <cstdint>
#include <string>

namespace rdlab {

// Shortest round-trip decimal for doubles, fixed at 17 significant digits so
// artifacts are byte-stable across runs.
std::string fmt_g17(double v);

// FNV-1a hash of a byte string (config fingerprints in manifests).
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace rdlab
