#pragma once

#include <cstdint>
#include <random>

namespace mupf {

/// Stream identifiers mixed into the per-(seed, t, i) generator seed.
enum class RngStream : std::uint64_t {
  Init = 1,
  Proposal = 2,
  Resample = 3,
  Simulation = 4,
};

/// Independent generator for (seed, step, index, stream). Counter-style
/// seeding makes draws independent of scheduling order.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t step, std::uint64_t index,
                         RngStream stream);

}  // namespace mupf
