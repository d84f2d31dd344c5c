#ifndef BRANCHPCR_RNG_HPP
#define BRANCHPCR_RNG_HPP

#include <cstdint>
#include <random>

namespace branchpcr {

using Engine = std::mt19937_64;

/// Independent stream for one replicate, a pure function of
/// (master seed, replicate index); identical regardless of which worker
/// thread runs the replicate.
inline Engine replicate_engine(std::uint64_t master_seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32), 0x9e3779b9u};
  return Engine(seq);
}

}  // namespace branchpcr

#endif  // BRANCHPCR_RNG_HPP
