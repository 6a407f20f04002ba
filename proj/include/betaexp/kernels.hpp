#pragma once

// Orbit-tree kernels. The parallel versions back the public prefix-engine operations; the
// serial reference versions are kept for cross-checking and benchmarking.

#include "betaexp/prefix_engine.hpp"

#include <cstdint>
#include <vector>

namespace betaexp::kernels {

/// Orbit values are recomputed from the closed form at every multiple of this depth.
inline constexpr std::size_t kRecomputeInterval = 16;

/// Subtrees are split off once the frontier reaches this many nodes.
inline constexpr std::size_t kSeedTarget = 256;

PrefixSet enumerate_parallel(const BetaContext& ctx, const Real& x, std::size_t k,
                             std::size_t survivor_cap);

/// Counts per depth 0..k_max. Nodes are classified in double precision with a running
/// error bound; only nodes whose bound straddles a threshold are reclassified in Real.
std::vector<std::uint64_t> count_parallel(const BetaContext& ctx, const Real& x,
                                          std::size_t k_max);

namespace reference {

/// Breadth-first, one level at a time, all in Real.
PrefixSet enumerate_serial(const BetaContext& ctx, const Real& x, std::size_t k,
                           std::size_t survivor_cap);

/// Depth-first count in Real, single thread.
std::vector<std::uint64_t> count_serial(const BetaContext& ctx, const Real& x, std::size_t k_max);

}  // namespace reference

}  // namespace betaexp::kernels
