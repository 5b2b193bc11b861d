#pragma once

#include <cstdint>
#include <vector>

#include "k2agg/bitvector.hpp"
#include "k2agg/grid.hpp"

namespace k2agg {

/*
 * Level-order layout of a K^2-tree bitmap. Region r holds the child blocks
 * emitted while subdividing level-r nodes; the block of the o-th non-empty
 * node of level r+1 starts at start[r+1] + o * k(r+1)^2. Positions are
 * unified over the concatenation T:L (for a split tree, L begins exactly at
 * start(num_regions-1) == T.size()). ones_before[r] counts the set bits of T
 * in regions before r, which turns an inclusive rank into a within-region
 * ordinal. All of it is derived from the bitmaps, never serialized.
 */
class RegionIndex {
public:
    RegionIndex() = default;

    // L may be null when the last region lives in T (the treap layout).
    static RegionIndex derive(const KSchedule& schedule, const BitVector& t, const BitVector* l);

    unsigned num_regions() const { return static_cast<unsigned>(ones_before_.size()); }
    uint64_t start(unsigned r) const { return start_[r]; }
    uint64_t end(unsigned r) const { return start_[r + 1]; }
    uint64_t ones_before(unsigned r) const { return ones_before_[r]; }
    uint64_t total_bits() const { return start_.back(); }

private:
    std::vector<uint64_t> start_;        // num_regions + 1 entries
    std::vector<uint64_t> ones_before_;  // ones of T strictly before each region
};

}  // namespace k2agg
