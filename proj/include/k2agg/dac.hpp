#pragma once

#include <cstdint>
#include <vector>

#include "k2agg/bitvector.hpp"

namespace k2agg {

/*
 * Direct Access Codes: a sequence of non-negative integers stored in b-bit
 * chunks spread over levels. Level l holds the l-th chunk of every value that
 * needs more than l chunks, plus a continuation bit telling whether the value
 * goes on; rank on the continuation bitmap locates a value's chunk at the
 * next level. Small values therefore cost few bits while access stays
 * O(levels). Every stored value occupies at least b+1 bits (one chunk and its
 * continuation bit).
 */
class DacSequence {
public:
    static constexpr unsigned kDefaultWidth = 4;

    struct Level {
        PackedIntArray chunks;
        BitVector continuation;
    };

    DacSequence() = default;

    static DacSequence encode(const std::vector<uint64_t>& values,
                              unsigned chunk_width = kDefaultWidth);
    static DacSequence from_parts(std::vector<Level> levels, unsigned chunk_width,
                                  uint64_t length);

    uint64_t access(uint64_t i) const;
    uint64_t size() const { return length_; }
    unsigned chunk_width() const { return width_; }
    unsigned num_levels() const { return static_cast<unsigned>(levels_.size()); }
    uint64_t level_size(unsigned l) const { return levels_[l].chunks.size(); }
    const std::vector<Level>& levels() const { return levels_; }

    uint64_t size_in_bits() const;
    std::vector<uint64_t> decode_all() const;

private:
    std::vector<Level> levels_;
    unsigned width_ = kDefaultWidth;
    uint64_t length_ = 0;
};

}  // namespace k2agg
