#include "k2agg/dac.hpp"

#include <stdexcept>

#include "k2agg/grid.hpp"

namespace k2agg {

namespace {

unsigned chunks_needed(uint64_t v, unsigned width) {
    return (bit_width_nonzero(v) + width - 1) / width;
}

}  // namespace

DacSequence DacSequence::encode(const std::vector<uint64_t>& values, unsigned chunk_width) {
    if (chunk_width == 0 || chunk_width > 32) {
        throw std::invalid_argument("DacSequence: chunk width must be in [1, 32]");
    }
    DacSequence d;
    d.width_ = chunk_width;
    d.length_ = values.size();

    unsigned num_levels = 0;
    for (uint64_t v : values) num_levels = std::max(num_levels, chunks_needed(v, chunk_width));
    if (num_levels == 0) return d;

    // values carried into level l (those needing more than l chunks)
    std::vector<uint64_t> carried = values;
    for (unsigned l = 0; l < num_levels; ++l) {
        PackedIntArray chunks(chunk_width);
        BitBuffer cont;
        std::vector<uint64_t> next;
        for (uint64_t v : carried) {
            chunks.append((v >> (l * chunk_width)) & ((uint64_t(1) << chunk_width) - 1));
            bool more = chunks_needed(v, chunk_width) > l + 1;
            cont.push_back(more);
            if (more) next.push_back(v);
        }
        d.levels_.push_back(Level{std::move(chunks), BitVector(std::move(cont))});
        carried = std::move(next);
    }
    return d;
}

DacSequence DacSequence::from_parts(std::vector<Level> levels, unsigned chunk_width,
                                    uint64_t length) {
    if (chunk_width == 0 || chunk_width > 32) {
        throw std::invalid_argument("DacSequence: chunk width must be in [1, 32]");
    }
    DacSequence d;
    d.levels_ = std::move(levels);
    d.width_ = chunk_width;
    d.length_ = length;
    uint64_t expected = length;
    for (const Level& lv : d.levels_) {
        if (lv.chunks.size() != expected || lv.continuation.size() != expected) {
            throw std::invalid_argument("DacSequence: inconsistent level sizes");
        }
        expected = lv.continuation.ones();
    }
    if (expected != 0) throw std::invalid_argument("DacSequence: dangling continuation bits");
    if (length > 0 && d.levels_.empty()) {
        throw std::invalid_argument("DacSequence: missing levels");
    }
    return d;
}

uint64_t DacSequence::access(uint64_t i) const {
    if (i >= length_) throw std::out_of_range("DacSequence::access: index past end");
    uint64_t v = 0;
    uint64_t idx = i;
    for (unsigned l = 0; l < levels_.size(); ++l) {
        v |= levels_[l].chunks.get(idx) << (l * width_);
        if (!levels_[l].continuation[idx]) break;
        idx = levels_[l].continuation.rank1(idx) - 1;
    }
    return v;
}

uint64_t DacSequence::size_in_bits() const {
    uint64_t bits = 0;
    for (const Level& lv : levels_) {
        bits += lv.chunks.size_in_bits() + lv.continuation.size_in_bits();
    }
    return bits;
}

std::vector<uint64_t> DacSequence::decode_all() const {
    std::vector<uint64_t> out(length_);
    for (uint64_t i = 0; i < length_; ++i) out[i] = access(i);
    return out;
}

}  // namespace k2agg
