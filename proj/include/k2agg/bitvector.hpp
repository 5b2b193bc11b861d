#pragma once

#include <cstdint>
#include <vector>

namespace k2agg {

/*
 * Append-only bit writer. Bit i lives at word i/64, position i%64, LSB first;
 * this layout is the one the index file format serializes verbatim.
 */
class BitBuffer {
public:
    void push_back(bool bit) {
        if (size_ % 64 == 0) words_.push_back(0);
        if (bit) words_.back() |= uint64_t(1) << (size_ % 64);
        ++size_;
    }

    // Appends the low `width` bits of value, LSB first. width <= 64.
    void append_bits(uint64_t value, unsigned width);
    void append(const BitBuffer& other);

    uint64_t size() const { return size_; }
    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>&& take_words() && { return std::move(words_); }

private:
    std::vector<uint64_t> words_;
    uint64_t size_ = 0;
};

/*
 * Immutable bit sequence with rank/select support.
 *
 * The rank directory has two levels: a 64-bit absolute popcount every 65536
 * bits and a 16-bit popcount relative to the superblock every 512 bits, for
 * about 3.2% overhead on top of the raw bits. rank1 is answered with two
 * lookups and at most eight word popcounts; select1 binary-searches the
 * directory and finishes with an in-word scan (no dedicated select directory).
 *
 * rank1(i) counts ones in positions 0..i inclusive. select1(j) takes a
 * 1-based ordinal. Both throw std::out_of_range outside their domain.
 */
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(BitBuffer&& buffer);
    explicit BitVector(const std::vector<bool>& bits);
    BitVector(std::vector<uint64_t> words, uint64_t num_bits);  // deserialization

    uint64_t size() const { return size_; }
    uint64_t ones() const { return ones_; }
    bool empty() const { return size_ == 0; }

    bool operator[](uint64_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    bool bit(uint64_t i) const;  // bounds-checked access

    uint64_t rank1(uint64_t i) const;  // ones in [0, i]
    uint64_t rank0(uint64_t i) const;
    // Ones in [0, i); i may equal size(). The workhorse behind rank1.
    uint64_t prefix_rank(uint64_t i) const;
    uint64_t select1(uint64_t j) const;  // position of the j-th one, j in [1, ones()]

    const std::vector<uint64_t>& words() const { return words_; }
    uint64_t directory_bits() const;
    uint64_t size_in_bits() const { return size_ + directory_bits(); }

private:
    static constexpr uint64_t kBlockBits = 512;
    static constexpr uint64_t kSuperBits = 65536;
    static constexpr uint64_t kWordsPerBlock = kBlockBits / 64;

    void finish();  // trims trailing garbage bits, builds the directory

    std::vector<uint64_t> words_;
    uint64_t size_ = 0;
    uint64_t ones_ = 0;
    std::vector<uint64_t> super_;   // absolute popcount before each superblock
    std::vector<uint16_t> block_;   // popcount from superblock start to block start
};

/*
 * Fixed-width packed integer array; used for the per-level local coordinate
 * arrays and for DAC chunk storage.
 */
class PackedIntArray {
public:
    PackedIntArray() = default;
    explicit PackedIntArray(unsigned width);
    PackedIntArray(std::vector<uint64_t> words, unsigned width, uint64_t count);

    void append(uint64_t value);
    uint64_t get(uint64_t i) const;

    uint64_t size() const { return count_; }
    unsigned width() const { return width_; }
    uint64_t size_in_bits() const { return count_ * width_; }
    const std::vector<uint64_t>& words() const { return words_; }

private:
    std::vector<uint64_t> words_;
    unsigned width_ = 0;
    uint64_t count_ = 0;
};

}  // namespace k2agg
