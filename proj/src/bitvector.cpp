#include "k2agg/bitvector.hpp"

#include <bit>
#include <stdexcept>

namespace k2agg {

void BitBuffer::append_bits(uint64_t value, unsigned width) {
    if (width == 0) return;
    if (width < 64) value &= (uint64_t(1) << width) - 1;
    unsigned used = size_ % 64;
    if (used == 0) {
        words_.push_back(value);
    } else {
        words_.back() |= value << used;
        if (width > 64 - used) words_.push_back(value >> (64 - used));
    }
    size_ += width;
}

void BitBuffer::append(const BitBuffer& other) {
    uint64_t remaining = other.size_;
    for (uint64_t w = 0; remaining > 0; ++w) {
        unsigned take = remaining < 64 ? static_cast<unsigned>(remaining) : 64;
        append_bits(other.words_[w], take);
        remaining -= take;
    }
}

BitVector::BitVector(BitBuffer&& buffer) : size_(buffer.size()) {
    words_ = std::move(buffer).take_words();
    finish();
}

BitVector::BitVector(const std::vector<bool>& bits) {
    BitBuffer buf;
    for (bool b : bits) buf.push_back(b);
    size_ = buf.size();
    words_ = std::move(buf).take_words();
    finish();
}

BitVector::BitVector(std::vector<uint64_t> words, uint64_t num_bits)
    : words_(std::move(words)), size_(num_bits) {
    if (words_.size() != (size_ + 63) / 64) throw std::invalid_argument("BitVector: word count mismatch");
    finish();
}

void BitVector::finish() {
    if (size_ % 64 != 0 && !words_.empty()) {
        words_.back() &= (uint64_t(1) << (size_ % 64)) - 1;
    }
    uint64_t num_blocks = (size_ + kBlockBits - 1) / kBlockBits;
    uint64_t num_supers = (size_ + kSuperBits - 1) / kSuperBits;
    super_.assign(num_supers + 1, 0);
    block_.assign(num_blocks + 1, 0);

    uint64_t total = 0;
    uint64_t within_super = 0;
    for (uint64_t b = 0; b < num_blocks; ++b) {
        uint64_t bit_start = b * kBlockBits;
        if (bit_start % kSuperBits == 0) {
            super_[bit_start / kSuperBits] = total;
            within_super = 0;
        }
        block_[b] = static_cast<uint16_t>(within_super);
        uint64_t word_end = std::min<uint64_t>((bit_start + kBlockBits) / 64, words_.size());
        uint64_t cnt = 0;
        for (uint64_t w = bit_start / 64; w < word_end; ++w) cnt += std::popcount(words_[w]);
        total += cnt;
        within_super += cnt;
    }
    super_[num_supers] = total;
    if (num_blocks > 0 && num_blocks % (kSuperBits / kBlockBits) != 0) {
        block_[num_blocks] = static_cast<uint16_t>(within_super);
    }
    ones_ = total;
}

bool BitVector::bit(uint64_t i) const {
    if (i >= size_) throw std::out_of_range("BitVector::bit: index past end");
    return (*this)[i];
}

uint64_t BitVector::prefix_rank(uint64_t i) const {
    if (i > size_) throw std::out_of_range("BitVector::prefix_rank: index past end");
    if (i == size_) return ones_;
    uint64_t r = super_[i / kSuperBits] + block_[i / kBlockBits];
    uint64_t word = i / 64;
    for (uint64_t w = (i / kBlockBits) * kWordsPerBlock; w < word; ++w) {
        r += std::popcount(words_[w]);
    }
    unsigned off = i % 64;
    if (off != 0) r += std::popcount(words_[word] & ((uint64_t(1) << off) - 1));
    return r;
}

uint64_t BitVector::rank1(uint64_t i) const {
    if (i >= size_) throw std::out_of_range("BitVector::rank1: index past end");
    return prefix_rank(i + 1);
}

uint64_t BitVector::rank0(uint64_t i) const {
    return i + 1 - rank1(i);
}

uint64_t BitVector::select1(uint64_t j) const {
    if (j == 0 || j > ones_) throw std::out_of_range("BitVector::select1: no such occurrence");
    // Largest superblock whose prefix count is < j.
    uint64_t lo = 0, hi = super_.size() - 1;
    while (lo < hi) {
        uint64_t mid = (lo + hi + 1) / 2;
        if (super_[mid] < j) lo = mid;
        else hi = mid - 1;
    }
    uint64_t remaining = j - super_[lo];
    uint64_t num_blocks = (size_ + kBlockBits - 1) / kBlockBits;
    uint64_t blo = lo * (kSuperBits / kBlockBits);
    uint64_t bhi = std::min(num_blocks - 1, blo + kSuperBits / kBlockBits - 1);
    while (blo < bhi) {
        uint64_t mid = (blo + bhi + 1) / 2;
        if (block_[mid] < remaining) blo = mid;
        else bhi = mid - 1;
    }
    remaining -= block_[blo];
    uint64_t word_end = std::min<uint64_t>((blo * kBlockBits + kBlockBits) / 64, words_.size());
    for (uint64_t w = blo * kWordsPerBlock; w < word_end; ++w) {
        uint64_t pc = std::popcount(words_[w]);
        if (remaining <= pc) {
            uint64_t word = words_[w];
            while (true) {
                unsigned bit = std::countr_zero(word);
                if (--remaining == 0) return w * 64 + bit;
                word &= word - 1;
            }
        }
        remaining -= pc;
    }
    throw std::logic_error("BitVector::select1: directory inconsistent");
}

uint64_t BitVector::directory_bits() const {
    return super_.size() * 64 + block_.size() * 16;
}

PackedIntArray::PackedIntArray(unsigned width) : width_(width) {
    if (width == 0 || width > 64) throw std::invalid_argument("PackedIntArray: bad width");
}

PackedIntArray::PackedIntArray(std::vector<uint64_t> words, unsigned width, uint64_t count)
    : words_(std::move(words)), width_(width), count_(count) {
    if (width == 0 || width > 64) throw std::invalid_argument("PackedIntArray: bad width");
    if (words_.size() != (count_ * width_ + 63) / 64) {
        throw std::invalid_argument("PackedIntArray: word count mismatch");
    }
}

void PackedIntArray::append(uint64_t value) {
    uint64_t pos = count_ * width_;
    if (width_ < 64) value &= (uint64_t(1) << width_) - 1;
    unsigned used = pos % 64;
    if (used == 0) {
        words_.push_back(value);
    } else {
        words_.back() |= value << used;
        if (width_ > 64 - used) words_.push_back(value >> (64 - used));
    }
    ++count_;
}

uint64_t PackedIntArray::get(uint64_t i) const {
    if (i >= count_) throw std::out_of_range("PackedIntArray::get: index past end");
    uint64_t pos = i * width_;
    uint64_t word = pos / 64;
    unsigned off = pos % 64;
    uint64_t v = words_[word] >> off;
    if (off + width_ > 64) v |= words_[word + 1] << (64 - off);
    if (width_ < 64) v &= (uint64_t(1) << width_) - 1;
    return v;
}

}  // namespace k2agg
