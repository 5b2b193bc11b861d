#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "k2agg/counting_k2tree.hpp"
#include "k2agg/grid.hpp"
#include "k2agg/k2tree.hpp"
#include "k2agg/k2treap.hpp"

namespace k2agg {

/*
 * Index file format (all integers little-endian):
 *
 *   magic "K2AG" | version u8 | tag u8 | rows u64 | cols u64 | side u64 |
 *   t u64 | d u64 | schedule (u8 entry count, then k u32 + levels u32 each) |
 *   aug_levels u32 | dac width u8 | payload | crc32 u32
 *
 * Bit vectors are written as bit length (u64) followed by ceil(len/64)
 * 64-bit little-endian words, LSB-first bit order. The CRC covers every
 * byte before it. Builds are deterministic, so re-serializing a loaded
 * index reproduces the file byte for byte.
 */

enum class StructureType : uint8_t {
    K2TreeIndex = 1,
    K2TreapIndex = 2,
    CountingIndex = 3,
    SumIndex = 4,
};

class IoError : public std::runtime_error {
public:
    enum class Kind { BadMagic, BadVersion, BadTag, Truncated, ChecksumMismatch, Malformed };

    IoError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(uint64_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    uint64_t line() const { return line_; }

private:
    uint64_t line_;
};

// A ranked index: the max-ordered treap plus an optional shadow treap built
// on flipped weights, which answers MIN queries.
struct TreapIndex {
    K2Treap max_treap;
    std::optional<K2Treap> min_treap;
};

using IndexVariant = std::variant<K2Tree, TreapIndex, CountingK2Tree>;

StructureType structure_type(const IndexVariant& index);
std::string structure_name(StructureType type);

// (component name, bits) pairs plus derived totals for `info` and `bench`.
std::vector<std::pair<std::string, uint64_t>> space_breakdown(const IndexVariant& index);
uint64_t total_size_in_bits(const IndexVariant& index);
uint64_t index_points(const IndexVariant& index);
uint64_t index_rows(const IndexVariant& index);
uint64_t index_cols(const IndexVariant& index);

std::string serialize_index(const IndexVariant& index);
IndexVariant deserialize_index(const std::string& bytes);
void save_index(const std::string& path, const IndexVariant& index);
IndexVariant load_index(const std::string& path);

// Point files: `x<TAB>y[<TAB>w]`, one record per line, `#` comments and blank
// lines skipped; a `#! rows=R cols=C d=D` comment carries grid metadata.
// Coordinates are 0-based; the weight defaults to 1 when omitted.
Dataset parse_points(std::istream& in);
Dataset load_points(const std::string& path);
void write_points(std::ostream& out, const Dataset& data);
void save_points(const std::string& path, const Dataset& data);

uint32_t crc32(const void* data, size_t size);

}  // namespace k2agg
