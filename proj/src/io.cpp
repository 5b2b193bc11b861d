#include "k2agg/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace k2agg {

namespace {

constexpr char kMagic[4] = {'K', '2', 'A', 'G'};
constexpr uint8_t kFormatVersion = 1;

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
    }
    void words(const std::vector<uint64_t>& ws) {
        for (uint64_t w : ws) u64(w);
    }
    void bitvector(const BitVector& bv) {
        u64(bv.size());
        words(bv.words());
    }
    void packed(const PackedIntArray& a) {
        u8(static_cast<uint8_t>(a.width()));
        u64(a.size());
        words(a.words());
    }
    void dac(const DacSequence& d) {
        u8(static_cast<uint8_t>(d.chunk_width()));
        u8(static_cast<uint8_t>(d.num_levels()));
        u64(d.size());
        for (const DacSequence::Level& lv : d.levels()) {
            words(lv.chunks.words());
            words(lv.continuation.words());
        }
    }
    std::string take() && { return std::move(buf_); }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(const std::string& bytes, size_t limit) : bytes_(bytes), limit_(limit) {}

    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(bytes_[pos_++]);
    }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
        return v;
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(u8()) << (8 * i);
        return v;
    }
    std::vector<uint64_t> words(uint64_t count) {
        need(count * 8);
        std::vector<uint64_t> ws(count);
        for (uint64_t i = 0; i < count; ++i) ws[i] = u64();
        return ws;
    }
    BitVector bitvector() {
        uint64_t bits = u64();
        return BitVector(words((bits + 63) / 64), bits);
    }
    PackedIntArray packed() {
        unsigned width = u8();
        uint64_t count = u64();
        return PackedIntArray(words((count * width + 63) / 64), width, count);
    }
    DacSequence dac() {
        unsigned width = u8();
        unsigned num_levels = u8();
        uint64_t length = u64();
        std::vector<DacSequence::Level> levels;
        uint64_t count = length;
        for (unsigned l = 0; l < num_levels; ++l) {
            PackedIntArray chunks(words((count * width + 63) / 64), width, count);
            BitVector cont(words((count + 63) / 64), count);
            count = cont.ones();
            levels.push_back({std::move(chunks), std::move(cont)});
        }
        return DacSequence::from_parts(std::move(levels), width, length);
    }
    size_t pos() const { return pos_; }
    void need(uint64_t n) const {
        if (pos_ + n > limit_) throw IoError(IoError::Kind::Truncated, "index file truncated");
    }

private:
    const std::string& bytes_;
    size_t limit_;
    size_t pos_ = 0;
};

struct Header {
    StructureType tag;
    uint64_t rows, cols, side, t, d;
    KSchedule schedule;
    uint32_t aug_levels;
    uint8_t dac_width;
};

void write_header(ByteWriter& w, const Header& h) {
    for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
    w.u8(kFormatVersion);
    w.u8(static_cast<uint8_t>(h.tag));
    w.u64(h.rows);
    w.u64(h.cols);
    w.u64(h.side);
    w.u64(h.t);
    w.u64(h.d);
    const auto& entries = h.schedule.entries();
    w.u8(static_cast<uint8_t>(entries.size()));
    for (const KSchedule::Entry& e : entries) {
        w.u32(e.k);
        w.u32(e.levels);
    }
    w.u32(h.aug_levels);
    w.u8(h.dac_width);
}

Header read_header(ByteReader& r) {
    for (char c : kMagic) {
        if (r.u8() != static_cast<uint8_t>(c)) {
            throw IoError(IoError::Kind::BadMagic, "not a k2agg index file");
        }
    }
    uint8_t version = r.u8();
    if (version != kFormatVersion) {
        throw IoError(IoError::Kind::BadVersion,
                      "unsupported format version " + std::to_string(version));
    }
    Header h{};
    uint8_t tag = r.u8();
    if (tag < 1 || tag > 4) {
        throw IoError(IoError::Kind::BadTag, "unknown structure tag " + std::to_string(tag));
    }
    h.tag = static_cast<StructureType>(tag);
    h.rows = r.u64();
    h.cols = r.u64();
    h.side = r.u64();
    h.t = r.u64();
    h.d = r.u64();
    uint8_t n_entries = r.u8();
    std::vector<KSchedule::Entry> entries(n_entries);
    for (auto& e : entries) {
        e.k = r.u32();
        e.levels = r.u32();
    }
    try {
        h.schedule = KSchedule(std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw IoError(IoError::Kind::Malformed, e.what());
    }
    if (h.schedule.side() != h.side) {
        throw IoError(IoError::Kind::Malformed, "schedule does not match the stored side");
    }
    h.aug_levels = r.u32();
    h.dac_width = r.u8();
    return h;
}

void write_treap_payload(ByteWriter& w, const K2Treap& tr) {
    w.bitvector(tr.t());
    for (size_t l = 0; l < tr.coord_x().size(); ++l) {
        w.packed(tr.coord_x()[l]);
        w.packed(tr.coord_y()[l]);
    }
    w.dac(tr.values());
}

K2Treap read_treap_payload(ByteReader& r, const Header& h) {
    K2Treap::Parts parts;
    parts.schedule = h.schedule;
    parts.rows = h.rows;
    parts.cols = h.cols;
    parts.weight_domain = h.d;
    parts.t = r.bitvector();
    for (unsigned l = 0; l < h.schedule.num_levels(); ++l) {
        parts.coord_x.push_back(r.packed());
        parts.coord_y.push_back(r.packed());
    }
    parts.values = r.dac();
    return K2Treap::from_parts(std::move(parts));
}

}  // namespace

uint32_t crc32(const void* data, size_t size) {
    static const std::array<uint32_t, 256> table = make_crc_table();
    const auto* p = static_cast<const unsigned char*>(data);
    uint32_t crc = 0xFFFFFFFFu;
    for (size_t i = 0; i < size; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

StructureType structure_type(const IndexVariant& index) {
    if (std::holds_alternative<K2Tree>(index)) return StructureType::K2TreeIndex;
    if (std::holds_alternative<TreapIndex>(index)) return StructureType::K2TreapIndex;
    const auto& ct = std::get<CountingK2Tree>(index);
    return ct.mode() == AggregateMode::Count ? StructureType::CountingIndex
                                             : StructureType::SumIndex;
}

std::string structure_name(StructureType type) {
    switch (type) {
        case StructureType::K2TreeIndex: return "k2tree";
        case StructureType::K2TreapIndex: return "k2treap";
        case StructureType::CountingIndex: return "rck2tree-count";
        case StructureType::SumIndex: return "rck2tree-sum";
    }
    return "unknown";
}

std::string serialize_index(const IndexVariant& index) {
    ByteWriter w;
    if (const auto* tree = std::get_if<K2Tree>(&index)) {
        write_header(w, {StructureType::K2TreeIndex, tree->rows(), tree->cols(), tree->side(),
                         tree->num_points(), 0, tree->schedule(), 0, 0});
        w.bitvector(tree->t());
        w.bitvector(tree->l());
    } else if (const auto* treap = std::get_if<TreapIndex>(&index)) {
        const K2Treap& mx = treap->max_treap;
        write_header(w, {StructureType::K2TreapIndex, mx.rows(), mx.cols(), mx.side(),
                         mx.num_points(), mx.weight_domain(), mx.schedule(), 0,
                         static_cast<uint8_t>(mx.values().chunk_width())});
        w.u8(treap->min_treap.has_value() ? 1 : 0);
        write_treap_payload(w, mx);
        if (treap->min_treap) write_treap_payload(w, *treap->min_treap);
    } else {
        const auto& ct = std::get<CountingK2Tree>(index);
        write_header(w, {structure_type(index), ct.base().rows(), ct.base().cols(),
                         ct.base().side(), ct.base().num_points(), ct.weight_domain(),
                         ct.base().schedule(), ct.aug_levels(),
                         static_cast<uint8_t>(ct.counts().chunk_width())});
        w.bitvector(ct.base().t());
        w.bitvector(ct.base().l());
        w.dac(ct.counts());
        if (ct.mode() == AggregateMode::Sum) w.dac(ct.leaf_weights());
    }
    uint32_t crc = crc32(w.bytes().data(), w.bytes().size());
    w.u32(crc);
    return std::move(w).take();
}

IndexVariant deserialize_index(const std::string& bytes) {
    if (bytes.size() < 4) throw IoError(IoError::Kind::Truncated, "index file truncated");
    size_t payload_end = bytes.size() - 4;
    ByteReader r(bytes, payload_end);
    try {
        Header h = read_header(r);

        uint32_t stored = 0;
        for (int i = 0; i < 4; ++i) {
            stored |= uint32_t(static_cast<unsigned char>(bytes[payload_end + i])) << (8 * i);
        }
        if (crc32(bytes.data(), payload_end) != stored) {
            throw IoError(IoError::Kind::ChecksumMismatch, "index checksum mismatch");
        }

        IndexVariant outial = K2Tree();
        switch (h.tag) {
            case StructureType::K2TreeIndex: {
                K2Tree::Parts parts;
                parts.schedule = h.schedule;
                parts.rows = h.rows;
                parts.cols = h.cols;
                parts.t = r.bitvector();
                parts.l = r.bitvector();
                out yourself = K2Tree::from_parts(std::move(parts));
                break;
            }
        }
        return out;
    } catch (const std::invalid_argument& e) {
        throw IoError(IoError::Kind::Malformed, e.what());
    }
}

}  // namespace k2agg
