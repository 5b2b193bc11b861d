#include "k2agg/regions.hpp"

#include <stdexcept>

namespace k2agg {

RegionIndex RegionIndex::derive(const KSchedule& schedule, const BitVector& t,
                                const BitVector* l) {
    RegionIndex ri;
    unsigned h = schedule.num_levels();
    ri.start_.resize(h + 1);
    ri.ones_before_.resize(h);

    uint64_t pos = 0;
    uint64_t ones = 0;
    uint64_t prev_ones = 1;  // the root counts as one node at level 0
    for (unsigned r = 0; r < h; ++r) {
        ri.start_[r] = pos;
        ri.ones_before_[r] = ones;
        uint64_t k = schedule.k_at(r);
        uint64_t size = prev_ones * k * k;
        bool last = (r + 1 == h);
        if (last && l != nullptr) {
            if (pos != t.size() || l->size() != size) {
                throw std::invalid_argument("RegionIndex: bitmap sizes inconsistent with schedule");
            }
            prev_ones = l->ones();
        } else {
            if (pos + size > t.size()) {
                throw std::invalid_argument("RegionIndex: bitmap sizes inconsistent with schedule");
            }
            prev_ones = t.prefix_rank(pos + size) - ones;
            ones += prev_ones;
        }
        pos += size;
    }
    ri.start_[h] = pos;
    uint64_t expected = l != nullptr ? t.size() + l->size() : t.size();
    if (pos != expected) {
        throw std::invalid_argument("RegionIndex: trailing bits beyond last region");
    }
    return ri;
}

}  // namespace k2agg
