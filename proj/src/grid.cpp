#include "k2agg/grid.hpp"

#include <sstream>

namespace k2agg {

KSchedule::KSchedule(std::vector<Entry> entries) : entries_(std::move(entries)) {
    uint64_t side = 1;
    unsigned levels = 0;
    for (const Entry& e : entries_) {
        if (e.k < 2) throw std::invalid_argument("KSchedule: branching factor must be >= 2");
        for (uint32_t i = 0; i < e.levels; ++i) {
            if (side > (uint64_t(1) << 32) / e.k) throw std::invalid_argument("KSchedule: side too large");
            side *= e.k;
            ks_.push_back(e.k);
            ++levels;
        }
    }
    if (levels == 0) throw std::invalid_argument("KSchedule: no levels");
    sides_.resize(levels + 1);
    sides_[0] = side;
    for (unsigned l = 0; l < levels; ++l) sides_[l + 1] = sides_[l] / ks_[l];
}

KSchedule KSchedule::uniform(uint32_t k, uint64_t min_side) {
    if (k < 2) throw std::invalid_argument("KSchedule: branching factor must be >= 2");
    uint32_t levels = 1;
    uint64_t side = k;
    while (side < min_side) {
        side *= k;
        ++levels;
    }
    return KSchedule({Entry{k, levels}});
}

KSchedule KSchedule::hybrid(uint64_t min_side, uint32_t k1, uint32_t max_k1_levels, uint32_t k2) {
    if (k1 != 4 || k2 != 2) {
        // General case: greedily take k1 levels, then fill with k2.
        uint64_t side = 1;
        uint32_t a = 0;
        while (a < max_k1_levels && side * k1 <= min_side) {
            side *= k1;
            ++a;
        }
        uint32_t b = 0;
        while (side < min_side) {
            side *= k2;
            ++b;
        }
        std::vector<Entry> es;
        if (a > 0) es.push_back({k1, a});
        if (b > 0 || a == 0) es.push_back({k2, b > 0 ? b : 1});
        return KSchedule(std::move(es));
    }
    unsigned bits = ceil_log2(min_side < 2 ? 2 : min_side);
    uint32_t a = std::min<uint32_t>(max_k1_levels, bits / 2);
    uint32_t b = bits - 2 * a;
    std::vector<Entry> es;
    if (a > 0) es.push_back({4, a});
    if (b > 0 || a == 0) es.push_back({2, b > 0 ? b : 1});
    return KSchedule(std::move(es));
}

KSchedule KSchedule::parse(const std::string& text, uint64_t min_side) {
    if (text.empty() || text == "hybrid") return hybrid(min_side);
    std::vector<Entry> fixed;
    uint32_t filler_k = 0;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto xpos = tok.find('x');
        try {
            if (xpos == std::string::npos) {
                if (filler_k != 0) throw std::invalid_argument("");
                filler_k = static_cast<uint32_t>(std::stoul(tok));
            } else {
                uint32_t k = static_cast<uint32_t>(std::stoul(tok.substr(0, xpos)));
                uint32_t levels = static_cast<uint32_t>(std::stoul(tok.substr(xpos + 1)));
                if (levels == 0) throw std::invalid_argument("");
                fixed.push_back({k, levels});
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("KSchedule: cannot parse '" + text + "'");
        }
    }
    uint64_t side = 1;
    for (const Entry& e : fixed) {
        for (uint32_t i = 0; i < e.levels; ++i) side *= e.k;
    }
    if (filler_k != 0) {
        uint32_t b = 0;
        while (side < min_side || (fixed.empty() && b == 0)) {
            side *= filler_k;
            ++b;
        }
        if (b > 0) fixed.push_back({filler_k, b});
    } else if (side < min_side) {
        throw std::invalid_argument("KSchedule: fixed schedule does not cover grid side");
    }
    return KSchedule(std::move(fixed));
}

std::string KSchedule::describe() const {
    std::string out;
    for (const Entry& e : entries_) {
        if (!out.empty()) out += ',';
        out += std::to_string(e.k) + "x" + std::to_string(e.levels);
    }
    return out;
}

bool morton_less(const KSchedule& schedule, Point a, Point b) {
    uint32_t ax = a.x, ay = a.y, bx = b.x, by = b.y;
    for (unsigned l = 0; l < schedule.num_levels(); ++l) {
        uint64_t cs = schedule.side_at(l + 1);
        uint32_t k = schedule.k_at(l);
        uint32_t ca = static_cast<uint32_t>((ay / cs) * k + ax / cs);
        uint32_t cb = static_cast<uint32_t>((by / cs) * k + bx / cs);
        if (ca != cb) return ca < cb;
        ax %= cs;
        ay %= cs;
        bx %= cs;
        by %= cs;
    }
    return false;
}

}  // namespace k2agg
