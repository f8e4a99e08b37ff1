#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strag/common.hpp"

namespace strag {

using Block = std::vector<long>;  // sorted point indices

// Disjoint equal-size blocks covering {0, ..., num_points-1}. Block order is
// part of the value: cyclic placement walks blocks by index.
struct ParallelClass {
    long num_points = 0;
    std::vector<Block> blocks;

    ParallelClass() = default;
    ParallelClass(long num_points_, std::vector<Block> blocks_)
        : num_points(num_points_), blocks(std::move(blocks_)) {
        for (auto& b : blocks) std::sort(b.begin(), b.end());
        validate();
    }

    long block_size() const { return blocks.empty() ? 0 : static_cast<long>(blocks[0].size()); }

    void validate() const {
        if (blocks.empty()) throw parameter_error("parallel class with no blocks");
        const size_t beta = blocks[0].size();
        std::vector<bool> seen(num_points, false);
        size_t covered = 0;
        for (const auto& b : blocks) {
            if (b.size() != beta) throw parameter_error("blocks of unequal size");
            for (long p : b) {
                if (p < 0 || p >= num_points) throw parameter_error("point out of range");
                if (seen[p]) throw parameter_error("blocks are not disjoint");
                seen[p] = true;
                ++covered;
            }
        }
        if (covered != static_cast<size_t>(num_points))
            throw parameter_error("blocks do not cover the point set");
    }

    // Canonical presentation: blocks ordered by their minimum element.
    ParallelClass canonical() const {
        std::vector<Block> sorted = blocks;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Block& a, const Block& b) { return a.front() < b.front(); });
        return ParallelClass(num_points, std::move(sorted));
    }

    bool operator==(const ParallelClass& o) const {
        return num_points == o.num_points && blocks == o.blocks;
    }
};

struct DesignSet {
    long num_points = 0;
    std::vector<ParallelClass> classes;

    DesignSet() = default;
    DesignSet(long num_points_, std::vector<ParallelClass> classes_)
        : num_points(num_points_), classes(std::move(classes_)) {
        validate();
    }

    long block_size() const { return classes.empty() ? 0 : classes[0].block_size(); }

    void validate() const {
        if (classes.empty()) throw parameter_error("design set with no classes");
        const long beta = classes[0].block_size();
        for (const auto& c : classes) {
            if (c.num_points != num_points)
                throw parameter_error("classes on different point sets");
            if (c.block_size() != beta) throw parameter_error("classes with different block sizes");
            c.validate();
        }
    }

    bool operator==(const DesignSet& o) const {
        return num_points == o.num_points && classes == o.classes;
    }
};

// Largest intersection between blocks drawn from two *different* classes.
inline long max_cross_class_intersection(const DesignSet& ds) {
    long worst = 0;
    for (size_t i = 0; i < ds.classes.size(); ++i) {
        for (size_t j = i + 1; j < ds.classes.size(); ++j) {
            for (const auto& a : ds.classes[i].blocks) {
                for (const auto& b : ds.classes[j].blocks) {
                    long inter = 0;
                    size_t x = 0, y = 0;
                    while (x < a.size() && y < b.size()) {
                        if (a[x] == b[y]) { ++inter; ++x; ++y; }
                        else if (a[x] < b[y]) ++x;
                        else ++y;
                    }
                    worst = std::max(worst, inter);
                }
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Cyclic assignment of symbols to workers.
// ---------------------------------------------------------------------------

struct CyclicLayout {
    long num_symbols = 0;   // delta
    long num_workers = 0;   // n
    long per_worker = 0;    // ell
    std::vector<std::vector<long>> assignment;  // top-to-bottom symbol ids
};

// Worker j holds {j, j+1, ..., j+ell-1} (mod delta), top to bottom.
inline CyclicLayout cyclic_assignment(long delta, long n, long ell) {
    if (ell > delta) throw parameter_error("cyclic assignment requires ell <= delta");
    if (ell < 1 || delta < 1) throw parameter_error("cyclic assignment needs positive sizes");
    if (n != delta) throw parameter_error("cyclic assignment requires n == delta");
    CyclicLayout layout{delta, n, ell, {}};
    layout.assignment.resize(n);
    for (long j = 0; j < n; ++j) {
        layout.assignment[j].resize(ell);
        for (long t = 0; t < ell; ++t) layout.assignment[j][t] = (j + t) % delta;
    }
    return layout;
}

// Maximum number of symbols processable across the cyclic layout while a fixed
// symbol is processed exactly c times.
inline long long alpha_c(long delta, long ell, long c) {
    if (c < 0 || c > ell) throw parameter_error("alpha_c requires 0 <= c <= ell");
    if (ell > delta || ell < 1) throw parameter_error("alpha_c requires 1 <= ell <= delta");
    long long value = static_cast<long long>(delta) * ell - static_cast<long long>(ell) * (ell + 1) / 2;
    for (long i = 0; i < c; ++i) value += ell - i;
    return value;
}

// ---------------------------------------------------------------------------
// Stock parallel classes.
// ---------------------------------------------------------------------------

// `count` copies of the consecutive-blocks class {{0..beta-1}, {beta..2beta-1}, ...}.
inline DesignSet trivial_classes(long delta, long beta, long count) {
    if (beta < 1 || delta < 1 || count < 1)
        throw parameter_error("trivial_classes needs positive parameters");
    if (delta % beta != 0) throw parameter_error("beta must divide delta");
    std::vector<Block> blocks;
    for (long b = 0; b < delta / beta; ++b) {
        Block blk(beta);
        for (long i = 0; i < beta; ++i) blk[i] = b * beta + i;
        blocks.push_back(blk);
    }
    ParallelClass cls(delta, blocks);
    return DesignSet(delta, std::vector<ParallelClass>(count, cls));
}

// The two shifted pair classes: i-th blocks {2i, 2i+1} and {2i, 2i+5} (mod delta).
// Block order follows the shift index i; the pairing between same-index blocks
// of the two classes is what the c = beta = 2 construction exploits.
inline DesignSet shifted_pair_classes(long delta) {
    if (delta % 2 != 0 || delta < 8)
        throw parameter_error("shifted_pair_classes requires even delta >= 8");
    std::vector<Block> p0, p1;
    for (long i = 0; i < delta / 2; ++i) {
        p0.push_back({2 * i, 2 * i + 1});
        long a = 2 * i, b = (2 * i + 5) % delta;
        p1.push_back({std::min(a, b), std::max(a, b)});
    }
    return DesignSet(delta, {ParallelClass(delta, p0), ParallelClass(delta, p1)});
}

// A resolution of the 15-point, block-size-3 system in which every pair of
// points shares exactly one block: 7 parallel classes of 5 triples. Stored as
// a fixed table; the invariants are enforced by tests, not reconstructed here.
inline DesignSet kirkman_classes() {
    static const long table[7][5][3] = {
        {{0, 1, 2}, {3, 7, 11}, {4, 9, 14}, {5, 10, 12}, {6, 8, 13}},
        {{0, 3, 4}, {1, 7, 9}, {2, 12, 13}, {5, 8, 14}, {6, 10, 11}},
        {{0, 5, 6}, {1, 8, 10}, {2, 11, 14}, {3, 9, 13}, {4, 7, 12}},
        {{0, 7, 8}, {1, 11, 13}, {2, 4, 5}, {3, 10, 14}, {6, 9, 12}},
        {{0, 9, 10}, {1, 12, 14}, {2, 3, 6}, {4, 8, 11}, {5, 7, 13}},
        {{0, 11, 12}, {1, 3, 5}, {2, 8, 9}, {4, 10, 13}, {6, 7, 14}},
        {{0, 13, 14}, {1, 4, 6}, {2, 7, 10}, {3, 8, 12}, {5, 9, 11}},
    };
    std::vector<ParallelClass> classes;
    for (const auto& cls : table) {
        std::vector<Block> blocks;
        for (const auto& blk : cls) blocks.push_back({blk[0], blk[1], blk[2]});
        classes.emplace_back(15, blocks);
    }
    return DesignSet(15, std::move(classes));
}

// ---------------------------------------------------------------------------
// Incidence matrices (points x blocks, 0/1).
// ---------------------------------------------------------------------------

struct IncidenceMatrix {
    long points = 0;
    long num_blocks = 0;
    std::vector<std::uint8_t> data;  // row-major points x blocks

    std::uint8_t at(long p, long b) const { return data[p * num_blocks + b]; }

    std::vector<long> column_sums() const {
        std::vector<long> s(num_blocks, 0);
        for (long p = 0; p < points; ++p)
            for (long b = 0; b < num_blocks; ++b) s[b] += at(p, b);
        return s;
    }

    std::vector<long> row_sums() const {
        std::vector<long> s(points, 0);
        for (long p = 0; p < points; ++p)
            for (long b = 0; b < num_blocks; ++b) s[p] += at(p, b);
        return s;
    }
};

inline IncidenceMatrix incidence_matrix(long num_points, const std::vector<Block>& blocks) {
    IncidenceMatrix m{num_points, static_cast<long>(blocks.size()), {}};
    m.data.assign(num_points * blocks.size(), 0);
    for (size_t b = 0; b < blocks.size(); ++b)
        for (long p : blocks[b]) m.data[p * m.num_blocks + static_cast<long>(b)] = 1;
    return m;
}

inline IncidenceMatrix incidence_matrix(const ParallelClass& cls) {
    return incidence_matrix(cls.num_points, cls.blocks);
}

// Classes flattened in order.
inline IncidenceMatrix incidence_matrix(const DesignSet& ds) {
    std::vector<Block> all;
    for (const auto& c : ds.classes) all.insert(all.end(), c.blocks.begin(), c.blocks.end());
    return incidence_matrix(ds.num_points, all);
}

// Kronecker pairing of two parallel classes: block (i, j) contains
// {p * delta_b + q : p in a.blocks[i], q in b.blocks[j]}, in row-major (i, j)
// order. The result is again a parallel class.
inline ParallelClass product_class(const ParallelClass& a, const ParallelClass& b) {
    std::vector<Block> blocks;
    blocks.reserve(a.blocks.size() * b.blocks.size());
    for (const auto& pa : a.blocks) {
        for (const auto& pb : b.blocks) {
            Block blk;
            blk.reserve(pa.size() * pb.size());
            for (long p : pa)
                for (long q : pb) blk.push_back(p * b.num_points + q);
            blocks.push_back(std::move(blk));
        }
    }
    return ParallelClass(a.num_points * b.num_points, std::move(blocks));
}

// ---------------------------------------------------------------------------
// JSON form: {"points": delta, "classes": [[[...block...], ...], ...]}
// ---------------------------------------------------------------------------

inline nlohmann::json design_set_to_json(const DesignSet& ds) {
    nlohmann::json j;
    j["points"] = ds.num_points;
    j["classes"] = nlohmann::json::array();
    for (const auto& c : ds.classes) {
        nlohmann::json jc = nlohmann::json::array();
        for (const auto& b : c.blocks) jc.push_back(b);
        j["classes"].push_back(jc);
    }
    return j;
}

inline DesignSet design_set_from_json(const nlohmann::json& j) {
    long points = j.at("points").get<long>();
    std::vector<ParallelClass> classes;
    for (const auto& jc : j.at("classes")) {
        std::vector<Block> blocks;
        for (const auto& jb : jc) blocks.push_back(jb.get<Block>());
        classes.emplace_back(points, std::move(blocks));
    }
    return DesignSet(points, std::move(classes));
}

}  // namespace strag
