#pragma once

#include "adaptation.hpp"
#include "sampling.hpp"

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <ostream>
#include <unordered_map>
#include <vector>

namespace ramlt {

// Splits past this depth are suppressed; unreachable at practical
// split thresholds.
inline constexpr int kMaxQuadtreeDepth = 16;

// Maps canonical points to region ids (indices into a KernelController).
// classify and record_visit are safe to call concurrently between
// refinement barriers; refine requires exclusive access.
class PartitionIndex {
public:
    virtual ~PartitionIndex() = default;

    // rp: raster position of the primary direction; cy: cylindrical
    // coordinates of the secondary direction (ignored by 2d partitions).
    virtual int classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const = 0;
    virtual void record_visit(int region) = 0;
    virtual int refine(uint64_t m_split) = 0;
    virtual size_t region_count() const = 0;
    virtual void dump(std::ostream &os, const KernelController &controller) const = 0;
};

// N x N uniform grid over the unit square; row-major region ids, the upper
// boundary clamps into the last cell.
class Grid2D {
public:
    explicit Grid2D(int n);

    int n() const { return n_; }
    int cell_count() const { return n_ * n_; }
    int cell_of(const CanonicalPoint2 &p) const;
    // bounds of a cell, row-major
    void cell_bounds(int cell, double out[4]) const;

private:
    int n_;
};

// Quadtree over the unit square with counting-based refinement. Region ids
// live in the controller passed at construction; leaves never change id and
// children inherit their parent's scaling state.
class Quadtree {
public:
    explicit Quadtree(KernelController &controller);

    int classify(const CanonicalPoint2 &p) const;
    void record_visit(int region);
    // Splits every current leaf with visits >= m_split exactly once; fresh
    // children are not re-examined. Returns the number of splits.
    int refine(uint64_t m_split);

    size_t leaf_count() const { return leaf_count_; }
    void dump(std::ostream &os, const KernelController &controller) const;

    // leaf enumeration for tests: (region, u0, v0, u1, v1, visits)
    struct LeafInfo {
        int region;
        double u0, v0, u1, v1;
        uint64_t visits;
    };
    std::vector<LeafInfo> leaves() const;

    void begin_exclusive() { exclusive_.store(true, std::memory_order_release); }
    void end_exclusive() { exclusive_.store(false, std::memory_order_release); }

private:
    struct Node {
        uint16_t level = 0;
        uint32_t ix = 0, iy = 0;
        int32_t first_child = -1;  // -1: leaf
        int32_t region = -1;
        std::atomic<uint64_t> visits{0};

        Node() = default;
        Node(uint16_t lv, uint32_t x, uint32_t y) : level(lv), ix(x), iy(y) {}
    };

    void bounds_of(const Node &node, double out[4]) const;

    KernelController &controller_;
    std::deque<Node> nodes_;
    std::unordered_map<int, int> region_to_node_;
    size_t leaf_count_ = 1;
    std::atomic<bool> exclusive_{false};
};

// 2d partitions for the lens perturbation.
class LensGridPartition final : public PartitionIndex {
public:
    LensGridPartition(int n, KernelController &controller);
    int classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const override;
    void record_visit(int region) override;
    int refine(uint64_t) override { return 0; }
    size_t region_count() const override { return static_cast<size_t>(grid_.cell_count()); }
    void dump(std::ostream &os, const KernelController &controller) const override;

private:
    Grid2D grid_;
    std::vector<std::atomic<uint64_t>> visits_;
};

class LensQuadtreePartition final : public PartitionIndex {
public:
    explicit LensQuadtreePartition(KernelController &controller) : tree_(controller) {}
    int classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const override;
    void record_visit(int region) override { tree_.record_visit(region); }
    int refine(uint64_t m_split) override;
    size_t region_count() const override { return tree_.leaf_count(); }
    void dump(std::ostream &os, const KernelController &controller) const override {
        tree_.dump(os, controller);
    }
    Quadtree &tree() { return tree_; }

private:
    Quadtree tree_;
};

// 4d composite partitions for the multi-chain perturbation: a screen-space
// grid on top, one directional structure per cell underneath.
class MultiChainGridPartition final : public PartitionIndex {
public:
    MultiChainGridPartition(int n_top, int n_bottom, KernelController &controller);
    int classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const override;
    void record_visit(int region) override;
    int refine(uint64_t) override { return 0; }
    size_t region_count() const override;
    void dump(std::ostream &os, const KernelController &controller) const override;

private:
    Grid2D top_, bottom_;
    std::vector<std::atomic<uint64_t>> visits_;
};

class MultiChainQuadtreePartition final : public PartitionIndex {
public:
    MultiChainQuadtreePartition(int n_top, KernelController &controller);
    int classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const override;
    void record_visit(int region) override;
    int refine(uint64_t m_split) override;
    size_t region_count() const override;
    void dump(std::ostream &os, const KernelController &controller) const override;

private:
    Grid2D top_;
    std::vector<std::unique_ptr<Quadtree>> trees_;
    // region id -> owning tree, for record_visit
    std::unordered_map<int, int> region_to_tree_;
    KernelController &controller_;
};

} // namespace ramlt
