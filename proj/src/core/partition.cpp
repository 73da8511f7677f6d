#include "partition.hpp"

#include "check.hpp"

#include <algorithm>
#include <cmath>

namespace ramlt {

// ---- Grid2D ----------------------------------------------------------------

Grid2D::Grid2D(int n) : n_(n) {
    RAMLT_CHECK(n >= 1, "grid size must be >= 1");
}

int Grid2D::cell_of(const CanonicalPoint2 &p) const {
    int ix = std::min(static_cast<int>(p.u * n_), n_ - 1);
    int iy = std::min(static_cast<int>(p.v * n_), n_ - 1);
    return iy * n_ + ix;
}

void Grid2D::cell_bounds(int cell, double out[4]) const {
    int iy = cell / n_;
    int ix = cell % n_;
    double inv = 1.0 / n_;
    out[0] = ix * inv;
    out[1] = iy * inv;
    out[2] = (ix + 1) * inv;
    out[3] = (iy + 1) * inv;
}

// ---- Quadtree ---------------------------------------------------------------

Quadtree::Quadtree(KernelController &controller) : controller_(controller) {
    nodes_.emplace_back(0, 0u, 0u);
    nodes_[0].region = controller_.allocate_region();
    region_to_node_[nodes_[0].region] = 0;
}

void Quadtree::bounds_of(const Node &node, double out[4]) const {
    double scale = std::ldexp(1.0, -static_cast<int>(node.level));
    out[0] = node.ix * scale;
    out[1] = node.iy * scale;
    out[2] = (node.ix + 1) * scale;
    out[3] = (node.iy + 1) * scale;
}

int Quadtree::classify(const CanonicalPoint2 &p) const {
    RAMLT_CHECK(!exclusive_.load(std::memory_order_acquire), "classify during refinement");
    const Node *node = &nodes_[0];
    while (node->first_child >= 0) {
        double scale = std::ldexp(1.0, -static_cast<int>(node->level));
        double mid_u = (node->ix + 0.5) * scale;
        double mid_v = (node->iy + 0.5) * scale;
        int q = (p.u >= mid_u ? 1 : 0) + (p.v >= mid_v ? 2 : 0);
        node = &nodes_[node->first_child + q];
    }
    return node->region;
}

void Quadtree::record_visit(int region) {
    RAMLT_CHECK(!exclusive_.load(std::memory_order_acquire), "record_visit during refinement");
    auto it = region_to_node_.find(region);
    RAMLT_CHECK(it != region_to_node_.end(), "unknown region id");
    nodes_[it->second].visits.fetch_add(1, std::memory_order_relaxed);
}

int Quadtree::refine(uint64_t m_split) {
    begin_exclusive();
    // snapshot: only leaves that exist now are candidates
    std::vector<int> candidates;
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].first_child < 0)
            candidates.push_back(static_cast<int>(i));

    int splits = 0;
    for (int idx : candidates) {
        Node &node = nodes_[idx];
        if (node.level >= kMaxQuadtreeDepth)
            continue;
        if (node.visits.load(std::memory_order_relaxed) < m_split)
            continue;
        int first = static_cast<int>(nodes_.size());
        for (int q = 0; q < 4; ++q) {
            // child ordering: lower-left, lower-right, upper-left, upper-right
            nodes_.emplace_back(static_cast<uint16_t>(node.level + 1),
                                node.ix * 2 + (q & 1), node.iy * 2 + (q >> 1));
            Node &child = nodes_.back();
            child.region = controller_.allocate_child(node.region);
            region_to_node_[child.region] = first + q;
        }
        node.first_child = first;
        node.visits.store(0, std::memory_order_relaxed);
        region_to_node_.erase(node.region);
        ++splits;
        leaf_count_ += 3;
    }
    end_exclusive();
    return splits;
}

std::vector<Quadtree::LeafInfo> Quadtree::leaves() const {
    std::vector<LeafInfo> out;
    for (const Node &node : nodes_) {
        if (node.first_child >= 0)
            continue;
        double b[4];
        bounds_of(node, b);
        out.push_back({node.region, b[0], b[1], b[2], b[3],
                       node.visits.load(std::memory_order_relaxed)});
    }
    return out;
}

void Quadtree::dump(std::ostream &os, const KernelController &controller) const {
    for (const LeafInfo &leaf : leaves()) {
        os << "leaf " << leaf.region << " " << leaf.u0 << " " << leaf.v0 << " " << leaf.u1
           << " " << leaf.v1 << " " << controller.lambda_of(leaf.region) << " "
           << controller.updates_of(leaf.region) << " " << leaf.visits << "\n";
    }
}

// ---- lens partitions ---------------------------------------------------------

LensGridPartition::LensGridPartition(int n, KernelController &controller)
    : grid_(n), visits_(static_cast<size_t>(n) * n) {
    for (int i = 0; i < grid_.cell_count(); ++i)
        controller.allocate_region();
}

int LensGridPartition::classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &) const {
    return grid_.cell_of(rp);
}

void LensGridPartition::record_visit(int region) {
    visits_[region].fetch_add(1, std::memory_order_relaxed);
}

void LensGridPartition::dump(std::ostream &os, const KernelController &controller) const {
    for (int cell = 0; cell < grid_.cell_count(); ++cell) {
        double b[4];
        grid_.cell_bounds(cell, b);
        os << "leaf " << cell << " " << b[0] << " " << b[1] << " " << b[2] << " " << b[3]
           << " " << controller.lambda_of(cell) << " " << controller.updates_of(cell) << " "
           << visits_[cell].load(std::memory_order_relaxed) << "\n";
    }
}

int LensQuadtreePartition::classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &) const {
    return tree_.classify(rp);
}

int LensQuadtreePartition::refine(uint64_t m_split) {
    return tree_.refine(m_split);
}

// ---- multi-chain partitions ----------------------------------------------------

MultiChainGridPartition::MultiChainGridPartition(int n_top, int n_bottom,
                                                 KernelController &controller)
    : top_(n_top), bottom_(n_bottom),
      visits_(static_cast<size_t>(n_top) * n_top * n_bottom * n_bottom) {
    for (size_t i = 0; i < visits_.size(); ++i)
        controller.allocate_region();
}

int MultiChainGridPartition::classify(const CanonicalPoint2 &rp, const CanonicalPoint2 &cy) const {
    return top_.cell_of(rp) * bottom_.cell_count() + bottom_.cell_of(cy);
}

void MultiChainGridPartition::record_visit(int region) {
    visits_[region].fetch_add(1, std::memory_order_relaxed);
}

size_t MultiChainGridPartition::region_count() const {
    return visits_.size();
}

void MultiChainGridPartition::dump(std::ostream &os, const KernelController &controller) const {
    for (int cell = 0; cell < top_.cell_count(); ++cell) {
        double cb[4];
        top_.cell_bounds(cell, cb);
        os << "# cell " << cell << " " << cb[0] << " " << cb[1] << " " << cb[2] << " " << cb[3]
           << "\n";
        for (int sub = 0; sub < bottom_.cell_count(); ++sub) {
            int region = cell * bottom_.cell_count() + sub;
            double b[4];
            bottom_.cell_bounds(sub, b);
            os << "leaf " << region << " " << b[0] << " " << b[1] << " " << b[2] << " " << b[3]
               << " " << controller.lambda_of(region) << " " << controller.updates_of(region)
               << " " << visits_[region].load(std::memory_order_relaxed) << "\n";
        }
    }
}

MultiChainQuadtreePartition::MultiChainQuadtreePartition(int n_top, KernelController &controller)
    : top_(n_top), controller_(controller) {
    trees_.reserve(static_cast<size_t>(top_.cell_count()));
    for (int i = 0; i < top_.cell_count(); ++i) {
        trees_.push_back(std::make_unique<Quadtree>(controller));
        for (const auto &leaf : trees_.back()->leaves())
            region_to_tree_[leaf.region] = i;
    }
}

int MultiChainQuadtreePartition::classify(const CanonicalPoint2 &rp,
                                          const CanonicalPoint2 &cy) const {
    return trees_[top_.cell_of(rp)]->classify(cy);
}

void MultiChainQuadtreePartition::record_visit(int region) {
    auto it = region_to_tree_.find(region);
    RAMLT_CHECK(it != region_to_tree_.end(), "unknown region id");
    trees_[it->second]->record_visit(region);
}

int MultiChainQuadtreePartition::refine(uint64_t m_split) {
    int splits = 0;
    for (size_t i = 0; i < trees_.size(); ++i) {
        int s = trees_[i]->refine(m_split);
        if (s > 0)
            for (const auto &leaf : trees_[i]->leaves())
                region_to_tree_[leaf.region] = static_cast<int>(i);
        splits += s;
    }
    return splits;
}

size_t MultiChainQuadtreePartition::region_count() const {
    size_t count = 0;
    for (const auto &tree : trees_)
        count += tree->leaf_count();
    return count;
}

void MultiChainQuadtreePartition::dump(std::ostream &os,
                                       const KernelController &controller) const {
    for (int cell = 0; cell < top_.cell_count(); ++cell) {
        double cb[4];
        top_.cell_bounds(cell, cb);
        os << "# cell " << cell << " " << cb[0] << " " << cb[1] << " " << cb[2] << " " << cb[3]
           << "\n";
        trees_[cell]->dump(os, controller);
    }
}

} // namespace ramlt
