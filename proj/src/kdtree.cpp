#include "qscomm/kdtree.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qscomm {

KdTree::KdTree(const std::vector<double>& pts, int dims, int leaf_size)
    : pts_(pts), n_(pts.size() / static_cast<std::size_t>(dims)), dims_(dims),
      leaf_size_(leaf_size) {
    idx_.resize(n_);
    std::iota(idx_.begin(), idx_.end(), std::size_t{0});
    if (n_ > 0) {
        nodes_.reserve(2 * n_ / static_cast<std::size_t>(leaf_size_) + 8);
        build(0, n_);
    }
}

int KdTree::build(std::size_t begin, std::size_t end) {
    const int me = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    {
        Node& nd = nodes_.back();
        nd.begin = begin;
        nd.end = end;
        nd.lo.assign(static_cast<std::size_t>(dims_), std::numeric_limits<double>::infinity());
        nd.hi.assign(static_cast<std::size_t>(dims_), -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i) {
            const double* p = &pts_[idx_[i] * static_cast<std::size_t>(dims_)];
            for (int d = 0; d < dims_; ++d) {
                nd.lo[static_cast<std::size_t>(d)] =
                    std::min(nd.lo[static_cast<std::size_t>(d)], p[d]);
                nd.hi[static_cast<std::size_t>(d)] =
                    std::max(nd.hi[static_cast<std::size_t>(d)], p[d]);
            }
        }
    }
    if (end - begin <= static_cast<std::size_t>(leaf_size_)) return me;

    // Split the widest dimension at its median.
    int split_dim = 0;
    double widest = -1.0;
    for (int d = 0; d < dims_; ++d) {
        const double w = nodes_[static_cast<std::size_t>(me)].hi[static_cast<std::size_t>(d)] -
                         nodes_[static_cast<std::size_t>(me)].lo[static_cast<std::size_t>(d)];
        if (w > widest) {
            widest = w;
            split_dim = d;
        }
    }
    if (widest <= 0.0) return me;  // all points identical; keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(begin),
                     idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                         const double va = pts_[a * static_cast<std::size_t>(dims_) + split_dim];
                         const double vb = pts_[b * static_cast<std::size_t>(dims_) + split_dim];
                         if (va != vb) return va < vb;
                         return a < b;  // deterministic total order
                     });
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[static_cast<std::size_t>(me)].left = l;
    nodes_[static_cast<std::size_t>(me)].right = r;
    return me;
}

double KdTree::dist(const double* a, const double* b) const {
    double m = 0.0;
    for (int d = 0; d < dims_; ++d) m = std::max(m, std::fabs(a[d] - b[d]));
    return m;
}

double KdTree::box_dist(const Node& nd, const double* q) const {
    double m = 0.0;
    for (int d = 0; d < dims_; ++d) {
        const std::size_t ud = static_cast<std::size_t>(d);
        double e = 0.0;
        if (q[d] < nd.lo[ud]) e = nd.lo[ud] - q[d];
        else if (q[d] > nd.hi[ud]) e = q[d] - nd.hi[ud];
        m = std::max(m, e);
    }
    return m;
}

double KdTree::box_far_dist(const Node& nd, const double* q) const {
    double m = 0.0;
    for (int d = 0; d < dims_; ++d) {
        const std::size_t ud = static_cast<std::size_t>(d);
        m = std::max(m, std::max(std::fabs(q[d] - nd.lo[ud]), std::fabs(q[d] - nd.hi[ud])));
    }
    return m;
}

void KdTree::knn_search(int node, const double* q, std::size_t self, int k,
                        std::vector<double>& heap) const {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    const double worst =
        heap.size() == static_cast<std::size_t>(k) ? heap.front()
                                                   : std::numeric_limits<double>::infinity();
    if (box_dist(nd, q) >= worst) return;
    if (nd.left < 0) {
        for (std::size_t i = nd.begin; i < nd.end; ++i) {
            const std::size_t j = idx_[i];
            if (j == self) continue;
            const double dj = dist(q, &pts_[j * static_cast<std::size_t>(dims_)]);
            if (heap.size() < static_cast<std::size_t>(k)) {
                heap.push_back(dj);
                std::push_heap(heap.begin(), heap.end());
            } else if (dj < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = dj;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    const double dl = box_dist(nodes_[static_cast<std::size_t>(nd.left)], q);
    const double dr = box_dist(nodes_[static_cast<std::size_t>(nd.right)], q);
    if (dl <= dr) {
        knn_search(nd.left, q, self, k, heap);
        knn_search(nd.right, q, self, k, heap);
    } else {
        knn_search(nd.right, q, self, k, heap);
        knn_search(nd.left, q, self, k, heap);
    }
}

double KdTree::kth_distance(std::size_t i, int k) const {
    std::vector<double> heap;
    heap.reserve(static_cast<std::size_t>(k));
    knn_search(0, &pts_[i * static_cast<std::size_t>(dims_)], i, k, heap);
    if (heap.size() < static_cast<std::size_t>(k))
        throw std::logic_error("kth_distance: fewer than k neighbors available");
    return heap.front();
}

void KdTree::count_search(int node, const double* q, double r, std::size_t& acc) const {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (box_dist(nd, q) >= r) return;
    if (box_far_dist(nd, q) < r) {
        acc += nd.end - nd.begin;
        return;
    }
    if (nd.left < 0) {
        for (std::size_t i = nd.begin; i < nd.end; ++i)
            if (dist(q, &pts_[idx_[i] * static_cast<std::size_t>(dims_)]) < r) ++acc;
        return;
    }
    count_search(nd.left, q, r, acc);
    count_search(nd.right, q, r, acc);
}

std::size_t KdTree::count_within(const double* q, double r) const {
    std::size_t acc = 0;
    if (n_ > 0) count_search(0, q, r, acc);
    return acc;
}

}  // namespace qscomm
