#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace qscomm {

// Exact k-d tree in the Chebyshev (max) norm, the metric the kNN information
// estimators are defined in. Points are row-major: pts[i*dims + d]. Query
// results are exact; approximate search would bias the estimators and break
// determinism.
class KdTree {
public:
    KdTree(const std::vector<double>& pts, int dims, int leaf_size = 16);

    // Distance from point index i to its k-th nearest neighbor, self excluded.
    double kth_distance(std::size_t i, int k) const;

    // Number of points with max-norm distance strictly below r (self counted
    // when r > 0; callers subtract it).
    std::size_t count_within(const double* q, double r) const;

    std::size_t size() const { return n_; }

private:
    struct Node {
        std::size_t begin, end;  // range in idx_
        int left = -1, right = -1;
        std::vector<double> lo, hi;  // bounding box
    };

    const std::vector<double>& pts_;
    std::size_t n_;
    int dims_;
    int leaf_size_;
    std::vector<std::size_t> idx_;
    std::vector<Node> nodes_;

    int build(std::size_t begin, std::size_t end);
    double dist(const double* a, const double* b) const;
    double box_dist(const Node& nd, const double* q) const;      // min distance to box
    double box_far_dist(const Node& nd, const double* q) const;  // max distance to box

    void knn_search(int node, const double* q, std::size_t self, int k,
                    std::vector<double>& heap) const;
    void count_search(int node, const double* q, double r, std::size_t& acc) const;
};

}  // namespace qscomm
