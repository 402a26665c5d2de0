#include "qscomm/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qscomm/errors.hpp"
#include "qscomm/kdtree.hpp"
#include "qscomm/parallel.hpp"
#include "qscomm/rng.hpp"

namespace qscomm {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("sample vectors must have equal length");
    if (x.size() < 8) throw ConfigError("need at least 8 samples");
    for (double v : x)
        if (!std::isfinite(v)) throw ConfigError("non-finite value in x");
    for (double v : y)
        if (!std::isfinite(v)) throw ConfigError("non-finite value in y");
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    if (*xmin == *xmax) throw ConfigError("x is constant; MI undefined for a degenerate marginal");
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*ymin == *ymax) throw ConfigError("y is constant; MI undefined for a degenerate marginal");
}

// Index-derived tie-break jitter, identical pattern for every dimension of a
// point so that ksg_mi stays exactly symmetric under argument swap.
inline double jitter_unit(std::size_t i) {
    return unit_from_bits(mix64(static_cast<std::uint64_t>(i) ^ 0x6A09E667F3BCC908ull)) - 0.5;
}

// Normalized rank transform (copula scale). The kNN estimators run on ranks so
// that marginals with wildly different scales are commensurable under the
// max-norm and the estimate is exactly invariant under strictly monotone
// reparameterization. Value ties break by sample index, deterministically.
std::vector<double> rank_transform(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
    std::vector<double> out(n);
    for (std::size_t pos = 0; pos < n; ++pos)
        out[order[pos]] = (static_cast<double>(pos) + 0.5) / static_cast<double>(n);
    return out;
}

// Strict count of sorted values v with |v - c| < eps, self included.
std::size_t strict_count(const std::vector<double>& sorted, double c, double eps) {
    auto lo = std::upper_bound(sorted.begin(), sorted.end(), c - eps);
    auto hi = std::lower_bound(sorted.begin(), sorted.end(), c + eps);
    return static_cast<std::size_t>(hi - lo);
}

}  // namespace

double digamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return acc + std::log(x) - 0.5 / x -
           f * (1.0 / 12.0 -
                f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f * (1.0 / 132.0)))));
}

double ksg_mi(std::span<const double> x, std::span<const double> y, int k) {
    check_pairs(x, y);
    const std::size_t n = x.size();
    if (k < 1) throw ConfigError("k must be >= 1");
    if (n <= static_cast<std::size_t>(k)) throw ConfigError("need more samples than k");

    std::vector<double> xs = rank_transform(x);
    std::vector<double> ys = rank_transform(y);
    std::vector<double> joint(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = 1e-10 * jitter_unit(i);
        xs[i] += u;
        ys[i] += u;
        joint[2 * i] = xs[i];
        joint[2 * i + 1] = ys[i];
    }
    KdTree tree(joint, 2);
    std::vector<double> sx = xs, sy = ys;
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = tree.kth_distance(i, k);
        const std::size_t nx = strict_count(sx, xs[i], eps) - 1;
        const std::size_t ny = strict_count(sy, ys[i], eps) - 1;
        acc += digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
    }
    const double nats = digamma(k) + digamma(static_cast<double>(n)) -
                        acc / static_cast<double>(n);
    return nats / kLn2;
}

double binned_mi(std::span<const double> x, std::span<const double> y, int bins) {
    check_pairs(x, y);
    if (bins < 2) throw ConfigError("bins must be >= 2");
    const std::size_t n = x.size();
    const auto [xlo_it, xhi_it] = std::minmax_element(x.begin(), x.end());
    const auto [ylo_it, yhi_it] = std::minmax_element(y.begin(), y.end());
    const double xlo = *xlo_it, xw = (*xhi_it - xlo) / bins;
    const double ylo = *ylo_it, yw = (*yhi_it - ylo) / bins;

    const std::size_t b = static_cast<std::size_t>(bins);
    std::vector<std::size_t> hist(b * b, 0), hx(b, 0), hy(b, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto ix = std::min<std::size_t>(static_cast<std::size_t>((x[i] - xlo) / xw), b - 1);
        auto iy = std::min<std::size_t>(static_cast<std::size_t>((y[i] - ylo) / yw), b - 1);
        ++hist[ix * b + iy];
        ++hx[ix];
        ++hy[iy];
    }
    double bits = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t ix = 0; ix < b; ++ix)
        for (std::size_t iy = 0; iy < b; ++iy) {
            const std::size_t c = hist[ix * b + iy];
            if (c == 0) continue;
            const double pxy = static_cast<double>(c) / dn;
            const double px = static_cast<double>(hx[ix]) / dn;
            const double py = static_cast<double>(hy[iy]) / dn;
            bits += pxy * std::log2(pxy / (px * py));
        }
    return std::max(bits, 0.0);
}

std::pair<double, double> block_bootstrap_ci(
    std::span<const double> x, std::span<const double> y,
    const std::function<double(std::span<const double>, std::span<const double>)>& estimator,
    int block_len, int n_boot, double alpha, std::uint64_t seed, int n_threads) {
    check_pairs(x, y);
    const std::size_t n = x.size();
    if (block_len < 1 || static_cast<std::size_t>(block_len) > n)
        throw ConfigError("block_len must be in [1, n]");
    if (n_boot < 100) throw ConfigError("n_boot must be >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");

    const std::uint64_t key = mix64(seed ^ 0xB5297A4D3C2E16F5ull);
    const std::size_t l = static_cast<std::size_t>(block_len);
    const std::size_t n_part = (n + l - 1) / l;  // disjoint circular blocks
    // Resamples must not duplicate points: the kNN estimator reads duplicated
    // pairs as spurious fine-scale dependence and the interval drifts far away
    // from the estimate. Each resample therefore draws half the blocks of a
    // randomly offset circular partition without replacement (all of them when
    // a single block covers the series, which degenerates to a rotation).
    const std::size_t n_draw = std::max<std::size_t>(1, n_part / 2);

    std::vector<double> estimates(static_cast<std::size_t>(n_boot));
    parallel_for(static_cast<std::size_t>(n_boot), n_threads, [&](std::size_t bidx) {
        const std::uint64_t rkey = mix64(key ^ mix64(bidx));
        std::uint64_t ctr = 0;
        const std::size_t offset = uniform_index(rkey, ctr++, n);
        std::vector<std::size_t> blocks(n_part);
        std::iota(blocks.begin(), blocks.end(), std::size_t{0});
        for (std::size_t i = 0; i < n_draw; ++i) {
            const std::size_t j =
                i + uniform_index(rkey, ctr++, static_cast<std::uint64_t>(n_part - i));
            std::swap(blocks[i], blocks[j]);
        }
        std::vector<double> xb, yb;
        xb.reserve(n_draw * l);
        yb.reserve(n_draw * l);
        for (std::size_t b = 0; b < n_draw; ++b) {
            const std::size_t begin = blocks[b] * l;
            const std::size_t end = std::min(begin + l, n);
            for (std::size_t idx = begin; idx < end; ++idx) {
                const std::size_t src = (offset + idx) % n;
                xb.push_back(x[src]);
                yb.push_back(y[src]);
            }
        }
        try {
            estimates[bidx] = estimator(xb, yb);
        } catch (const std::exception& e) {
            throw NumericalError("bootstrap resample " + std::to_string(bidx) +
                                 " failed: " + e.what());
        }
    });

    std::sort(estimates.begin(), estimates.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(estimates.size() - 1);
        const std::size_t i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, estimates.size() - 1);
        const double w = pos - static_cast<double>(i0);
        return (1.0 - w) * estimates[i0] + w * estimates[i1];
    };
    return {quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
}

MIEstimate ksg_mi_with_ci(std::span<const double> x, std::span<const double> y, int k,
                          int block_len, int n_boot, double alpha, std::uint64_t seed,
                          int n_threads) {
    MIEstimate est;
    est.bits = ksg_mi(x, y, k);
    est.k = k;
    est.n_samples = x.size();
    est.block_len = block_len > 0
                        ? block_len
                        : static_cast<int>(std::ceil(std::cbrt(static_cast<double>(x.size()))));
    auto fn = [k](std::span<const double> xb, std::span<const double> yb) {
        return ksg_mi(xb, yb, k);
    };
    std::tie(est.ci_low, est.ci_high) =
        block_bootstrap_ci(x, y, fn, est.block_len, n_boot, alpha, seed, n_threads);
    return est;
}

namespace {

TransferEntropy te_from_triples(const std::vector<double>& ys, const std::vector<double>& xs,
                                const std::vector<double>& zs, int k) {
    const std::size_t m = ys.size();
    if (m <= static_cast<std::size_t>(k) + 1) throw ConfigError("series too short for lag and k");

    auto degenerate = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi;
    };
    if (degenerate(ys) || degenerate(xs) || degenerate(zs))
        throw ConfigError("constant series; transfer entropy undefined");

    const std::vector<double> ry = rank_transform(ys);
    const std::vector<double> rx = rank_transform(xs);
    const std::vector<double> rz = rank_transform(zs);

    std::vector<double> joint(3 * m), xz(2 * m), yz(2 * m), z1(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = 1e-10 * jitter_unit(i);
        const double yv = ry[i] + u;
        const double xv = rx[i] + u;
        const double zv = rz[i] + u;
        joint[3 * i] = yv;
        joint[3 * i + 1] = xv;
        joint[3 * i + 2] = zv;
        xz[2 * i] = xv;
        xz[2 * i + 1] = zv;
        yz[2 * i] = yv;
        yz[2 * i + 1] = zv;
        z1[i] = zv;
    }
    KdTree tree_joint(joint, 3);
    KdTree tree_xz(xz, 2);
    KdTree tree_yz(yz, 2);
    std::vector<double> sz = z1;
    std::sort(sz.begin(), sz.end());

    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double eps = tree_joint.kth_distance(i, k);
        const std::size_t n_xz = tree_xz.count_within(&xz[2 * i], eps) - 1;
        const std::size_t n_yz = tree_yz.count_within(&yz[2 * i], eps) - 1;
        const std::size_t n_z = strict_count(sz, z1[i], eps) - 1;
        acc += digamma(static_cast<double>(n_z) + 1.0) -
               digamma(static_cast<double>(n_xz) + 1.0) -
               digamma(static_cast<double>(n_yz) + 1.0);
    }
    TransferEntropy te;
    te.bits_raw = (digamma(k) + acc / static_cast<double>(m)) / kLn2;
    te.bits = std::max(te.bits_raw, 0.0);
    return te;
}

}  // namespace

TransferEntropy transfer_entropy(std::span<const double> src, std::span<const double> dst,
                                 int lag, int k) {
    return transfer_entropy_pooled({src}, {dst}, lag, k);
}

TransferEntropy transfer_entropy_pooled(const std::vector<std::span<const double>>& src,
                                        const std::vector<std::span<const double>>& dst,
                                        int lag, int k) {
    if (lag < 1) throw ConfigError("lag must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (src.size() != dst.size() || src.empty())
        throw ConfigError("need matching, non-empty series lists");
    std::vector<double> ys, xs, zs;
    for (std::size_t s = 0; s < src.size(); ++s) {
        if (src[s].size() != dst[s].size())
            throw ConfigError("src/dst series must have equal length");
        if (src[s].size() <= static_cast<std::size_t>(lag + k))
            throw ConfigError("series length must exceed lag + k");
        for (std::size_t t = static_cast<std::size_t>(lag); t < dst[s].size(); ++t) {
            ys.push_back(dst[s][t]);
            xs.push_back(src[s][t - static_cast<std::size_t>(lag)]);
            zs.push_back(dst[s][t - static_cast<std::size_t>(lag)]);
        }
    }
    return te_from_triples(ys, xs, zs, k);
}

NoiseSplit noise_decomposition(const std::vector<Trajectory>& replicates, int species,
                               const NoiseWindow& window) {
    if (replicates.empty()) throw ConfigError("need at least one replicate");
    if (species < 0 || species > 1) throw ConfigError("species index must be 0 or 1");
    const std::size_t ns = replicates.front().n_samples();
    const std::size_t n_cells = replicates.front().m[species].size();
    if (n_cells < 2) throw ConfigError("noise decomposition needs at least 2 cells");
    for (const auto& tr : replicates)
        if (tr.n_samples() != ns || tr.m[species].size() != n_cells)
            throw ConfigError("replicates disagree in shape");
    if (!(window.start_frac >= 0.0 && window.start_frac < window.end_frac &&
          window.end_frac <= 1.0))
        throw ConfigError("invalid analysis window");

    const std::size_t i0 = static_cast<std::size_t>(window.start_frac * (ns - 1));
    const std::size_t i1 = static_cast<std::size_t>(window.end_frac * (ns - 1));
    if (i1 <= i0 + 1) throw ConfigError("analysis window too short");

    // Occupancy guard on the shared signal over the window.
    std::vector<double> a_vals;
    a_vals.reserve(replicates.size() * (i1 - i0 + 1));
    for (const auto& tr : replicates)
        for (std::size_t t = i0; t <= i1; ++t) a_vals.push_back(tr.a[t]);
    const auto [a_lo, a_hi] = std::minmax_element(a_vals.begin(), a_vals.end());
    if (*a_hi > *a_lo) {  // an exactly constant signal skips the guard
        const int nb = std::max(window.n_bins, 3);
        std::vector<std::size_t> occ(static_cast<std::size_t>(nb), 0);
        const double w = (*a_hi - *a_lo) / nb;
        for (double v : a_vals) {
            auto b = std::min<std::size_t>(static_cast<std::size_t>((v - *a_lo) / w),
                                           static_cast<std::size_t>(nb - 1));
            ++occ[b];
        }
        // Merge adjacent bins until every merged group reaches the minimum count.
        std::size_t usable = 0, run = 0;
        for (std::size_t b = 0; b < occ.size(); ++b) {
            run += occ[b];
            if (run >= window.min_bin_count) {
                ++usable;
                run = 0;
            }
        }
        if (usable < 3)
            throw ConfigError("insufficient autoinducer dynamic range in analysis window");
    }

    // Slices are (replicate, time) pairs; cells are equal-count across slices,
    // so the split below is the exact law of total variance for the pooled
    // single-cell samples.
    double mean_within = 0.0;      // E[within-slice cell variance]
    double mean_of_means = 0.0;    // grand mean of slice means
    double mean_sq_of_means = 0.0; // grand mean of squared slice means
    std::size_t n_slices = 0;
    for (const auto& tr : replicates) {
        for (std::size_t t = i0; t <= i1; ++t) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t c = 0; c < n_cells; ++c) {
                const double v = tr.m[species][c][t];
                s += v;
                s2 += v * v;
            }
            const double mean = s / static_cast<double>(n_cells);
            const double var = s2 / static_cast<double>(n_cells) - mean * mean;
            mean_within += std::max(var, 0.0);
            mean_of_means += mean;
            mean_sq_of_means += mean * mean;
            ++n_slices;
        }
    }
    const double dn = static_cast<double>(n_slices);
    NoiseSplit out;
    out.intrinsic_var = mean_within / dn;
    const double mm = mean_of_means / dn;
    out.extrinsic_var = std::max(mean_sq_of_means / dn - mm * mm, 0.0);
    const double total = out.intrinsic_var + out.extrinsic_var;
    if (total <= 0.0) throw ConfigError("zero total variance in analysis window");
    out.intrinsic_frac = out.intrinsic_var / total;
    out.extrinsic_frac = out.extrinsic_var / total;
    return out;
}

std::vector<double> mean_monitor(const Trajectory& traj, int species) {
    if (species < 0 || species > 1) throw ConfigError("species index must be 0 or 1");
    const auto& cells = traj.m[species];
    std::vector<double> out(traj.n_samples(), 0.0);
    if (cells.empty()) throw ConfigError("trajectory has no per-cell data");
    for (const auto& cell : cells)
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += cell[t];
    for (double& v : out) v /= static_cast<double>(cells.size());
    return out;
}

}  // namespace qscomm
