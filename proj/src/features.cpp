#include "rfsim/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "rfsim/errors.hpp"
#include "rfsim/rng.hpp"

namespace rfsim {

std::vector<double> group_average(const std::vector<double>& values, std::size_t group_size) {
    if (group_size == 0) throw ConfigError("group_average: group size must be >= 1");
    if (group_size == 1) return values;
    std::vector<double> out;
    out.reserve((values.size() + group_size - 1) / group_size);
    for (std::size_t i = 0; i < values.size(); i += group_size) {
        const std::size_t end = std::min(values.size(), i + group_size);
        double sum = 0.0;
        for (std::size_t j = i; j < end; ++j) sum += values[j];
        out.push_back(sum / static_cast<double>(end - i));
    }
    return out;
}

std::vector<double> gaussian_kernel(int sigma) {
    if (sigma < 1) throw ConfigError("gaussian_kernel: sigma must be >= 1");
    const int half = 3 * sigma;
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int mu = -half; mu <= half; ++mu) {
        const double v = std::exp(-0.5 * static_cast<double>(mu) * mu / (sigma * sigma));
        taps[static_cast<std::size_t>(mu + half)] = v;
        sum += v;
    }
    for (double& v : taps) v /= sum;
    return taps;
}

std::vector<double> smooth(const std::vector<double>& values, int sigma) {
    if (values.empty()) return {};
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int half = 3 * sigma;
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    std::vector<double> out(values.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int mu = -half; mu <= half; ++mu) {
            std::ptrdiff_t j = i - mu;
            if (j < 0) j = 0;          // edge replication
            if (j >= n) j = n - 1;
            acc += values[static_cast<std::size_t>(j)] * kernel[static_cast<std::size_t>(mu + half)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> normalize_rss(const std::vector<double>& values, Normalization mode,
                                  bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (values.empty()) return {};
    const auto n = static_cast<double>(values.size());
    std::vector<double> out(values.size());
    if (mode == Normalization::zscore) {
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= n;
        if (var <= 0.0) {
            if (degenerate) *degenerate = true;
            return std::vector<double>(values.size(), 0.0);
        }
        const double inv = 1.0 / std::sqrt(var);
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) * inv;
    } else {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double range = *hi - *lo;
        if (range <= 0.0) {
            if (degenerate) *degenerate = true;
            return std::vector<double>(values.size(), 0.0);
        }
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
    }
    return out;
}

namespace {

std::vector<double> zscored(const std::vector<double>& v) {
    return normalize_rss(v, Normalization::zscore, nullptr);
}

double dist2(const std::array<double, 3>& c, double x, double y, double p) {
    const double dx = c[0] - x, dy = c[1] - y, dp = c[2] - p;
    return dx * dx + dy * dy + dp * dp;
}

}  // namespace

ClusterResult cluster_3d(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& rss, const ClusterConfig& cfg) {
    const std::size_t n = x.size();
    if (y.size() != n || rss.size() != n)
        throw ConfigError("cluster_3d: input vectors must have equal length");
    if (cfg.n_clusters == 0) throw ConfigError("cluster_3d: need at least one cluster");
    if (n < cfg.n_clusters) throw ConfigError("cluster_3d: fewer samples than clusters");
    const std::size_t k = cfg.n_clusters;

    // Each dimension is standardized so meters and dBm are commensurable.
    const std::vector<double> zx = zscored(x);
    const std::vector<double> zy = zscored(y);
    const std::vector<double> zp = zscored(rss);

    ClusterResult res;
    res.centroids.resize(k);
    res.assignment.assign(n, 0);

    // Seeded initialization on distinct sample indices.
    Rng rng(cfg.seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    while (chosen.size() < k) {
        const std::size_t idx = rng.uniform_index(n);
        if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
    for (std::size_t c = 0; c < k; ++c) res.centroids[c] = {zx[chosen[c]], zy[chosen[c]], zp[chosen[c]]};

    std::vector<std::size_t> counts(k);
    std::vector<std::array<double, 3>> sums(k);
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        bool changed = (iter == 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = dist2(res.centroids[c], zx[i], zy[i], zp[i]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        res.iterations = iter + 1;
        if (!changed) break;

        std::fill(counts.begin(), counts.end(), 0);
        std::fill(sums.begin(), sums.end(), std::array<double, 3>{0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = res.assignment[i];
            sums[c][0] += zx[i];
            sums[c][1] += zy[i];
            sums[c][2] += zp[i];
            ++counts[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                const double inv = 1.0 / static_cast<double>(counts[c]);
                res.centroids[c] = {sums[c][0] * inv, sums[c][1] * inv, sums[c][2] * inv};
            } else {
                // Reseed an empty cluster to the sample farthest from its
                // current centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        dist2(res.centroids[res.assignment[i]], zx[i], zy[i], zp[i]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centroids[c] = {zx[far], zy[far], zp[far]};
            }
        }
    }

    res.members.assign(k, {});
    for (std::size_t i = 0; i < n; ++i) res.members[res.assignment[i]].push_back(i);
    return res;
}

FeatureVector build_feature_vector(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& rss, const ClusterResult& clusters,
                                   std::size_t top_n) {
    if (top_n == 0) throw ConfigError("build_feature_vector: top_n must be >= 1");
    const std::size_t k = clusters.members.size();

    struct Block {
        double p_mean, x_mean, y_mean;
    };
    std::vector<Block> blocks;
    blocks.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> idx = clusters.members[c];
        const std::size_t take = std::min(top_n, idx.size());
        // Highest smoothed RSS first; ties resolved by sample index so the
        // selection is stable.
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (rss[a] != rss[b]) return rss[a] > rss[b];
                              return a < b;
                          });
        Block blk{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < take; ++j) {
            blk.p_mean += rss[idx[j]];
            blk.x_mean += x[idx[j]];
            blk.y_mean += y[idx[j]];
        }
        const double inv = take > 0 ? 1.0 / static_cast<double>(take) : 0.0;
        blk.p_mean *= inv;
        blk.x_mean *= inv;
        blk.y_mean *= inv;
        blocks.push_back(blk);
    }

    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const Block& a, const Block& b) { return a.p_mean > b.p_mean; });

    FeatureVector fv;
    fv.values.reserve(3 * k);
    for (const Block& b : blocks) {
        fv.values.push_back(b.p_mean);
        fv.values.push_back(b.x_mean);
        fv.values.push_back(b.y_mean);
    }
    return fv;
}

FeatureVector extract_features(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& rss, const PreprocessConfig& pre,
                               const ClusterConfig& cluster) {
    const std::vector<double> gx = group_average(x, pre.group_size);
    const std::vector<double> gy = group_average(y, pre.group_size);
    const std::vector<double> gp = group_average(rss, pre.group_size);
    const std::vector<double> sp = smooth(gp, pre.sigma);
    const ClusterResult clusters = cluster_3d(gx, gy, sp, cluster);
    return build_feature_vector(gx, gy, sp, clusters, cluster.top_n);
}

std::vector<double> normalized_input(const std::vector<double>& rss, const PreprocessConfig& pre) {
    return normalize_rss(group_average(rss, pre.group_size), pre.normalization);
}

}  // namespace rfsim
