#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rfsim {

enum class Normalization { zscore, minmax };

struct PreprocessConfig {
    std::size_t group_size = 2;  // N_g
    int sigma = 20;              // Gaussian kernel width, taps
    Normalization normalization = Normalization::zscore;

    std::size_t kernel_size() const { return static_cast<std::size_t>(6 * sigma + 1); }
};

struct ClusterConfig {
    std::size_t n_clusters = 20;  // C_k
    std::size_t top_n = 40;       // n_t
    std::size_t max_iters = 300;
    std::uint64_t seed = 0;
};

// Eq.-style 3D clustering input: per-cluster blocks [p_mean, x_mean, y_mean]
// ordered by descending mean RSS; length 3 * C_k.
struct FeatureVector {
    std::vector<double> values;
};

struct ClusterResult {
    std::vector<std::size_t> assignment;             // per-sample cluster id
    std::vector<std::vector<std::size_t>> members;   // per-cluster sample indices
    std::vector<std::array<double, 3>> centroids;    // in standardized space
    std::size_t iterations = 0;
};

// Non-overlapping group means; a trailing partial group is averaged over its
// actual length.
std::vector<double> group_average(const std::vector<double>& values, std::size_t group_size);

// Normalized Gaussian taps at offsets [-3*sigma, 3*sigma] (k_s = 6*sigma + 1).
std::vector<double> gaussian_kernel(int sigma);

// Same-length Gaussian smoothing with edge replication at the boundaries.
std::vector<double> smooth(const std::vector<double>& values, int sigma);

// Z-score (population std) or min-max scaling. Degenerate inputs (zero
// variance or range) yield all zeros and set *degenerate when provided.
std::vector<double> normalize_rss(const std::vector<double>& values, Normalization mode,
                                  bool* degenerate = nullptr);

// Seeded k-means in z-scored (x, y, rss) space. Deterministic for a fixed
// seed; empty clusters are reseeded to the sample farthest from its centroid.
ClusterResult cluster_3d(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& rss, const ClusterConfig& cfg);

// Per cluster: mean of the top_n highest-RSS samples and the mean of their
// raw coordinates, blocks concatenated in descending mean-RSS order.
FeatureVector build_feature_vector(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& rss, const ClusterResult& clusters,
                                   std::size_t top_n);

// Full pipeline: group positions and RSS, smooth the RSS, cluster, build the
// feature vector.
FeatureVector extract_features(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& rss, const PreprocessConfig& pre,
                               const ClusterConfig& cluster);

// Normalized-RSS baseline input: group then normalize (no smoothing).
std::vector<double> normalized_input(const std::vector<double>& rss, const PreprocessConfig& pre);

}  // namespace rfsim
