#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lakeschema/index.hpp"

namespace lakeschema {

inline constexpr int kNoise = -1;
inline constexpr double kSilhouetteUndefined = -1.0;

/// Symmetric table-by-table distances in [0,1]; pairs never returned by an
/// index lookup stay at the maximum distance 1.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::vector<std::string> table_ids);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& table_ids() const { return ids_; }

    double at(std::size_t i, std::size_t j) const { return entries_[i * ids_.size() + j]; }

    /// Writes min(current, d) symmetrically; keeps the diagonal at 0.
    void update_min(std::size_t i, std::size_t j, double d);

private:
    std::vector<std::string> ids_;
    std::vector<double> entries_;
};

struct Clustering {
    std::vector<int> labels; ///< aligned with the matrix's table order; kNoise = -1
    double eps = 0.0;
    int min_points = 0;

    int cluster_count() const;
    std::size_t clustered_count() const;
};

struct ParamGrid {
    std::vector<double> eps;
    std::vector<int> min_points;

    static ParamGrid defaults();
    void canonicalize(); ///< sort + dedupe
    bool empty() const { return eps.empty() || min_points.empty(); }
};

/// Populates the matrix from per-table index lookups (Algorithm-style: init
/// to max, write each neighbour's distance, keep the minimum).
DistanceMatrix build_distance_matrix(const LakeIndex& index, std::size_t k, int threads = 1);

/// Density clustering over the precomputed matrix. Core point: at least
/// min_points points (itself included) within eps. Clusters are connected
/// components of core points plus reachable border points; border points
/// reachable from several clusters go to the cluster of the lowest-index
/// core. Deterministic for a fixed table order.
Clustering dbscan(const DistanceMatrix& d, double eps, int min_points);

/// Mean silhouette over clustered points; noise is excluded. Returns the
/// -1 sentinel when fewer than 2 clusters exist, fewer than 2 points are
/// clustered, or no cluster has 2 members.
double silhouette(const DistanceMatrix& d, const Clustering& clustering);

struct TuneResult {
    Clustering clustering;
    double silhouette = kSilhouetteUndefined;
    bool degenerate = false; ///< every grid cell scored at the sentinel
};

/// Grid search; highest silhouette wins, ties broken by smaller eps then
/// smaller min_points.
TuneResult tune_and_cluster(const DistanceMatrix& d, const ParamGrid& grid);

/// {"params": {...}, "clusters": [[ids]], "noise": [ids]} as a JSON string.
std::string clustering_to_json(const DistanceMatrix& d, const Clustering& clustering,
                               double silhouette_score);

} // namespace lakeschema
