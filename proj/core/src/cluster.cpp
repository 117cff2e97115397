#include "lakeschema/cluster.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include "lakeschema/util.hpp"
#include <nlohmann/json.hpp>

namespace lakeschema {

DistanceMatrix::DistanceMatrix(std::vector<std::string> table_ids) : ids_(std::move(table_ids)) {
    const std::size_t n = ids_.size();
    entries_.assign(n * n, 1.0); // initialise to max
    for (std::size_t i = 0; i < n; ++i) entries_[i * n + i] = 0.0;
}

void DistanceMatrix::update_min(std::size_t i, std::size_t j, double d) {
    if (i == j) return;
    const std::size_t n = ids_.size();
    d = std::clamp(d, 0.0, 1.0);
    if (d < entries_[i * n + j]) {
        entries_[i * n + j] = d;
        entries_[j * n + i] = d;
    }
}

int Clustering::cluster_count() const {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return max_label + 1;
}

std::size_t Clustering::clustered_count() const {
    std::size_t n = 0;
    for (int l : labels) n += l != kNoise;
    return n;
}

ParamGrid ParamGrid::defaults() {
    ParamGrid g;
    for (int i = 1; i <= 19; ++i) g.eps.push_back(i / 20.0);
    g.min_points = {2, 3, 4, 5};
    return g;
}

void ParamGrid::canonicalize() {
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    std::sort(min_points.begin(), min_points.end());
    min_points.erase(std::unique(min_points.begin(), min_points.end()), min_points.end());
}

DistanceMatrix build_distance_matrix(const LakeIndex& index, std::size_t k, int threads) {
    std::vector<std::string> ids;
    ids.reserve(index.table_count());
    for (const auto& t : index.tables()) ids.push_back(t.id);
    DistanceMatrix d(std::move(ids));

    // Queries run in parallel; the merge is single-threaded so symmetric
    // writes never race.
    std::vector<std::vector<TableNeighbour>> neighbours(index.table_count());
    parallel_for(index.table_count(), threads, [&](std::size_t t) {
        neighbours[t] = index.query_table_neighbours(static_cast<std::uint32_t>(t), k);
    });
    for (std::size_t t = 0; t < neighbours.size(); ++t) {
        for (const auto& nbr : neighbours[t]) {
            d.update_min(t, nbr.table, nbr.distance);
        }
    }
    return d;
}

Clustering dbscan(const DistanceMatrix& d, double eps, int min_points) {
    const std::size_t n = d.size();
    Clustering result;
    result.eps = eps;
    result.min_points = min_points;
    result.labels.assign(n, kNoise);

    std::vector<std::vector<std::size_t>> neighbourhood(n);
    std::vector<char> core(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && d.at(i, j) <= eps) neighbourhood[i].push_back(j);
        }
        core[i] = neighbourhood[i].size() + 1 >= static_cast<std::size_t>(min_points);
    }

    // Connected components of core points, labelled in table order.
    int next_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || result.labels[i] != kNoise) continue;
        const int label = next_label++;
        std::deque<std::size_t> queue{i};
        result.labels[i] = label;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (std::size_t nb : neighbourhood[cur]) {
                if (core[nb] && result.labels[nb] == kNoise) {
                    result.labels[nb] = label;
                    queue.push_back(nb);
                }
            }
        }
    }

    // Border points join the cluster of the first in-range core point in
    // table order; everything else stays noise.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (core[j] && d.at(i, j) <= eps) {
                result.labels[i] = result.labels[j];
                break;
            }
        }
    }
    return result;
}

double silhouette(const DistanceMatrix& d, const Clustering& clustering) {
    const std::size_t n = d.size();
    const int clusters = clustering.cluster_count();
    if (clusters < 2) return kSilhouetteUndefined;
    if (clustering.clustered_count() < 2) return kSilhouetteUndefined;

    std::vector<std::vector<std::size_t>> members(clusters);
    for (std::size_t i = 0; i < n; ++i) {
        if (clustering.labels[i] != kNoise) {
            members[clustering.labels[i]].push_back(i);
        }
    }
    bool any_pair = false;
    for (const auto& m : members) any_pair = any_pair || m.size() >= 2;
    if (!any_pair) return kSilhouetteUndefined;

    double total = 0.0;
    std::size_t scored = 0;
    for (int c = 0; c < clusters; ++c) {
        for (std::size_t i : members[c]) {
            ++scored;
            if (members[c].size() < 2) continue; // singleton contributes 0

            double intra = 0.0;
            for (std::size_t j : members[c]) {
                if (j != i) intra += d.at(i, j);
            }
            intra /= static_cast<double>(members[c].size() - 1);

            double nearest = std::numeric_limits<double>::infinity();
            for (int o = 0; o < clusters; ++o) {
                if (o == c || members[o].empty()) continue;
                double sum = 0.0;
                for (std::size_t j : members[o]) sum += d.at(i, j);
                nearest = std::min(nearest, sum / static_cast<double>(members[o].size()));
            }

            const double denom = std::max(intra, nearest);
            if (denom > 0.0) total += (nearest - intra) / denom;
        }
    }
    return total / static_cast<double>(scored);
}

TuneResult tune_and_cluster(const DistanceMatrix& d, const ParamGrid& grid) {
    if (grid.empty()) throw FatalError("parameter grid is empty");
    ParamGrid g = grid;
    g.canonicalize();
    for (double e : g.eps) {
        if (e <= 0.0 || e > 1.0) throw FatalError("eps values must lie in (0,1]");
    }
    for (int mp : g.min_points) {
        if (mp < 1) throw FatalError("min_points values must be >= 1");
    }

    TuneResult best;
    bool found = false;
    for (double eps : g.eps) {
        for (int mp : g.min_points) {
            Clustering c = dbscan(d, eps, mp);
            double score = silhouette(d, c);
            if (score == kSilhouetteUndefined) continue;
            if (!found || score > best.silhouette) {
                best.clustering = std::move(c);
                best.silhouette = score;
                found = true;
            }
        }
    }
    if (!found) {
        // Nothing scored: report the all-noise clustering at the first cell.
        best.clustering.labels.assign(d.size(), kNoise);
        best.clustering.eps = g.eps.front();
        best.clustering.min_points = g.min_points.front();
        best.silhouette = kSilhouetteUndefined;
        best.degenerate = true;
    }
    return best;
}

std::string clustering_to_json(const DistanceMatrix& d, const Clustering& clustering,
                               double silhouette_score) {
    nlohmann::json j;
    j["params"] = {{"eps", clustering.eps},
                   {"min_points", clustering.min_points},
                   {"silhouette", silhouette_score}};
    std::vector<std::vector<std::string>> clusters(clustering.cluster_count());
    std::vector<std::string> noise;
    for (std::size_t i = 0; i < d.size(); ++i) {
        int label = clustering.labels[i];
        if (label == kNoise) {
            noise.push_back(d.table_ids()[i]);
        } else {
            clusters[label].push_back(d.table_ids()[i]);
        }
    }
    j["clusters"] = clusters;
    j["noise"] = noise;
    return j.dump(2);
}

} // namespace lakeschema
