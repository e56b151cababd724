#include "revinv/clustering.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace revinv {

namespace {

constexpr const char* kModule = "clustering";
constexpr std::size_t kMaxKMeansIterations = 300;
// Lambda for zero mutual-reachability distance (coincident points).
constexpr double kMaxLambda = 1e12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const ClusterParams& params) {
    std::visit(overloaded{
                   [](const KMeansParams& p) {
                       if (p.k < 1) throw ArgumentError(kModule, "k must be >= 1");
                   },
                   [](const DbscanParams& p) {
                       if (!(p.eps > 0.0)) throw ArgumentError(kModule, "eps must be > 0");
                       if (p.min_samples < 1) throw ArgumentError(kModule, "min_samples must be >= 1");
                   },
                   [](const HdbscanParams& p) {
                       if (p.min_cluster_size < 2) throw ArgumentError(kModule, "min_cluster_size must be >= 2");
                       if (p.selection_eps && !(*p.selection_eps >= 0.0)) {
                           throw ArgumentError(kModule, "selection eps must be >= 0");
                       }
                   },
               },
               params.algorithm);
}

std::string algorithm_name(const AlgorithmParams& params) {
    return std::visit(overloaded{
                          [](const KMeansParams&) { return std::string("kmeans"); },
                          [](const DbscanParams&) { return std::string("dbscan"); },
                          [](const HdbscanParams&) { return std::string("hdbscan"); },
                      },
                      params);
}

std::string params_text(const AlgorithmParams& params) {
    return std::visit(overloaded{
                          [](const KMeansParams& p) { return fmt::format("k:{}", p.k); },
                          [](const DbscanParams& p) { return fmt::format("eps:{},min_samples:{}", p.eps, p.min_samples); },
                          [](const HdbscanParams& p) {
                              std::string s = fmt::format("min_cluster_size:{}", p.min_cluster_size);
                              if (p.selection_eps) s += fmt::format(",eps:{}", *p.selection_eps);
                              if (p.selection == HdbscanSelection::Leaf) s += ",selection:leaf";
                              return s;
                          },
                      },
                      params);
}

std::size_t canonicalize_labels(std::vector<int>& labels) {
    std::vector<int> remap;
    int next = 0;
    for (int& l : labels) {
        if (l < 0) {
            l = kNoise;
            continue;
        }
        const auto idx = static_cast<std::size_t>(l);
        if (idx >= remap.size()) remap.resize(idx + 1, -1);
        if (remap[idx] < 0) remap[idx] = next++;
        l = remap[idx];
    }
    return static_cast<std::size_t>(next);
}

// ---------------------------------------------------------------- k-means

KMeansRun kmeans_run(const EmbeddingMatrix& matrix, std::size_t k, std::uint64_t seed) {
    const std::size_t n = matrix.rows();
    const std::size_t d = matrix.cols();
    if (k == 0) throw ArgumentError(kModule, "k must be >= 1");
    if (k > n) throw ArgumentError(kModule, fmt::format("k = {} exceeds the number of points {}", k, n));

    Rng rng(seed);
    std::vector<double> centroids(k * d);
    auto centroid = [&](std::size_t c) { return std::span<double>(centroids.data() + c * d, d); };
    auto set_centroid = [&](std::size_t c, std::size_t point) {
        const auto r = matrix.row(point);
        std::copy(r.begin(), r.end(), centroid(c).begin());
    };

    // k-means++ seeding with D^2 weighting on cosine distance.
    std::vector<bool> chosen(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += nearest[i] * nearest[i];
            if (total <= 0.0) {
                // Every remaining point coincides with a chosen centre.
                std::vector<std::size_t> free;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!chosen[i]) free.push_back(i);
                }
                pick = free[static_cast<std::size_t>(rng.below(free.size()))];
            } else {
                const double target = rng.unit() * total;
                double acc = 0.0;
                pick = n;
                std::size_t last_positive = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = nearest[i] * nearest[i];
                    if (w <= 0.0) continue;
                    last_positive = i;
                    acc += w;
                    if (acc > target) {
                        pick = i;
                        break;
                    }
                }
                if (pick == n) pick = last_positive;
            }
        }
        chosen[pick] = true;
        set_centroid(c, pick);
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], unit_cosine_distance(matrix.row(i), centroid(c)));
        }
    }

    std::vector<int> labels(n, 0);
    auto assign = [&]() {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_dot = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double s = dot(matrix.row(i), centroid(c));
                if (s > best_dot) {
                    best_dot = s;
                    best = c;
                }
            }
            if (labels[i] != static_cast<int>(best)) changed = true;
            labels[i] = static_cast<int>(best);
        }
        return changed;
    };
    assign();

    KMeansRun run;
    std::vector<double> sums(k * d);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < kMaxKMeansIterations; ++iter) {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            ++counts[c];
            const auto r = matrix.row(i);
            for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += r[j];
        }

        // Farthest point from its current centroid, used to re-seed a
        // centroid whose members cancel out.
        std::size_t farthest = 0;
        double farthest_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = unit_cosine_distance(matrix.row(i), centroid(static_cast<std::size_t>(labels[i])));
            if (dist > farthest_d) {
                farthest_d = dist;
                farthest = i;
            }
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty: keep the old centroid
            std::span<double> s(sums.data() + c * d, d);
            const double norm = std::sqrt(dot(s, s));
            if (norm <= 1e-12) {
                set_centroid(c, farthest);
            } else {
                auto out = centroid(c);
                for (std::size_t j = 0; j < d; ++j) out[j] = s[j] / norm;
            }
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += unit_cosine_distance(matrix.row(i), centroid(static_cast<std::size_t>(labels[i])));
        }
        run.inertia_trace.push_back(inertia);
        run.iterations = iter + 1;
        if (!assign()) break;
    }

    run.assignment.labels = std::move(labels);
    run.assignment.n_clusters = canonicalize_labels(run.assignment.labels);
    run.assignment.params = ClusterParams{KMeansParams{k}, seed};
    return run;
}

ClusterAssignment kmeans(const EmbeddingMatrix& matrix, std::size_t k, std::uint64_t seed) {
    return kmeans_run(matrix, k, seed).assignment;
}

// ----------------------------------------------------------------- DBSCAN

ClusterAssignment dbscan(const DistanceMatrix& distances, double eps, std::size_t min_samples) {
    if (!(eps > 0.0)) throw ArgumentError(kModule, "eps must be > 0");
    if (min_samples < 1) throw ArgumentError(kModule, "min_samples must be >= 1");
    const std::size_t n = distances.size();

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = distances.row(i);
        const auto within = static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [eps](double v) { return v <= eps; }));
        core[i] = within >= min_samples;
    }

    std::vector<int> labels(n, kNoise);
    int cluster = 0;
    std::deque<std::size_t> queue;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (labels[seed] != kNoise || !core[seed]) continue;
        labels[seed] = cluster;
        queue.assign(1, seed);
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            const auto row = distances.row(p);
            for (std::size_t q = 0; q < n; ++q) {
                if (row[q] > eps || labels[q] != kNoise) continue;
                labels[q] = cluster;
                if (core[q]) queue.push_back(q);
            }
        }
        ++cluster;
    }

    ClusterAssignment out;
    out.labels = std::move(labels);
    out.n_clusters = canonicalize_labels(out.labels);
    out.params = ClusterParams{DbscanParams{eps, min_samples}, 0};
    return out;
}

ClusterAssignment dbscan(const EmbeddingMatrix& matrix, double eps, std::size_t min_samples) {
    return dbscan(DistanceMatrix(matrix), eps, min_samples);
}

// ---------------------------------------------------------------- HDBSCAN

namespace {

struct LinkageNode {
    std::size_t left;
    std::size_t right;
    double distance;
    std::size_t size;
};

// Single-linkage hierarchy over the mutual-reachability MST. Node ids
// 0..n-1 are points, n..2n-2 merges in ascending distance order.
std::vector<LinkageNode> single_linkage(const DistanceMatrix& dist, std::size_t min_points) {
    const std::size_t n = dist.size();

    std::vector<double> core(n);
    std::vector<double> scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = dist.row(i);
        std::copy(row.begin(), row.end(), scratch.begin());
        const auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(min_points - 1);
        std::nth_element(scratch.begin(), kth, scratch.end());
        core[i] = *kth;
    }
    auto reach = [&](std::size_t a, std::size_t b) { return std::max({core[a], core[b], dist(a, b)}); };

    // Prim's algorithm on the dense graph.
    struct Edge {
        std::size_t a, b;
        double w;
    };
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) best[j] = reach(0, j);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
        }
        in_tree[next] = true;
        edges.push_back({from[next], next, best[next]});
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double r = reach(next, j);
            if (r < best[j]) {
                best[j] = r;
                from[j] = next;
            }
        }
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });

    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<LinkageNode> nodes;
    nodes.reserve(n - 1);
    std::vector<std::size_t> sizes(2 * n - 1, 1);
    for (const auto& e : edges) {
        const std::size_t ra = find(e.a);
        const std::size_t rb = find(e.b);
        const std::size_t id = n + nodes.size();
        sizes[id] = sizes[ra] + sizes[rb];
        nodes.push_back({ra, rb, e.w, sizes[id]});
        parent[ra] = id;
        parent[rb] = id;
    }
    return nodes;
}

}  // namespace

HdbscanRun hdbscan_run(const DistanceMatrix& distances, const HdbscanParams& params) {
    validate(ClusterParams{params, 0});
    const std::size_t n = distances.size();
    const std::size_t mcs = params.min_cluster_size;

    HdbscanRun run;
    run.assignment.params = ClusterParams{params, 0};
    run.assignment.labels.assign(n, kNoise);
    if (n < mcs || n < 2) return run;

    const auto nodes = single_linkage(distances, mcs);
    auto node_size = [&](std::size_t id) { return id < n ? std::size_t{1} : nodes[id - n].size; };
    auto collect_points = [&](std::size_t id, std::vector<std::size_t>& out) {
        std::vector<std::size_t> stack{id};
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            if (x < n) {
                out.push_back(x);
            } else {
                stack.push_back(nodes[x - n].right);
                stack.push_back(nodes[x - n].left);
            }
        }
    };

    // Condense the hierarchy: splits with both sides >= mcs create clusters,
    // smaller sides shed their points at the split's lambda.
    const std::size_t root = 2 * n - 2;
    std::vector<std::size_t> relabel(2 * n - 1, 0);
    relabel[root] = n;
    std::size_t next_label = n + 1;
    std::deque<std::size_t> queue{root};
    auto& tree = run.condensed_tree;
    std::vector<std::size_t> shed;
    while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        if (node < n) continue;
        const auto& link = nodes[node - n];
        const double lambda = link.distance > 0.0 ? std::min(1.0 / link.distance, kMaxLambda) : kMaxLambda;
        const std::size_t parent_label = relabel[node];
        const std::size_t lsize = node_size(link.left);
        const std::size_t rsize = node_size(link.right);

        auto fall_out = [&](std::size_t child) {
            shed.clear();
            collect_points(child, shed);
            for (std::size_t p : shed) tree.push_back({parent_label, p, lambda, 1});
        };

        if (lsize >= mcs && rsize >= mcs) {
            for (std::size_t child : {link.left, link.right}) {
                relabel[child] = next_label++;
                tree.push_back({parent_label, relabel[child], lambda, node_size(child)});
                queue.push_back(child);
            }
        } else if (lsize < mcs && rsize < mcs) {
            fall_out(link.left);
            fall_out(link.right);
        } else if (lsize < mcs) {
            fall_out(link.left);
            relabel[link.right] = parent_label;
            queue.push_back(link.right);
        } else {
            fall_out(link.right);
            relabel[link.left] = parent_label;
            queue.push_back(link.left);
        }
    }

    const std::size_t n_labels = next_label - n;
    std::vector<double> birth(n_labels, 0.0);
    std::vector<std::size_t> cluster_parent(n_labels, 0);
    std::vector<std::vector<std::size_t>> children(n_labels);
    std::vector<std::size_t> point_parent(n, n);
    for (const auto& e : tree) {
        if (e.child >= n) {
            birth[e.child - n] = e.lambda;
            cluster_parent[e.child - n] = e.parent;
            children[e.parent - n].push_back(e.child);
        } else {
            point_parent[e.child] = e.parent;
        }
    }
    run.stability.assign(n_labels, 0.0);
    for (const auto& e : tree) {
        run.stability[e.parent - n] += (e.lambda - birth[e.parent - n]) * static_cast<double>(e.size);
    }

    // Selection; labels increase with depth, so descending order visits
    // children before parents. The root is never selected.
    std::vector<bool> is_cluster(n_labels, true);
    is_cluster[0] = false;
    auto clear_descendants = [&](std::size_t label) {
        std::vector<std::size_t> stack(children[label - n]);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            is_cluster[c - n] = false;
            stack.insert(stack.end(), children[c - n].begin(), children[c - n].end());
        }
    };
    if (params.selection == HdbscanSelection::ExcessOfMass) {
        std::vector<double> stab = run.stability;
        for (std::size_t label = next_label - 1; label > n; --label) {
            double subtree = 0.0;
            for (std::size_t c : children[label - n]) subtree += stab[c - n];
            if (subtree > stab[label - n]) {
                is_cluster[label - n] = false;
                stab[label - n] = subtree;
            } else {
                clear_descendants(label);
            }
        }
    } else {
        for (std::size_t label = n + 1; label < next_label; ++label) {
            is_cluster[label - n] = children[label - n].empty();
        }
    }

    if (params.selection_eps && *params.selection_eps > 0.0) {
        const double eps = *params.selection_eps;
        std::vector<bool> processed(n_labels, false);
        std::vector<bool> chosen(n_labels, false);
        for (std::size_t label = n + 1; label < next_label; ++label) {
            if (!is_cluster[label - n] || processed[label - n]) continue;
            std::size_t pick = label;
            if (1.0 / birth[label - n] < eps) {
                // Climb while the parent is still born below eps.
                while (true) {
                    const std::size_t up = cluster_parent[pick - n];
                    if (up == n) break;
                    pick = up;
                    if (1.0 / birth[pick - n] > eps) break;
                }
            }
            chosen[pick - n] = true;
            std::vector<std::size_t> stack(children[pick - n]);
            while (!stack.empty()) {
                const std::size_t c = stack.back();
                stack.pop_back();
                processed[c - n] = true;
                chosen[c - n] = false;
                stack.insert(stack.end(), children[c - n].begin(), children[c - n].end());
            }
        }
        is_cluster = std::move(chosen);
    }

    for (std::size_t label = n + 1; label < next_label; ++label) {
        if (is_cluster[label - n]) run.selected.push_back(label);
    }

    std::vector<int> label_of(n_labels, kNoise);
    for (std::size_t i = 0; i < run.selected.size(); ++i) label_of[run.selected[i] - n] = static_cast<int>(i);
    auto& labels = run.assignment.labels;
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t c = point_parent[p];
        while (c != n && label_of[c - n] == kNoise) c = cluster_parent[c - n];
        labels[p] = c == n ? kNoise : label_of[c - n];
    }

    // Stability per output label, following the renumbering below.
    std::vector<int> before = labels;
    run.assignment.n_clusters = canonicalize_labels(labels);
    run.selected_stability.assign(run.assignment.n_clusters, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        if (labels[p] == kNoise) continue;
        const std::size_t sel = run.selected[static_cast<std::size_t>(before[p])];
        run.selected_stability[static_cast<std::size_t>(labels[p])] = run.stability[sel - n];
    }
    return run;
}

ClusterAssignment hdbscan(const DistanceMatrix& distances, std::size_t min_cluster_size,
                          std::optional<double> selection_eps) {
    return hdbscan_run(distances, HdbscanParams{min_cluster_size, selection_eps, HdbscanSelection::ExcessOfMass})
        .assignment;
}

ClusterAssignment hdbscan(const EmbeddingMatrix& matrix, std::size_t min_cluster_size,
                          std::optional<double> selection_eps) {
    return hdbscan(DistanceMatrix(matrix), min_cluster_size, selection_eps);
}

ClusterAssignment run_clustering(const EmbeddingMatrix& matrix, const DistanceMatrix& distances,
                                 const ClusterParams& params) {
    validate(params);
    ClusterAssignment out = std::visit(
        overloaded{
            [&](const KMeansParams& p) { return kmeans(matrix, p.k, params.seed); },
            [&](const DbscanParams& p) { return dbscan(distances, p.eps, p.min_samples); },
            [&](const HdbscanParams& p) { return hdbscan_run(distances, p).assignment; },
        },
        params.algorithm);
    out.params = params;
    return out;
}

}  // namespace revinv
