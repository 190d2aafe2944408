#ifndef REPAYFACTOR_RANDOM_FOREST_HPP
#define REPAYFACTOR_RANDOM_FOREST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "repayfactor/csv.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::random_forest {

struct ForestConfig {
    int n_trees = 20;
    int mtry = 0;       // 0 -> ceil(p/3)
    int min_leaf = 5;
    int max_depth = 0;  // 0 -> no cap
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct TreeNode {
    // Leaf iff feature < 0.
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double impurity_decrease = 0;  // weighted by node sample fraction
    int n_samples = 0;
    double value = 0;  // leaf mean
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        int idx = 0;
        while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(idx)];
            idx = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(idx)].value;
    }
};

struct Forest {
    ForestConfig config;
    Eigen::Index n_features = 0;
    std::vector<Tree> trees;
};

struct ImportanceEntry {
    int feature = 0;
    double mean_importance = 0;
    double std_importance = 0;
    int rank = 0;
};

struct ImportanceReport {
    std::vector<ImportanceEntry> entries;  // sorted by rank
    bool degenerate = false;               // no split anywhere in the forest
};

namespace detail {

/// Deterministic bounded draw; avoids distribution implementation variance.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    // Rejection sampling over the top of the range.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

struct SplitResult {
    int feature = -1;
    double threshold = 0;
    double gain = 0;  // unweighted variance reduction at this node
};

/// Greedy best split over `mtry` sampled features. Thresholds are midpoints
/// between consecutive distinct sorted values; ties broken by (lower feature
/// index, lower threshold).
inline SplitResult best_split(const MatrixXd& X, const VectorXd& y, const std::vector<int>& idx,
                              const std::vector<int>& features, int min_leaf) {
    const auto n = static_cast<int>(idx.size());
    double sum = 0, sumsq = 0;
    for (int i : idx) {
        sum += y[i];
        sumsq += y[i] * y[i];
    }
    const double node_sse = sumsq - sum * sum / n;

    SplitResult best;
    std::vector<std::pair<double, double>> vals;  // (x, y)
    for (int f : features) {
        vals.clear();
        vals.reserve(idx.size());
        for (int i : idx) vals.emplace_back(X(i, f), y[i]);
        std::sort(vals.begin(), vals.end());

        double left_sum = 0, left_sq = 0;
        for (int i = 0; i + 1 < n; ++i) {
            left_sum += vals[static_cast<std::size_t>(i)].second;
            left_sq += vals[static_cast<std::size_t>(i)].second * vals[static_cast<std::size_t>(i)].second;
            const int nl = i + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            if (vals[static_cast<std::size_t>(i)].first == vals[static_cast<std::size_t>(i + 1)].first) continue;
            const double right_sum = sum - left_sum;
            const double right_sq = sumsq - left_sq;
            const double sse = (left_sq - left_sum * left_sum / nl) +
                               (right_sq - right_sum * right_sum / nr);
            const double gain = (node_sse - sse) / n;  // variance reduction
            const double thr = 0.5 * (vals[static_cast<std::size_t>(i)].first + vals[static_cast<std::size_t>(i + 1)].first);
            if (gain > best.gain ||
                (gain == best.gain && best.feature >= 0 &&
                 (f < best.feature || (f == best.feature && thr < best.threshold)))) {
                if (gain > 0) best = SplitResult{f, thr, gain};
            }
        }
    }
    return best;
}

inline int grow(Tree& tree, const MatrixXd& X, const VectorXd& y, std::vector<int>& idx, int depth,
                const ForestConfig& cfg, int mtry, std::mt19937_64& rng, int total_n) {
    const auto n = static_cast<int>(idx.size());
    double sum = 0;
    for (int i : idx) sum += y[i];
    const double mean = sum / n;

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[static_cast<std::size_t>(node_id)].n_samples = n;
    tree.nodes[static_cast<std::size_t>(node_id)].value = mean;

    bool stop = n < 2 * cfg.min_leaf;
    if (cfg.max_depth > 0 && depth >= cfg.max_depth) stop = true;
    if (!stop) {
        double sse = 0;
        for (int i : idx) sse += (y[i] - mean) * (y[i] - mean);
        if (sse <= 0) stop = true;
    }

    if (!stop) {
        // Sample mtry feature indices without replacement (partial shuffle).
        const auto p = static_cast<int>(X.cols());
        std::vector<int> pool(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) pool[static_cast<std::size_t>(j)] = j;
        std::vector<int> chosen;
        for (int k = 0; k < mtry; ++k) {
            const auto r = static_cast<int>(k + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(p - k))));
            std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(r)]);
            chosen.push_back(pool[static_cast<std::size_t>(k)]);
        }
        std::sort(chosen.begin(), chosen.end());

        SplitResult split = best_split(X, y, idx, chosen, cfg.min_leaf);
        if (split.feature >= 0) {
            std::vector<int> left_idx, right_idx;
            for (int i : idx)
                (X(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
            idx.clear();
            idx.shrink_to_fit();
            const int left = grow(tree, X, y, left_idx, depth + 1, cfg, mtry, rng, total_n);
            const int right = grow(tree, X, y, right_idx, depth + 1, cfg, mtry, rng, total_n);
            auto& nd = tree.nodes[static_cast<std::size_t>(node_id)];
            nd.feature = split.feature;
            nd.threshold = split.threshold;
            nd.left = left;
            nd.right = right;
            nd.impurity_decrease = split.gain * static_cast<double>(n) / static_cast<double>(total_n);
        }
    }
    return node_id;
}

inline Tree build_tree(const MatrixXd& X, const VectorXd& y, const ForestConfig& cfg, int mtry,
                       std::uint64_t tree_seed) {
    std::mt19937_64 rng(tree_seed);
    const auto n = static_cast<int>(X.rows());
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(n));
    if (cfg.bootstrap) {
        for (int i = 0; i < n; ++i)
            idx.push_back(static_cast<int>(bounded(rng, static_cast<std::uint64_t>(n))));
    } else {
        for (int i = 0; i < n; ++i) idx.push_back(i);
    }
    Tree tree;
    grow(tree, X, y, idx, 0, cfg, mtry, rng, n);
    return tree;
}

}  // namespace detail

/// Bootstrap ensemble of variance-reduction regression trees. Per-tree RNG
/// streams derive from (seed, tree index), so results are independent of
/// thread count.
inline Forest fit_forest(const MatrixXd& X, const VectorXd& y, const ForestConfig& config,
                         int n_threads = 1) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw DomainError("design/response length mismatch");
    if (n < 2 * static_cast<Eigen::Index>(config.min_leaf))
        throw DomainError("need at least 2*min_leaf rows to fit a forest");
    ForestConfig cfg = config;
    if (cfg.mtry <= 0) cfg.mtry = static_cast<int>(std::ceil(static_cast<double>(p) / 3.0));
    cfg.mtry = std::min<int>(cfg.mtry, static_cast<int>(p));

    Forest forest;
    forest.config = cfg;
    forest.n_features = p;
    forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));

    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.n_trees));
    std::mt19937_64 seeder(cfg.seed);
    for (auto& s : seeds) s = seeder();

    auto work = [&](int begin, int end) {
        for (int t = begin; t < end; ++t)
            forest.trees[static_cast<std::size_t>(t)] =
                detail::build_tree(X, y, cfg, cfg.mtry, seeds[static_cast<std::size_t>(t)]);
    };
    if (n_threads <= 1 || cfg.n_trees <= 1) {
        work(0, cfg.n_trees);
    } else {
        const int nt = std::min(n_threads, cfg.n_trees);
        std::vector<std::thread> threads;
        for (int w = 0; w < nt; ++w) {
            const int begin = cfg.n_trees * w / nt;
            const int end = cfg.n_trees * (w + 1) / nt;
            threads.emplace_back(work, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    return forest;
}

/// Per row, the arithmetic mean of all tree predictions.
inline VectorXd predict(const Forest& forest, const MatrixXd& X) {
    if (X.cols() != forest.n_features)
        throw DomainError("prediction matrix has " + std::to_string(X.cols()) +
                          " columns, forest expects " + std::to_string(forest.n_features));
    VectorXd out = VectorXd::Zero(X.rows());
    for (const auto& tree : forest.trees)
        for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] += tree.predict_row(X.row(i));
    return out / static_cast<double>(forest.trees.size());
}

/// Mean-decrease-in-impurity importance, normalized to sum 1 per tree, with
/// inter-tree standard deviation.
inline ImportanceReport importance(const Forest& forest) {
    const auto p = static_cast<std::size_t>(forest.n_features);
    std::vector<double> mean(p, 0.0), m2(p, 0.0);
    int contributing = 0;
    for (const auto& tree : forest.trees) {
        std::vector<double> per_tree(p, 0.0);
        double total = 0;
        for (const auto& nd : tree.nodes) {
            if (nd.feature >= 0) {
                per_tree[static_cast<std::size_t>(nd.feature)] += nd.impurity_decrease;
                total += nd.impurity_decrease;
            }
        }
        if (total > 0)
            for (auto& v : per_tree) v /= total;
        ++contributing;
        // Welford accumulation across trees.
        for (std::size_t j = 0; j < p; ++j) {
            const double d = per_tree[j] - mean[j];
            mean[j] += d / contributing;
            m2[j] += d * (per_tree[j] - mean[j]);
        }
    }

    ImportanceReport report;
    double total_mean = 0;
    for (double v : mean) total_mean += v;
    report.degenerate = total_mean <= 0;

    std::vector<std::size_t> order(p);
    for (std::size_t j = 0; j < p; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
    for (std::size_t r = 0; r < p; ++r) {
        const std::size_t j = order[r];
        ImportanceEntry e;
        e.feature = static_cast<int>(j);
        e.mean_importance = mean[j];
        e.std_importance = forest.trees.size() > 1
                               ? std::sqrt(m2[j] / static_cast<double>(forest.trees.size()))
                               : 0.0;
        e.rank = static_cast<int>(r) + 1;
        report.entries.push_back(e);
    }
    return report;
}

/// Canonical byte-level serialization; used to check bit-identical rebuilds.
inline std::string serialize(const Forest& forest) {
    std::ostringstream out;
    out << forest.n_features << ';' << forest.trees.size() << '\n';
    for (const auto& tree : forest.trees) {
        for (const auto& nd : tree.nodes) {
            out << nd.feature << ',' << csv::format_double(nd.threshold) << ',' << nd.left << ','
                << nd.right << ',' << csv::format_double(nd.impurity_decrease) << ','
                << nd.n_samples << ',' << csv::format_double(nd.value) << '\n';
        }
        out << "---\n";
    }
    return out.str();
}

}  // namespace repayfactor::random_forest

#endif  // REPAYFACTOR_RANDOM_FOREST_HPP
