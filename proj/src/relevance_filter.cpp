#include "reqterm/relevance_filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"
#include "reqterm/seeds.hpp"

namespace reqterm::filter {

namespace {

using nlohmann::json;

constexpr int kDim = 22;  // 5+5 one-hot POS, f3, f4..f8, f9, f9_defined, f10..f13
constexpr const char* kModelFormat = "reqterm-filter v1";

double hp_get(const Hyperparams& hp, const std::string& key, double dflt) {
    auto it = hp.find(key);
    return it == hp.end() ? dflt : it->second;
}

double sample_cost(int label, const CostMatrix& cost) {
    return label == 1 ? cost.cost_fn : cost.cost_fp;
}

struct Encoded {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    std::vector<double> c;  // per-sample misclassification cost
};

Encoded encode_dataset(const LabeledDataset& ds, const CostMatrix& cost) {
    Encoded e;
    e.x.reserve(ds.size());
    e.y.reserve(ds.size());
    e.c.reserve(ds.size());
    for (const auto& row : ds.matrix.rows) {
        e.x.push_back(encode_features(row.features));
        e.y.push_back(*row.label);
        e.c.push_back(sample_cost(*row.label, cost));
    }
    return e;
}

// --- feature standardization (linear models and the neural net) ---

struct Standardizer {
    std::vector<double> mean, sd;

    void fit(const std::vector<std::vector<double>>& x) {
        mean.assign(kDim, 0.0);
        sd.assign(kDim, 1.0);
        if (x.empty()) return;
        for (const auto& row : x)
            for (int j = 0; j < kDim; ++j) mean[j] += row[j];
        for (int j = 0; j < kDim; ++j) mean[j] /= static_cast<double>(x.size());
        std::vector<double> var(kDim, 0.0);
        for (const auto& row : x)
            for (int j = 0; j < kDim; ++j) {
                double d = row[j] - mean[j];
                var[j] += d * d;
            }
        for (int j = 0; j < kDim; ++j) {
            double s = std::sqrt(var[j] / static_cast<double>(x.size()));
            sd[j] = s < 1e-12 ? 1.0 : s;
        }
    }

    double col(const std::vector<double>& x, int j) const {
        return (x[j] - mean[j]) / sd[j];
    }
};

// --- logistic regression / linear SVM ---

class LinearClassifier final : public Classifier {
  public:
    enum class Form { Logistic, Svm };

    Form form = Form::Logistic;
    Standardizer std_;
    std::vector<double> w;
    double b = 0.0;

    double score(const std::vector<double>& x) const {
        double z = b;
        for (int j = 0; j < kDim; ++j) z += w[j] * std_.col(x, j);
        return z;
    }

    int predict(const std::vector<double>& x) const override {
        return score(x) >= 0.0 ? 1 : 0;
    }
};

double sigmoid(double z) {
    if (z > 35.0) return 1.0;
    if (z < -35.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-z));
}

std::shared_ptr<LinearClassifier> train_linear(const Encoded& e,
                                               LinearClassifier::Form form,
                                               const Hyperparams& hp) {
    auto m = std::make_shared<LinearClassifier>();
    m->form = form;
    m->std_.fit(e.x);
    m->w.assign(kDim, 0.0);

    const std::size_t n = e.x.size();
    if (n == 0) return m;
    std::vector<std::vector<double>> xs(n, std::vector<double>(kDim));
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < kDim; ++j) xs[i][j] = m->std_.col(e.x[i], j);
    const double total_cost = std::accumulate(e.c.begin(), e.c.end(), 0.0);

    const int epochs = static_cast<int>(hp_get(hp, "epochs", 400));
    if (form == LinearClassifier::Form::Logistic) {
        const double lr = hp_get(hp, "lr", 0.5);
        const double l2 = hp_get(hp, "l2", 1e-3);
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::vector<double> gw(kDim, 0.0);
            double gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double z = m->b;
                for (int j = 0; j < kDim; ++j) z += m->w[j] * xs[i][j];
                double g = e.c[i] * (sigmoid(z) - e.y[i]) / total_cost;
                gb += g;
                for (int j = 0; j < kDim; ++j) gw[j] += g * xs[i][j];
            }
            for (int j = 0; j < kDim; ++j) m->w[j] -= lr * (gw[j] + l2 * m->w[j]);
            m->b -= lr * gb;
        }
    } else {
        const double lr0 = hp_get(hp, "lr", 0.1);
        const double lambda = hp_get(hp, "lambda", 1e-3);
        for (int epoch = 0; epoch < epochs; ++epoch) {
            const double lr = lr0 / (1.0 + 0.02 * epoch);
            std::vector<double> gw(kDim);
            for (int j = 0; j < kDim; ++j) gw[j] = lambda * m->w[j];
            double gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = e.y[i] == 1 ? 1.0 : -1.0;
                double z = m->b;
                for (int j = 0; j < kDim; ++j) z += m->w[j] * xs[i][j];
                if (s * z < 1.0) {
                    const double g = e.c[i] * s / total_cost;
                    gb -= g;
                    for (int j = 0; j < kDim; ++j) gw[j] -= g * xs[i][j];
                }
            }
            for (int j = 0; j < kDim; ++j) m->w[j] -= lr * gw[j];
            m->b -= lr * gb;
        }
    }
    return m;
}

// --- feed-forward neural network, one hidden layer ---

class NeuralNetClassifier final : public Classifier {
  public:
    Standardizer std_;
    int hidden = 8;
    std::vector<double> w1;  // hidden x kDim, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;

    double score(const std::vector<double>& x) const {
        double z = b2;
        for (int h = 0; h < hidden; ++h) {
            double a = b1[h];
            for (int j = 0; j < kDim; ++j) a += w1[h * kDim + j] * std_.col(x, j);
            z += w2[h] * std::tanh(a);
        }
        return z;
    }

    int predict(const std::vector<double>& x) const override {
        return score(x) >= 0.0 ? 1 : 0;
    }
};

std::shared_ptr<NeuralNetClassifier> train_nn(const Encoded& e,
                                              const Hyperparams& hp,
                                              std::uint64_t seed) {
    auto m = std::make_shared<NeuralNetClassifier>();
    m->hidden = std::max(1, static_cast<int>(hp_get(hp, "hidden", 8)));
    m->std_.fit(e.x);

    std::mt19937_64 rng(derive_seed(seed, "nn-init"));
    std::normal_distribution<double> noise(0.0, 1.0);
    const int H = m->hidden;
    m->w1.resize(static_cast<std::size_t>(H) * kDim);
    m->b1.assign(H, 0.0);
    m->w2.resize(H);
    for (auto& v : m->w1) v = noise(rng) / std::sqrt(static_cast<double>(kDim));
    for (auto& v : m->w2) v = noise(rng) / std::sqrt(static_cast<double>(H));

    const std::size_t n = e.x.size();
    if (n == 0) return m;
    std::vector<std::vector<double>> xs(n, std::vector<double>(kDim));
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < kDim; ++j) xs[i][j] = m->std_.col(e.x[i], j);
    const double total_cost = std::accumulate(e.c.begin(), e.c.end(), 0.0);

    const int epochs = static_cast<int>(hp_get(hp, "epochs", 400));
    const double lr = hp_get(hp, "lr", 0.3);
    std::vector<double> act(H), gw1(m->w1.size()), gb1(H), gw2(H);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(gw1.begin(), gw1.end(), 0.0);
        std::fill(gb1.begin(), gb1.end(), 0.0);
        std::fill(gw2.begin(), gw2.end(), 0.0);
        double gb2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = m->b2;
            for (int h = 0; h < H; ++h) {
                double a = m->b1[h];
                for (int j = 0; j < kDim; ++j) a += m->w1[h * kDim + j] * xs[i][j];
                act[h] = std::tanh(a);
                z += m->w2[h] * act[h];
            }
            const double dz = e.c[i] * (sigmoid(z) - e.y[i]) / total_cost;
            gb2 += dz;
            for (int h = 0; h < H; ++h) {
                gw2[h] += dz * act[h];
                const double da = dz * m->w2[h] * (1.0 - act[h] * act[h]);
                gb1[h] += da;
                for (int j = 0; j < kDim; ++j) gw1[h * kDim + j] += da * xs[i][j];
            }
        }
        for (std::size_t k = 0; k < m->w1.size(); ++k) m->w1[k] -= lr * gw1[k];
        for (int h = 0; h < H; ++h) {
            m->b1[h] -= lr * gb1[h];
            m->w2[h] -= lr * gw2[h];
        }
        m->b2 -= lr * gb2;
    }
    return m;
}

// --- decision tree (CART with weighted Gini) and random forest ---

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int cls = 0;
};

class TreeClassifier final : public Classifier {
  public:
    std::vector<TreeNode> nodes;

    int predict(const std::vector<double>& x) const override {
        int idx = 0;
        while (nodes[idx].feature >= 0)
            idx = x[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                                : nodes[idx].right;
        return nodes[idx].cls;
    }
};

struct TreeBuilder {
    const Encoded& e;
    int max_depth;
    std::size_t min_leaf;
    std::mt19937_64* rng = nullptr;  // non-null: sample mtry features per split
    int mtry = kDim;
    std::vector<TreeNode> nodes;

    static double gini(double w0, double w1) {
        const double total = w0 + w1;
        if (total <= 0.0) return 0.0;
        const double p0 = w0 / total, p1 = w1 / total;
        return 1.0 - p0 * p0 - p1 * p1;
    }

    int leaf(double w0, double w1) {
        TreeNode node;
        node.cls = w1 >= w0 ? 1 : 0;
        nodes.push_back(node);
        return static_cast<int>(nodes.size()) - 1;
    }

    int build(std::vector<std::size_t>& idx, int depth) {
        double w0 = 0.0, w1 = 0.0;
        for (auto i : idx) (e.y[i] == 1 ? w1 : w0) += e.c[i];
        if (depth >= max_depth || idx.size() < 2 * min_leaf || w0 == 0.0 ||
            w1 == 0.0)
            return leaf(w0, w1);

        // Features are inspected in (shuffled) order; constant columns do not
        // count toward mtry, so subsampling cannot starve a splittable node.
        std::vector<int> order(kDim);
        std::iota(order.begin(), order.end(), 0);
        if (rng) std::shuffle(order.begin(), order.end(), *rng);
        const int want = rng ? std::min(mtry, kDim) : kDim;

        int best_f = -1;
        double best_thr = 0.0, best_score = gini(w0, w1) * (w0 + w1);
        int splittable_seen = 0;
        std::vector<std::pair<double, std::size_t>> vals(idx.size());
        for (int f : order) {
            if (splittable_seen >= want) break;
            for (std::size_t k = 0; k < idx.size(); ++k)
                vals[k] = {e.x[idx[k]][f], idx[k]};
            std::sort(vals.begin(), vals.end());
            bool splittable = false;
            double lw0 = 0.0, lw1 = 0.0;
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                const auto i = vals[k].second;
                (e.y[i] == 1 ? lw1 : lw0) += e.c[i];
                if (vals[k].first == vals[k + 1].first) continue;
                if (k + 1 < min_leaf || vals.size() - k - 1 < min_leaf) continue;
                splittable = true;
                const double rw0 = w0 - lw0, rw1 = w1 - lw1;
                const double score =
                    gini(lw0, lw1) * (lw0 + lw1) + gini(rw0, rw1) * (rw0 + rw1);
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_f = f;
                    best_thr = (vals[k].first + vals[k + 1].first) / 2.0;
                }
            }
            if (splittable) ++splittable_seen;
        }
        if (best_f < 0) return leaf(w0, w1);

        std::vector<std::size_t> left_idx, right_idx;
        for (auto i : idx)
            (e.x[i][best_f] <= best_thr ? left_idx : right_idx).push_back(i);
        nodes.emplace_back();
        const int node_id = static_cast<int>(nodes.size()) - 1;
        nodes[node_id].feature = best_f;
        nodes[node_id].threshold = best_thr;
        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }
};

std::shared_ptr<TreeClassifier> train_tree(const Encoded& e,
                                           const Hyperparams& hp) {
    TreeBuilder builder{e,
                        static_cast<int>(hp_get(hp, "max_depth", 12)),
                        static_cast<std::size_t>(hp_get(hp, "min_leaf", 1)),
                        nullptr,
                        kDim,
                        {}};
    std::vector<std::size_t> idx(e.x.size());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    auto m = std::make_shared<TreeClassifier>();
    m->nodes = std::move(builder.nodes);
    return m;
}

class ForestClassifier final : public Classifier {
  public:
    std::vector<TreeClassifier> trees;

    int predict(const std::vector<double>& x) const override {
        std::size_t votes = 0;
        for (const auto& t : trees) votes += static_cast<std::size_t>(t.predict(x));
        return 2 * votes >= trees.size() ? 1 : 0;
    }
};

std::shared_ptr<ForestClassifier> train_forest(const Encoded& e,
                                               const Hyperparams& hp,
                                               std::uint64_t seed) {
    const int n_trees = std::max(1, static_cast<int>(hp_get(hp, "n_trees", 50)));
    const int mtry = std::max(
        1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(kDim)))));
    auto m = std::make_shared<ForestClassifier>();
    m->trees.resize(n_trees);
    const std::size_t n = e.x.size();
    for (int t = 0; t < n_trees; ++t) {
        std::mt19937_64 rng(derive_seed(seed, "rf-tree-" + std::to_string(t)));
        Encoded boot;
        boot.x.reserve(n);
        boot.y.reserve(n);
        boot.c.reserve(n);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = pick(rng);
            boot.x.push_back(e.x[j]);
            boot.y.push_back(e.y[j]);
            boot.c.push_back(e.c[j]);
        }
        TreeBuilder builder{boot,
                            static_cast<int>(hp_get(hp, "max_depth", 12)),
                            static_cast<std::size_t>(hp_get(hp, "min_leaf", 1)),
                            &rng,
                            mtry,
                            {}};
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        builder.build(idx, 0);
        m->trees[t].nodes = std::move(builder.nodes);
    }
    return m;
}

// --- model payload (de)serialization ---

json standardizer_to_json(const Standardizer& s) {
    return json{{"mean", s.mean}, {"sd", s.sd}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.sd = j.at("sd").get<std::vector<double>>();
    return s;
}

json tree_to_json(const TreeClassifier& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.cls});
    return nodes;
}

TreeClassifier tree_from_json(const json& j) {
    TreeClassifier t;
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.cls = n.at(4).get<int>();
        t.nodes.push_back(node);
    }
    return t;
}

json payload_of(const FilterModel& model) {
    if (auto lin = std::dynamic_pointer_cast<const LinearClassifier>(
            model.artifact)) {
        json j = standardizer_to_json(lin->std_);
        j["w"] = lin->w;
        j["b"] = lin->b;
        return j;
    }
    if (auto nn = std::dynamic_pointer_cast<const NeuralNetClassifier>(
            model.artifact)) {
        json j = standardizer_to_json(nn->std_);
        j["hidden"] = nn->hidden;
        j["w1"] = nn->w1;
        j["b1"] = nn->b1;
        j["w2"] = nn->w2;
        j["b2"] = nn->b2;
        return j;
    }
    if (auto tree =
            std::dynamic_pointer_cast<const TreeClassifier>(model.artifact))
        return json{{"nodes", tree_to_json(*tree)}};
    if (auto forest =
            std::dynamic_pointer_cast<const ForestClassifier>(model.artifact)) {
        json trees = json::array();
        for (const auto& t : forest->trees) trees.push_back(tree_to_json(t));
        return json{{"trees", trees}};
    }
    throw ConfigError("model has no trained artifact");
}

std::shared_ptr<const Classifier> artifact_from_json(Algorithm a,
                                                     const json& j) {
    switch (a) {
        case Algorithm::LR:
        case Algorithm::SVM: {
            auto m = std::make_shared<LinearClassifier>();
            m->form = a == Algorithm::LR ? LinearClassifier::Form::Logistic
                                         : LinearClassifier::Form::Svm;
            m->std_ = standardizer_from_json(j);
            m->w = j.at("w").get<std::vector<double>>();
            m->b = j.at("b").get<double>();
            return m;
        }
        case Algorithm::NN: {
            auto m = std::make_shared<NeuralNetClassifier>();
            m->std_ = standardizer_from_json(j);
            m->hidden = j.at("hidden").get<int>();
            m->w1 = j.at("w1").get<std::vector<double>>();
            m->b1 = j.at("b1").get<std::vector<double>>();
            m->w2 = j.at("w2").get<std::vector<double>>();
            m->b2 = j.at("b2").get<double>();
            return m;
        }
        case Algorithm::DT:
            return std::make_shared<TreeClassifier>(
                tree_from_json(j.at("nodes")));
        case Algorithm::RF: {
            auto m = std::make_shared<ForestClassifier>();
            for (const auto& t : j.at("trees")) m->trees.push_back(tree_from_json(t));
            return m;
        }
    }
    throw UnsupportedAlgorithm("unknown algorithm id");
}

std::vector<std::string> provenance_of(const features::FeatureMatrix& matrix) {
    std::set<std::string> ids;
    for (const auto& row : matrix.rows) ids.insert(row.doc_id);
    return {ids.begin(), ids.end()};
}

// --- information gain helpers ---

double entropy2(double n0, double n1) {
    const double total = n0 + n1;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : {n0, n1})
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    return h;
}

int classes_present(double n0, double n1) {
    return (n0 > 0.0 ? 1 : 0) + (n1 > 0.0 ? 1 : 0);
}

// Entropy-based binary splitting with the MDL acceptance criterion; appends
// accepted cut points (ascending order is restored by the caller).
void mdl_cuts(const std::vector<std::pair<double, int>>& sorted, std::size_t lo,
              std::size_t hi, std::vector<double>& cuts) {
    const std::size_t n = hi - lo;
    if (n < 2) return;
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = lo; i < hi; ++i) (sorted[i].second ? c1 : c0) += 1.0;
    const double h = entropy2(c0, c1);
    if (h == 0.0) return;

    double best = h;
    std::size_t best_pos = 0;  // split between best_pos and best_pos+1
    double bl0 = 0.0, bl1 = 0.0;
    double l0 = 0.0, l1 = 0.0;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        (sorted[i].second ? l1 : l0) += 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double left_n = l0 + l1, right_n = static_cast<double>(n) - left_n;
        const double cond = (left_n / n) * entropy2(l0, l1) +
                            (right_n / n) * entropy2(c0 - l0, c1 - l1);
        if (cond < best - 1e-12) {
            best = cond;
            best_pos = i;
            bl0 = l0;
            bl1 = l1;
        }
    }
    if (best >= h) return;

    const double gain = h - best;
    const double h1 = entropy2(bl0, bl1), h2 = entropy2(c0 - bl0, c1 - bl1);
    const int k = classes_present(c0, c1);
    const int k1 = classes_present(bl0, bl1);
    const int k2 = classes_present(c0 - bl0, c1 - bl1);
    const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                         (k * h - k1 * h1 - k2 * h2);
    const double threshold =
        (std::log2(static_cast<double>(n) - 1.0) + delta) / n;
    if (gain <= threshold) return;

    cuts.push_back((sorted[best_pos].first + sorted[best_pos + 1].first) / 2.0);
    mdl_cuts(sorted, lo, best_pos + 1, cuts);
    mdl_cuts(sorted, best_pos + 1, hi, cuts);
}

struct FeatureColumn {
    std::string name;
    bool categorical = false;
    std::vector<double> values;
    std::vector<char> missing;  // empty when the feature is always present
};

std::vector<FeatureColumn> feature_columns(const LabeledDataset& ds) {
    const std::size_t n = ds.size();
    std::vector<FeatureColumn> cols(13);
    for (int f = 0; f < 13; ++f) {
        cols[f].name = "F" + std::to_string(f + 1);
        cols[f].values.resize(n);
    }
    for (int f : {0, 1, 2}) cols[f].categorical = true;
    cols[8].missing.resize(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = ds.matrix.rows[i].features;
        cols[0].values[i] = static_cast<double>(static_cast<int>(v.f1));
        cols[1].values[i] = static_cast<double>(static_cast<int>(v.f2));
        cols[2].values[i] = v.f3 ? 1.0 : 0.0;
        cols[3].values[i] = v.f4;
        cols[4].values[i] = v.f5;
        cols[5].values[i] = v.f6;
        cols[6].values[i] = v.f7;
        cols[7].values[i] = v.f8;
        cols[8].values[i] = v.f9;
        cols[8].missing[i] = v.f9_defined ? 0 : 1;
        cols[9].values[i] = v.f10;
        cols[10].values[i] = v.f11;
        cols[11].values[i] = v.f12;
        cols[12].values[i] = v.f13;
    }
    return cols;
}

// Bin ids per row for one feature; missing values get their own bin.
std::vector<int> discretize(const FeatureColumn& col,
                            const std::vector<int>& labels) {
    const std::size_t n = col.values.size();
    std::vector<int> bins(n, 0);
    if (col.categorical) {
        std::map<double, int> ids;
        for (std::size_t i = 0; i < n; ++i)
            bins[i] = ids.try_emplace(col.values[i], static_cast<int>(ids.size()))
                          .first->second;
        return bins;
    }
    std::vector<std::pair<double, int>> present;
    for (std::size_t i = 0; i < n; ++i)
        if (col.missing.empty() || !col.missing[i])
            present.emplace_back(col.values[i], labels[i]);
    std::sort(present.begin(), present.end());
    std::vector<double> cuts;
    mdl_cuts(present, 0, present.size(), cuts);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (!col.missing.empty() && col.missing[i]) {
            bins[i] = static_cast<int>(cuts.size()) + 1;  // dedicated bin
            continue;
        }
        bins[i] = static_cast<int>(
            std::upper_bound(cuts.begin(), cuts.end(), col.values[i]) -
            cuts.begin());
    }
    return bins;
}

}  // namespace

// --- names and small types ---

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::NN: return "NN";
        case Algorithm::DT: return "DT";
        case Algorithm::LR: return "LR";
        case Algorithm::RF: return "RF";
        case Algorithm::SVM: return "SVM";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "NN") return Algorithm::NN;
    if (name == "DT") return Algorithm::DT;
    if (name == "LR") return Algorithm::LR;
    if (name == "RF") return Algorithm::RF;
    if (name == "SVM") return Algorithm::SVM;
    throw UnsupportedAlgorithm(name);
}

std::string training_mode_name(TrainingMode m) {
    switch (m) {
        case TrainingMode::Strict: return "strict";
        case TrainingMode::Moderate: return "moderate";
        case TrainingMode::Lenient: return "lenient";
        case TrainingMode::Custom: return "custom";
    }
    return "?";
}

TrainingMode training_mode_from_name(const std::string& name) {
    if (name == "strict") return TrainingMode::Strict;
    if (name == "moderate") return TrainingMode::Moderate;
    if (name == "lenient") return TrainingMode::Lenient;
    if (name == "custom") return TrainingMode::Custom;
    throw ConfigError("unknown training mode: " + name);
}

std::size_t LabeledDataset::relevant_count() const {
    std::size_t n = 0;
    for (const auto& row : matrix.rows) n += (row.label && *row.label == 1);
    return n;
}

std::size_t LabeledDataset::nonrelevant_count() const {
    std::size_t n = 0;
    for (const auto& row : matrix.rows) n += (row.label && *row.label == 0);
    return n;
}

LabeledDataset make_labeled(features::FeatureMatrix matrix) {
    for (const auto& row : matrix.rows)
        if (!row.label || (*row.label != 0 && *row.label != 1))
            throw ConfigError("dataset row without a 0/1 label");
    LabeledDataset ds;
    ds.provenance = provenance_of(matrix);
    ds.matrix = std::move(matrix);
    return ds;
}

std::vector<double> encode_features(const features::FeatureVector& v) {
    std::vector<double> x(kDim, 0.0);
    x[static_cast<int>(v.f1)] = 1.0;
    x[5 + static_cast<int>(v.f2)] = 1.0;
    x[10] = v.f3 ? 1.0 : 0.0;
    x[11] = v.f4;
    x[12] = v.f5;
    x[13] = v.f6;
    x[14] = v.f7;
    x[15] = v.f8;
    x[16] = v.f9_defined ? v.f9 : 0.0;
    x[17] = v.f9_defined ? 1.0 : 0.0;
    x[18] = v.f10;
    x[19] = v.f11;
    x[20] = v.f12;
    x[21] = v.f13;
    return x;
}

int FilterModel::classify(const features::FeatureVector& v) const {
    if (!artifact) throw ConfigError("model has no trained artifact");
    return artifact->predict(encode_features(v));
}

// --- dataset construction ---

LabeledDataset label_predictions(const features::FeatureMatrix& matrix,
                                 const text::TermSet& withheld,
                                 const lex::Matcher& matcher) {
    features::FeatureMatrix labeled = matrix;
    for (auto& row : labeled.rows) {
        int label = 0;
        for (const auto& term : withheld.lemmas)
            if (matcher.terms_match(row.record.lemma, term)) {
                label = 1;
                break;
            }
        row.label = label;
    }
    return make_labeled(std::move(labeled));
}

LabeledDataset undersample(const LabeledDataset& ds, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.size(); ++i)
        (*ds.matrix.rows[i].label == 1 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw DegenerateDataset("undersample needs both classes; have " +
                                std::to_string(pos.size()) + " relevant / " +
                                std::to_string(neg.size()) + " non-relevant");
    if (pos.size() == neg.size()) return ds;

    auto& majority = pos.size() > neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    std::mt19937_64 rng(seed);
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(keep);

    std::vector<std::size_t> kept;
    kept.reserve(2 * keep);
    kept.insert(kept.end(), pos.begin(), pos.end());
    kept.insert(kept.end(), neg.begin(), neg.end());
    std::sort(kept.begin(), kept.end());

    features::FeatureMatrix out;
    out.rows.reserve(kept.size());
    for (auto i : kept) out.rows.push_back(ds.matrix.rows[i]);
    return make_labeled(std::move(out));
}

// --- training and evaluation ---

Hyperparams default_hyperparams(Algorithm a) {
    switch (a) {
        case Algorithm::NN:
            return {{"hidden", 8}, {"lr", 0.3}, {"epochs", 400}};
        case Algorithm::DT:
            return {{"max_depth", 12}, {"min_leaf", 1}};
        case Algorithm::LR:
            return {{"lr", 0.5}, {"l2", 1e-3}, {"epochs", 400}};
        case Algorithm::RF:
            return {{"n_trees", 50}, {"max_depth", 12}, {"min_leaf", 1}};
        case Algorithm::SVM:
            return {{"lambda", 1e-3}, {"lr", 0.1}, {"epochs", 400}};
    }
    return {};
}

SearchSpace default_search_space(Algorithm a) {
    switch (a) {
        case Algorithm::NN:
            return {{"hidden", {4, 8, 16}}, {"lr", {0.1, 0.3}}};
        case Algorithm::DT:
            return {{"max_depth", {4, 8, 12, 16}}, {"min_leaf", {1, 2, 4}}};
        case Algorithm::LR:
            return {{"lr", {0.1, 0.5}}, {"l2", {0.0, 1e-3, 1e-2}}};
        case Algorithm::RF:
            return {{"n_trees", {25, 50, 100}}, {"max_depth", {8, 12, 16}}};
        case Algorithm::SVM:
            return {{"lambda", {1e-4, 1e-3, 1e-2}}, {"lr", {0.05, 0.1}}};
    }
    return {};
}

FilterModel train(const LabeledDataset& ds, Algorithm a,
                  const std::optional<CostMatrix>& cost, const Hyperparams& hp,
                  std::uint64_t seed) {
    if (ds.size() == 0) throw DegenerateDataset("cannot train on an empty dataset");
    Hyperparams merged = default_hyperparams(a);
    for (const auto& [k, v] : hp) merged[k] = v;
    const CostMatrix costs = cost.value_or(CostMatrix{});
    const Encoded e = encode_dataset(ds, costs);

    FilterModel model;
    model.algorithm = a;
    model.training_mode = TrainingMode::Custom;
    model.hyperparams = merged;
    model.cost = costs;
    model.matrix_schema = features::FeatureMatrix::schema_version();
    switch (a) {
        case Algorithm::LR:
            model.artifact = train_linear(e, LinearClassifier::Form::Logistic, merged);
            break;
        case Algorithm::SVM:
            model.artifact = train_linear(e, LinearClassifier::Form::Svm, merged);
            break;
        case Algorithm::NN:
            model.artifact = train_nn(e, merged, seed);
            break;
        case Algorithm::DT:
            model.artifact = train_tree(e, merged);
            break;
        case Algorithm::RF:
            model.artifact = train_forest(e, merged, seed);
            break;
    }
    return model;
}

std::vector<int> stratified_folds(const LabeledDataset& ds, int folds,
                                  std::uint64_t seed) {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (ds.size() < static_cast<std::size_t>(folds))
        throw TooFewRows(ds.size(), folds);
    std::vector<int> fold(ds.size(), -1);
    std::mt19937_64 rng(derive_seed(seed, "cv-folds"));
    int next = 0;
    for (int cls : {1, 0}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (*ds.matrix.rows[i].label == cls) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (auto i : idx) fold[i] = next++ % folds;
    }
    return fold;
}

CvResult cross_validate(const LabeledDataset& ds, Algorithm a, int folds,
                        std::uint64_t seed,
                        const std::optional<CostMatrix>& cost,
                        const Hyperparams& hp) {
    const auto fold_of = stratified_folds(ds, folds, seed);
    double acc_sum = 0.0, prec_sum = 0.0, rec_sum = 0.0;
    int acc_n = 0, prec_n = 0, rec_n = 0;
    for (int f = 0; f < folds; ++f) {
        features::FeatureMatrix train_rows;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (fold_of[i] == f)
                test_idx.push_back(i);
            else
                train_rows.rows.push_back(ds.matrix.rows[i]);
        }
        if (test_idx.empty()) continue;
        const auto model =
            train(make_labeled(std::move(train_rows)), a, cost, hp,
                  derive_seed(seed, "cv-fold-" + std::to_string(f)));
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (auto i : test_idx) {
            const int got = model.classify(ds.matrix.rows[i].features);
            const int want = *ds.matrix.rows[i].label;
            if (want == 1 && got == 1) ++tp;
            else if (want == 0 && got == 1) ++fp;
            else if (want == 0 && got == 0) ++tn;
            else ++fn;
        }
        acc_sum += static_cast<double>(tp + tn) / test_idx.size();
        ++acc_n;
        if (tp + fp > 0) {
            prec_sum += static_cast<double>(tp) / (tp + fp);
            ++prec_n;
        }
        if (tp + fn > 0) {
            rec_sum += static_cast<double>(tp) / (tp + fn);
            ++rec_n;
        }
    }
    CvResult res;
    res.accuracy = acc_n > 0 ? acc_sum / acc_n : 0.0;
    if (prec_n > 0) res.precision = prec_sum / prec_n;
    if (rec_n > 0) res.recall = rec_sum / rec_n;
    return res;
}

Hyperparams random_search(const LabeledDataset& ds, Algorithm a,
                          const SearchSpace& space, int budget,
                          std::uint64_t seed, int folds,
                          const std::optional<CostMatrix>& cost) {
    if (budget < 1) throw ConfigError("random search needs a budget of at least 1");
    std::mt19937_64 rng(derive_seed(seed, "random-search"));
    const std::uint64_t cv_seed = derive_seed(seed, "random-search-cv");
    Hyperparams best;
    double best_acc = -1.0;
    for (int t = 0; t < budget; ++t) {
        Hyperparams cand = default_hyperparams(a);
        for (const auto& [key, values] : space) {
            if (values.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
            cand[key] = values[pick(rng)];
        }
        const auto res = cross_validate(ds, a, folds, cv_seed, cost, cand);
        if (res.accuracy > best_acc) {
            best_acc = res.accuracy;
            best = cand;
        }
    }
    return best;
}

std::vector<std::pair<std::string, double>> information_gain(
    const LabeledDataset& ds) {
    std::vector<int> labels(ds.size());
    double n1 = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        labels[i] = *ds.matrix.rows[i].label;
        n1 += labels[i];
    }
    const double n = static_cast<double>(ds.size());
    const double h_label = entropy2(n - n1, n1);

    std::vector<std::pair<std::string, double>> out;
    for (const auto& col : feature_columns(ds)) {
        const auto bins = discretize(col, labels);
        std::map<int, std::array<double, 2>> counts;
        for (std::size_t i = 0; i < bins.size(); ++i)
            counts[bins[i]][labels[i]] += 1.0;
        double cond = 0.0;
        for (const auto& [bin, c] : counts)
            cond += ((c[0] + c[1]) / n) * entropy2(c[0], c[1]);
        out.emplace_back(col.name, h_label - cond);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

text::TermSet apply_filter(const FilterModel& model,
                           const features::FeatureMatrix& matrix) {
    if (model.matrix_schema != features::FeatureMatrix::schema_version())
        throw SchemaMismatch(features::FeatureMatrix::schema_version(),
                             model.matrix_schema);
    text::TermSet out;
    for (const auto& row : matrix.rows)
        if (model.classify(row.features) == 1) out.lemmas.insert(row.record.lemma);
    return out;
}

FilterModel train_preset(const LabeledDataset& ds, TrainingMode mode,
                         std::uint64_t seed) {
    FilterModel model;
    switch (mode) {
        case TrainingMode::Strict:
            model = train(ds, Algorithm::RF, std::nullopt, {},
                          derive_seed(seed, "preset-strict"));
            break;
        case TrainingMode::Moderate:
            model = train(undersample(ds, derive_seed(seed, "preset-moderate-us")),
                          Algorithm::RF, std::nullopt, {},
                          derive_seed(seed, "preset-moderate"));
            break;
        case TrainingMode::Lenient:
            model = train(undersample(ds, derive_seed(seed, "preset-lenient-us")),
                          Algorithm::SVM, CostMatrix{2.0, 1.0}, {},
                          derive_seed(seed, "preset-lenient"));
            break;
        case TrainingMode::Custom:
            throw ConfigError("custom is not a trainable preset");
    }
    model.training_mode = mode;
    return model;
}

void save_model(const FilterModel& model, const std::filesystem::path& path) {
    json j;
    j["format"] = kModelFormat;
    j["algorithm"] = algorithm_name(model.algorithm);
    j["training_mode"] = training_mode_name(model.training_mode);
    j["matrix_schema"] = model.matrix_schema;
    j["hyperparams"] = model.hyperparams;
    j["cost"] = {{"fn", model.cost.cost_fn}, {"fp", model.cost.cost_fp}};
    j["payload"] = payload_of(model);
    io::write_file(path, j.dump(2) + "\n");
}

FilterModel load_model(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw IoError("malformed model file " + path.string() + ": " + e.what());
    }
    try {
        const std::string format = j.at("format").get<std::string>();
        if (format != kModelFormat) throw SchemaMismatch(kModelFormat, format);
        FilterModel model;
        model.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
        model.training_mode =
            training_mode_from_name(j.at("training_mode").get<std::string>());
        model.matrix_schema = j.at("matrix_schema").get<std::string>();
        model.hyperparams = j.at("hyperparams").get<Hyperparams>();
        model.cost.cost_fn = j.at("cost").at("fn").get<double>();
        model.cost.cost_fp = j.at("cost").at("fp").get<double>();
        model.artifact = artifact_from_json(model.algorithm, j.at("payload"));
        return model;
    } catch (const json::exception& e) {
        throw IoError("malformed model file " + path.string() + ": " + e.what());
    }
}

}  // namespace reqterm::filter
