#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reqterm/feature_extractor.hpp"
#include "reqterm/lexical_similarity.hpp"
#include "reqterm/text_pipeline.hpp"

namespace reqterm::filter {

enum class Algorithm { NN, DT, LR, RF, SVM };

std::string algorithm_name(Algorithm a);
// Throws UnsupportedAlgorithm for anything outside {NN, DT, LR, RF, SVM}.
Algorithm algorithm_from_name(const std::string& name);

enum class TrainingMode { Strict, Moderate, Lenient, Custom };

std::string training_mode_name(TrainingMode m);
TrainingMode training_mode_from_name(const std::string& name);

// Misclassification costs; the lenient preset doubles the false-negative cost.
struct CostMatrix {
    double cost_fn = 1.0;
    double cost_fp = 1.0;
};

using Hyperparams = std::map<std::string, double>;
using SearchSpace = std::map<std::string, std::vector<double>>;

// A feature matrix in which every row carries a 0/1 label (1 = relevant).
struct LabeledDataset {
    features::FeatureMatrix matrix;
    std::vector<std::string> provenance;  // sorted unique source doc ids

    std::size_t relevant_count() const;
    std::size_t nonrelevant_count() const;
    std::size_t size() const { return matrix.rows.size(); }
};

// Validates that every row is labeled and records provenance/class counts.
LabeledDataset make_labeled(features::FeatureMatrix matrix);

// Opaque trained artifact; concrete classifiers live in the implementation.
class Classifier {
  public:
    virtual ~Classifier() = default;
    // x is the numeric encoding of a feature vector; returns 0 or 1.
    virtual int predict(const std::vector<double>& x) const = 0;
};

struct FilterModel {
    Algorithm algorithm = Algorithm::RF;
    TrainingMode training_mode = TrainingMode::Custom;
    Hyperparams hyperparams;
    CostMatrix cost;
    std::string matrix_schema;  // feature-matrix schema the model was trained on
    std::shared_ptr<const Classifier> artifact;

    // 1 = relevant, 0 = non-relevant.
    int classify(const features::FeatureVector& v) const;
};

// Numeric encoding used by every classifier (one-hot POS + raw numerics).
std::vector<double> encode_features(const features::FeatureVector& v);

// Rows whose lemma matches any withheld term are labeled relevant.
LabeledDataset label_predictions(const features::FeatureMatrix& matrix,
                                 const text::TermSet& withheld,
                                 const lex::Matcher& matcher);

// Randomly reduces the majority class to the minority count (1:1).
LabeledDataset undersample(const LabeledDataset& ds, std::uint64_t seed);

Hyperparams default_hyperparams(Algorithm a);
SearchSpace default_search_space(Algorithm a);

FilterModel train(const LabeledDataset& ds, Algorithm a,
                  const std::optional<CostMatrix>& cost, const Hyperparams& hp,
                  std::uint64_t seed);

struct CvResult {
    double accuracy = 0.0;
    // Zero-denominator folds are excluded from the averages; nullopt when
    // every fold was degenerate.
    std::optional<double> precision;
    std::optional<double> recall;
};

// Stratified fold assignment (fold id per row); exposed for property tests.
std::vector<int> stratified_folds(const LabeledDataset& ds, int folds,
                                  std::uint64_t seed);

CvResult cross_validate(const LabeledDataset& ds, Algorithm a, int folds,
                        std::uint64_t seed,
                        const std::optional<CostMatrix>& cost = std::nullopt,
                        const Hyperparams& hp = {});

// Samples `budget` configurations and returns the one with the best CV
// accuracy; reproducible per seed.
Hyperparams random_search(const LabeledDataset& ds, Algorithm a,
                          const SearchSpace& space, int budget,
                          std::uint64_t seed, int folds = 10,
                          const std::optional<CostMatrix>& cost = std::nullopt);

// IG = H(label) - H(label | feature), numeric features discretized by
// entropy-based (MDL) binning; descending, ties broken by feature index.
std::vector<std::pair<std::string, double>> information_gain(
    const LabeledDataset& ds);

// Unique lemmas of the rows the model classifies as relevant.
text::TermSet apply_filter(const FilterModel& model,
                           const features::FeatureMatrix& matrix);

// strict = RF on the full set, moderate = RF on an under-sampled set,
// lenient = SVM on an under-sampled set with doubled false-negative cost.
FilterModel train_preset(const LabeledDataset& ds, TrainingMode mode,
                         std::uint64_t seed);

void save_model(const FilterModel& model, const std::filesystem::path& path);
FilterModel load_model(const std::filesystem::path& path);

}  // namespace reqterm::filter
