#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reqterm/corpus_builder.hpp"
#include "reqterm/lexical_similarity.hpp"
#include "reqterm/mlm_gateway.hpp"
#include "reqterm/prediction_engine.hpp"
#include "reqterm/relevance_filter.hpp"
#include "reqterm/text_pipeline.hpp"

namespace reqterm::eval {

// A document partitioned into a disclosed half and a withheld half.
struct DocumentSplit {
    text::AnnotatedDocument disclosed;  // h1
    text::AnnotatedDocument withheld;   // h2
    std::uint64_t seed = 0;
    double ratio = 0.5;
};

// Seeded uniform sentence partition; the disclosed half gets the extra
// sentence on odd counts. Throws TooSmall below 2 sentences.
DocumentSplit split_document(const text::AnnotatedDocument& doc, double ratio,
                             std::uint64_t seed);

// Share of terms in `d` that match some term in `n`; nullopt when d is empty.
std::optional<double> accuracy_metric(const text::TermSet& d,
                                      const text::TermSet& n,
                                      const lex::Matcher& matcher);

// Share of terms in `n` matched by some term in `d` (each n-term counted
// once); nullopt when n is empty.
std::optional<double> coverage_metric(const text::TermSet& d,
                                      const text::TermSet& n,
                                      const lex::Matcher& matcher);

struct ClassificationMetrics {
    double accuracy = 0.0;
    std::optional<double> precision;  // nullopt when TP+FP = 0
    std::optional<double> recall;     // nullopt when TP+FN = 0
};

ClassificationMetrics classification_metrics(std::size_t tp, std::size_t fp,
                                             std::size_t tn, std::size_t fn);

// Two-sided p-value; exact enumeration when both samples have at most 8
// values, normal approximation with tie correction otherwise.
double wilcoxon_rank_sum(const std::vector<double>& xs,
                         const std::vector<double>& ys);

// P(x > y) + 0.5 P(x = y) over all pairs.
double vargha_delaney_a12(const std::vector<double>& xs,
                          const std::vector<double>& ys);

// Shared configuration for the experiment runners.
struct HarnessContext {
    mlm::BackendHandle backend;
    text::Wordlists wordlists;
    lex::Matcher matcher{nullptr};
    const corpus::CorpusStats* stats = nullptr;  // optional, for features
    int k = 15;
    double split_ratio = 0.5;
    std::uint64_t master_seed = 0;
};

// Masking, prediction, and noise filtering applied to the disclosed half
// only; the withheld half never reaches the backend.
std::vector<engine::PredictionRecord> disclosed_predictions(
    const text::AnnotatedDocument& disclosed, const mlm::Backend& backend,
    const text::Wordlists& wl, int k);

// N: withheld-half terms minus disclosed terms minus the wordlists.
text::TermSet novel_withheld(const DocumentSplit& split,
                             const text::Wordlists& wl);

// Unique prediction lemmas (D).
text::TermSet recommendation_set(
    const std::vector<engine::PredictionRecord>& preds);

struct ExpiRow {
    std::string doc_id;
    int k = 0;
    std::uint64_t seed = 0;
    std::optional<double> accuracy;
    std::optional<double> coverage;
};

// Fresh random split per (doc, k); no relevance filter.
std::vector<ExpiRow> run_expi(const HarnessContext& ctx,
                              const std::vector<text::AnnotatedDocument>& docs,
                              const std::vector<int>& ks = {5, 10, 15, 20});

struct PairwiseStat {
    int k_a = 0;
    int k_b = 0;
    std::optional<double> p_accuracy, a12_accuracy;
    std::optional<double> p_coverage, a12_coverage;
};

// One row per unordered pair of k levels, ascending (5v10, 5v15, ...).
std::vector<PairwiseStat> pairwise_by_k(const std::vector<ExpiRow>& rows);

struct ExpiiRow {
    filter::Algorithm algorithm;
    filter::TrainingMode option;  // strict=full, moderate=under-sampled,
                                  // lenient=under-sampled + cost-sensitive
    filter::CvResult cv;
};

struct ExpiiResult {
    filter::LabeledDataset data;
    std::vector<ExpiiRow> table;  // 5 algorithms x 3 options
    std::vector<std::pair<std::string, double>> ig;
};

ExpiiResult run_expii(const HarnessContext& ctx,
                      const std::vector<text::AnnotatedDocument>& docs);

struct EvaluationReport {
    std::string doc_id;
    int repeat = 0;
    int k = 15;
    std::string filter_mode;  // none | strict | moderate | lenient
    std::uint64_t run_seed = 0;
    std::optional<double> accuracy;
    std::optional<double> coverage;
    std::optional<double> cls_accuracy, cls_precision, cls_recall;
};

// One baseline report plus one per preset for every (repeat, doc) pair; the
// split and predictions are shared within a pair.
std::vector<EvaluationReport> run_expiii(
    const HarnessContext& ctx, const std::vector<text::AnnotatedDocument>& docs,
    const std::vector<filter::FilterModel>& presets, int repeats = 5);

}  // namespace reqterm::eval
