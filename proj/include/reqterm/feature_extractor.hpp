#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reqterm/corpus_builder.hpp"
#include "reqterm/lexical_similarity.hpp"
#include "reqterm/prediction_engine.hpp"
#include "reqterm/text_pipeline.hpp"

namespace reqterm::features {

// The 13 per-prediction features. All numeric fields are normalized or
// bounded so matrices from different documents concatenate without rescaling.
struct FeatureVector {
    text::Pos f1 = text::Pos::Other;  // POS of the masked word
    text::Pos f2 = text::Pos::Other;  // POS of the prediction in context
    bool f3 = false;                  // f1 == f2
    int f4 = 0;                       // masked word length (chars)
    int f5 = 0;                       // prediction length (chars)
    double f6 = 0.0;                  // min(f4,f5)/max(f4,f5), in (0,1]
    double f7 = 0.0;                  // backend confidence, in [0,1]
    int f8 = 0;                       // Levenshtein(prediction, masked word)
    double f9 = 0.0;                  // cosine(prediction, masked) when defined
    bool f9_defined = false;          // distinct missing marker, not a silent 0
    int f10 = 9;                      // decile among this document's predictions
    int f11 = 9;                      // decile in the domain corpus
    double f12 = 0.0;                 // average normalized TF-IDF across articles
    double f13 = 0.0;                 // maximum normalized TF-IDF across articles
};

struct MatrixRow {
    std::string doc_id;
    engine::PredictionRecord record;
    FeatureVector features;
    std::optional<int> label;  // 1 = relevant, 0 = non-relevant
};

struct FeatureMatrix {
    std::vector<MatrixRow> rows;

    static const char* schema_version();  // "reqterm-matrix v1"
    static std::string header();          // CSV column header line
};

// POS of the prediction after substituting it into the masked slot and
// re-running the text pipeline on the reconstructed sentence.
text::Pos pos_in_context(const engine::PredictionRecord& record,
                         const text::AnnotatedDocument& doc);

// Frequency deciles of prediction lemmas over the given bag (F10): 0 = most
// frequent ten percentile of distinct lemmas, ties share a bin.
std::map<std::string, int> prediction_deciles(
    const std::vector<engine::PredictionRecord>& preds);

// All 13 features for one record. `stats` may be null (no corpus available):
// F11 = 9, F12 = F13 = 0. `all_preds` is the document's surviving bag (F10).
FeatureVector compute_vector(const engine::PredictionRecord& record,
                             const text::AnnotatedDocument& doc,
                             const std::vector<engine::PredictionRecord>& all_preds,
                             const corpus::CorpusStats* stats,
                             const lex::Matcher& sim);

// One row per prediction, in input order.
FeatureMatrix build_matrix(const std::vector<engine::PredictionRecord>& preds,
                           const text::AnnotatedDocument& doc,
                           const corpus::CorpusStats* stats, const lex::Matcher& sim);

// Delimited text persistence with a schema header; value-identical round-trip.
void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path);
FeatureMatrix load_matrix(const std::filesystem::path& path);  // SchemaMismatch

}  // namespace reqterm::features
