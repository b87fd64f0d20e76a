#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "reqterm/mlm_gateway.hpp"
#include "reqterm/text_pipeline.hpp"

namespace reqterm::engine {

// One noun/verb token occurrence to be masked. Repeated words yield repeated
// instances; masking is per occurrence.
struct MaskInstance {
    std::size_t sentence_index = 0;
    std::size_t token_index = 0;
    text::Token masked_word;  // pos is NOUN or VERB
};

struct PredictionRecord {
    MaskInstance instance;
    std::string term;    // whole word as returned by the gateway
    std::string lemma;   // lemmatized with the document pipeline
    double confidence = 0.0;
};

// Every noun/verb token occurrence in document order.
std::vector<MaskInstance> enumerate_masks(const text::AnnotatedDocument& doc);

// Queries the backend once per mask instance with `k` predictions each.
// Result order: instances in document order, each instance's predictions in
// backend rank order. Sentences are processed concurrently; assembly order is
// deterministic. Gateway errors are rethrown as Error with the offending
// instance named, the original exception nested.
std::vector<PredictionRecord> collect_predictions(const text::AnnotatedDocument& doc,
                                                  const mlm::Backend& backend,
                                                  std::size_t k);

// Drops every record whose lemma is in disclosed or in the combined wordlists.
// Preserves order and duplicates across distinct mask instances.
std::vector<PredictionRecord> basic_filter(const std::vector<PredictionRecord>& bag,
                                           const text::TermSet& disclosed,
                                           const text::Wordlists& wl);

}  // namespace reqterm::engine
