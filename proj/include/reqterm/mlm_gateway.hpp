#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace reqterm::mlm {

// One masked slot inside a tokenized sentence. tokens[mask_index] is the word
// being masked; the backend substitutes its own mask symbol for it.
struct MaskedQuery {
    std::vector<std::string> tokens;
    std::size_t mask_index = 0;
    std::size_t k = 15;  // predictions per mask; 15 is the default trade-off
};

struct ScoredPrediction {
    std::string term;        // whole word as emitted by the backend
    double confidence = 0.0; // in [0,1]
};

// Uniform interface to a masked-language-model backend. Handles are read-only
// after load; predict_masked is safe to call concurrently.
class Backend {
public:
    virtual ~Backend() = default;

    // Returns min(k, available) whole-word predictions sorted by strictly
    // descending confidence. Sub-word continuation pieces and special tokens
    // are dropped and replaced by the next-ranked whole word, so the list
    // has exactly k entries unless the vocabulary is exhausted first.
    // Throws InvalidQuery / QueryTooLong / BackendUnavailable.
    virtual std::vector<ScoredPrediction> predict_masked(const MaskedQuery& q) const = 0;

    virtual std::size_t context_window() const = 0;
    virtual std::string id() const = 0;
};

using BackendHandle = std::shared_ptr<const Backend>;

// Accepts "stub", "stub:seed=<n>", or a path to a local model directory
// (config.json + vocab.txt + weights.bin). Throws ModelNotFound otherwise.
BackendHandle load_backend(const std::string& spec);

// Shared precondition checks: exactly one mask, in range, k >= 1.
void validate_query(const MaskedQuery& q);

// True for backend vocabulary entries that count as standalone words:
// no "##" continuation prefix, not a bracketed special token, and at least
// one letter.
bool is_whole_word(const std::string& vocab_entry);

}  // namespace reqterm::mlm
