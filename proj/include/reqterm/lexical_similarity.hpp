#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace reqterm::lex {

// Static word-embedding table. Lookup is case-insensitive; keys are stored
// lower-cased. An empty store is valid and makes every term out-of-vocabulary.
class EmbeddingStore {
public:
    // File format: one token per line, token followed by `dimension`
    // space-separated decimals. Dimension is fixed by the first line.
    static EmbeddingStore load(const std::filesystem::path& path);
    static EmbeddingStore from_vectors(
        const std::unordered_map<std::string, std::vector<double>>& vectors);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }

    // nullptr when the term is out of vocabulary.
    const std::vector<double>* find(const std::string& term) const;

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Cosine of the two terms' vectors; std::nullopt when either term is out of
// vocabulary or has a zero vector (Undefined is a value, not an error).
std::optional<double> cosine(const EmbeddingStore& store, const std::string& a,
                             const std::string& b);

// Minimum number of single-character inserts/deletes/substitutions.
std::size_t levenshtein(const std::string& a, const std::string& b);

// Decides whether two lemmas denote the same term: exact lemma equality
// (case-insensitive), or embedding cosine >= threshold when both are in
// vocabulary. Out-of-vocabulary pairs fall back to exact equality only.
class Matcher {
public:
    static constexpr double kDefaultThreshold = 0.85;

    explicit Matcher(std::shared_ptr<const EmbeddingStore> store,
                     double threshold = kDefaultThreshold);

    bool terms_match(const std::string& a, const std::string& b) const;

    double threshold() const { return threshold_; }
    const EmbeddingStore& store() const { return *store_; }

private:
    std::shared_ptr<const EmbeddingStore> store_;
    double threshold_;
};

}  // namespace reqterm::lex
