#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqterm/text_pipeline.hpp"

namespace reqterm::corpus {

struct Article {
    std::string title;
    std::string body;  // plain-text extract, non-empty
};

struct DomainCorpus {
    std::vector<Article> articles;  // titles unique
    std::string source_doc_id;
    std::string fetched_at;  // ISO-8601 UTC of the newest cache entry used
};

// Corpus statistics consumed by the frequency/TF-IDF features. Lemmas come
// from the same text pipeline as documents and predictions.
struct CorpusStats {
    std::size_t article_count = 0;
    std::map<std::string, std::size_t> lemma_freq;  // corpus-wide counts
    // per-article TF-IDF vectors, L2-normalized; sparse (absent lemma = 0)
    std::vector<std::map<std::string, double>> article_tfidf;

    // Decile by frequency rank over distinct lemmas: 0 = most frequent ten
    // percentile, 9 = least; ties share a bin; unseen lemmas map to 9.
    int decile_of(const std::string& lemma) const;
    std::size_t freq_of(const std::string& lemma) const;  // unseen -> 0
    // Average / maximum normalized TF-IDF across all articles (absent = 0).
    double avg_tfidf(const std::string& lemma) const;
    double max_tfidf(const std::string& lemma) const;

private:
    friend CorpusStats compute_stats(const DomainCorpus& corpus);
    std::map<std::string, int> decile_;
};

// Source of articles for key phrases. fetch returns the article whose title
// directly matches the phrase (after normalization/redirects), or nullopt.
// Implementations throw NetworkUnavailable on transport failure.
class ArticleFetcher {
public:
    virtual ~ArticleFetcher() = default;
    virtual std::optional<Article> fetch(const std::string& phrase) = 0;
    virtual std::string id() const = 0;
};

// Live fetcher against the public Wikipedia HTTP API (TLS). Only constructed
// on demand; all tests and offline runs use the cache or a fake.
std::unique_ptr<ArticleFetcher> make_wikipedia_fetcher(const std::string& host =
                                                           "en.wikipedia.org");

// Salient noun phrases of the document, deduplicated, ranked by descending
// occurrence count (ties: lexicographic). Phrases are lemma-joined.
std::vector<std::string> extract_keyphrases(const text::AnnotatedDocument& doc);

// One article per phrase with a direct title match, cached on disk under
// cache_dir (one JSON file per phrase plus a manifest). Offline runs degrade
// to cache-only mode. depth must be 0. Throws NoArticlesFound when nothing
// matches anywhere, NetworkUnavailable when offline with a cold cache.
DomainCorpus build_corpus(const std::vector<std::string>& phrases, int depth,
                          ArticleFetcher& fetcher,
                          const std::filesystem::path& cache_dir,
                          const std::string& source_doc_id);

// Cache-only variant: never touches the network.
DomainCorpus build_corpus_offline(const std::vector<std::string>& phrases,
                                  const std::filesystem::path& cache_dir,
                                  const std::string& source_doc_id);

// Frequency, decile, and per-article normalized TF-IDF tables.
// Throws EmptyCorpus when the corpus has no articles.
CorpusStats compute_stats(const DomainCorpus& corpus);

}  // namespace reqterm::corpus
