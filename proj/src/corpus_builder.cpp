#include "reqterm/corpus_builder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"
#include "reqterm/seeds.hpp"

namespace reqterm::corpus {

namespace {

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CacheEntry {
    std::string phrase;
    bool found = false;
    std::string title;
    std::string body;
    std::string fetched_at;
};

std::filesystem::path cache_file(const std::filesystem::path& dir,
                                 const std::string& phrase) {
    return dir / (hash_hex(phrase) + ".json");
}

std::optional<CacheEntry> load_cache_entry(const std::filesystem::path& dir,
                                           const std::string& phrase) {
    auto path = cache_file(dir, phrase);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        auto j = nlohmann::json::parse(io::read_file(path));
        CacheEntry e;
        e.phrase = j.at("phrase").get<std::string>();
        e.found = j.at("found").get<bool>();
        e.title = j.value("title", "");
        e.body = j.value("body", "");
        e.fetched_at = j.value("fetched_at", "");
        return e;
    } catch (const std::exception&) {
        return std::nullopt;  // corrupt entry behaves like a miss
    }
}

void save_cache_entry(const std::filesystem::path& dir, const CacheEntry& e) {
    nlohmann::json j{{"phrase", e.phrase},
                     {"found", e.found},
                     {"title", e.title},
                     {"body", e.body},
                     {"fetched_at", e.fetched_at}};
    io::write_file(cache_file(dir, e.phrase), j.dump(2) + "\n");
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<CacheEntry>& entries) {
    nlohmann::json list = nlohmann::json::array();
    std::vector<const CacheEntry*> sorted;
    for (const auto& e : entries) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const CacheEntry* a, const CacheEntry* b) {
                  return a->phrase < b->phrase;
              });
    for (const CacheEntry* e : sorted) {
        list.push_back({{"phrase", e->phrase},
                        {"file", cache_file(dir, e->phrase).filename().string()},
                        {"found", e->found},
                        {"title", e->title},
                        {"fetched_at", e->fetched_at}});
    }
    io::write_file(dir / "manifest.json",
                   nlohmann::json{{"entries", list}}.dump(2) + "\n");
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

DomainCorpus build_corpus_impl(const std::vector<std::string>& phrases,
                               ArticleFetcher* fetcher,
                               const std::filesystem::path& cache_dir,
                               const std::string& source_doc_id) {
    std::filesystem::create_directories(cache_dir);

    std::vector<std::string> unique_phrases;
    std::unordered_set<std::string> seen_phrase;
    for (const auto& p : phrases) {
        if (!p.empty() && seen_phrase.insert(p).second) unique_phrases.push_back(p);
    }

    DomainCorpus corpus;
    corpus.source_doc_id = source_doc_id;
    std::vector<CacheEntry> touched;
    std::unordered_set<std::string> seen_title;
    bool network_failed = false;
    bool cache_only = fetcher == nullptr;
    bool fetched_live = false;

    for (const auto& phrase : unique_phrases) {
        std::optional<CacheEntry> entry = load_cache_entry(cache_dir, phrase);
        if (!entry && !cache_only) {
            try {
                if (fetched_live) {
                    // polite pacing between live requests
                    std::this_thread::sleep_for(std::chrono::milliseconds(100));
                }
                auto article = fetcher->fetch(phrase);
                fetched_live = true;
                CacheEntry e;
                e.phrase = phrase;
                e.fetched_at = iso8601_now();
                if (article) {
                    e.found = true;
                    e.title = article->title;
                    e.body = article->body;
                }
                save_cache_entry(cache_dir, e);
                entry = e;
            } catch (const NetworkUnavailable&) {
                network_failed = true;
                cache_only = true;  // degrade to cache-only for the rest
            }
        }
        if (!entry) continue;
        touched.push_back(*entry);
        if (!entry->found || is_blank(entry->body)) continue;
        if (!seen_title.insert(entry->title).second) continue;  // titles unique
        corpus.articles.push_back({entry->title, entry->body});
        corpus.fetched_at = std::max(corpus.fetched_at, entry->fetched_at);
    }

    write_manifest(cache_dir, touched);

    if (corpus.articles.empty()) {
        if (network_failed) {
            throw NetworkUnavailable("no cache entries and the fetcher is offline");
        }
        throw NoArticlesFound();
    }
    return corpus;
}

}  // namespace

std::vector<std::string> extract_keyphrases(const text::AnnotatedDocument& doc) {
    std::unordered_map<std::string, std::size_t> counts;
    std::unordered_map<std::string, std::size_t> words;  // phrase -> word count
    auto add = [&](const std::string& phrase, std::size_t n_words) {
        ++counts[phrase];
        words[phrase] = n_words;
    };
    for (const auto& sentence : doc.sentences) {
        std::size_t i = 0;
        while (i < sentence.size()) {
            if (sentence[i].pos != text::Pos::Noun) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < sentence.size() && sentence[j].pos == text::Pos::Noun) ++j;
            std::string run;
            for (std::size_t t = i; t < j; ++t) {
                if (t > i) run += ' ';
                run += sentence[t].lemma;
                if (j - i > 1) add(sentence[t].lemma, 1);
            }
            add(run, j - i);
            i = j;
        }
    }
    std::vector<std::string> out;
    out.reserve(counts.size());
    for (const auto& [phrase, _] : counts) out.push_back(phrase);
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        if (words[a] != words[b]) return words[a] > words[b];
        return a < b;
    });
    return out;
}

DomainCorpus build_corpus(const std::vector<std::string>& phrases, int depth,
                          ArticleFetcher& fetcher,
                          const std::filesystem::path& cache_dir,
                          const std::string& source_doc_id) {
    if (depth != 0) {
        throw ConfigError("only depth = 0 (direct title matches) is supported, got " +
                          std::to_string(depth));
    }
    return build_corpus_impl(phrases, &fetcher, cache_dir, source_doc_id);
}

DomainCorpus build_corpus_offline(const std::vector<std::string>& phrases,
                                  const std::filesystem::path& cache_dir,
                                  const std::string& source_doc_id) {
    return build_corpus_impl(phrases, nullptr, cache_dir, source_doc_id);
}

int CorpusStats::decile_of(const std::string& lemma) const {
    auto it = decile_.find(lemma);
    return it == decile_.end() ? 9 : it->second;
}

std::size_t CorpusStats::freq_of(const std::string& lemma) const {
    auto it = lemma_freq.find(lemma);
    return it == lemma_freq.end() ? 0 : it->second;
}

double CorpusStats::avg_tfidf(const std::string& lemma) const {
    if (article_count == 0) return 0.0;
    double sum = 0.0;
    for (const auto& vec : article_tfidf) {
        auto it = vec.find(lemma);
        if (it != vec.end()) sum += it->second;
    }
    return sum / static_cast<double>(article_count);
}

double CorpusStats::max_tfidf(const std::string& lemma) const {
    double mx = 0.0;
    for (const auto& vec : article_tfidf) {
        auto it = vec.find(lemma);
        if (it != vec.end()) mx = std::max(mx, it->second);
    }
    return mx;
}

CorpusStats compute_stats(const DomainCorpus& corpus) {
    if (corpus.articles.empty()) throw EmptyCorpus();
    CorpusStats stats;
    stats.article_count = corpus.articles.size();

    // per-article raw term frequencies over word-token lemmas
    std::vector<std::map<std::string, std::size_t>> tf(corpus.articles.size());
    for (std::size_t a = 0; a < corpus.articles.size(); ++a) {
        try {
            auto doc = text::parse_document(corpus.articles[a].body,
                                            corpus.articles[a].title);
            for (const auto& sentence : doc.sentences) {
                for (const auto& tok : sentence) {
                    if (text::is_word(tok)) ++tf[a][tok.lemma];
                }
            }
        } catch (const EmptyDocument&) {
            // an article without tokens contributes nothing
        }
        for (const auto& [lemma, count] : tf[a]) stats.lemma_freq[lemma] += count;
    }

    // smoothed idf as in the standard TF-IDF vectorizer: ln((1+n)/(1+df)) + 1
    const double n = static_cast<double>(corpus.articles.size());
    std::map<std::string, std::size_t> df;
    for (const auto& counts : tf) {
        for (const auto& [lemma, _] : counts) ++df[lemma];
    }
    stats.article_tfidf.resize(tf.size());
    for (std::size_t a = 0; a < tf.size(); ++a) {
        double norm_sq = 0.0;
        for (const auto& [lemma, count] : tf[a]) {
            double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df[lemma]))) + 1.0;
            double w = static_cast<double>(count) * idf;
            stats.article_tfidf[a][lemma] = w;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& [_, w] : stats.article_tfidf[a]) w *= inv;
        }
    }

    // frequency deciles over distinct lemmas; ties share a bin
    std::vector<std::size_t> freqs;
    freqs.reserve(stats.lemma_freq.size());
    for (const auto& [_, f] : stats.lemma_freq) freqs.push_back(f);
    std::sort(freqs.begin(), freqs.end(), std::greater<>());
    const std::size_t total = freqs.size();
    for (const auto& [lemma, f] : stats.lemma_freq) {
        std::size_t greater = static_cast<std::size_t>(
            std::lower_bound(freqs.begin(), freqs.end(), f, std::greater<>()) -
            freqs.begin());
        stats.decile_[lemma] = static_cast<int>((10 * greater) / total);
    }
    return stats;
}

}  // namespace reqterm::corpus
