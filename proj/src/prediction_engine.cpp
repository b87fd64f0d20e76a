#include "reqterm/prediction_engine.hpp"

#include <future>
#include <thread>

#include "reqterm/errors.hpp"

namespace reqterm::engine {

std::vector<MaskInstance> enumerate_masks(const text::AnnotatedDocument& doc) {
    std::vector<MaskInstance> out;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const text::Sentence& sentence = doc.sentences[s];
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            const text::Token& tok = sentence[t];
            if (tok.pos == text::Pos::Noun || tok.pos == text::Pos::Verb) {
                out.push_back({s, t, tok});
            }
        }
    }
    return out;
}

namespace {

std::vector<PredictionRecord> predict_sentence(const text::AnnotatedDocument& doc,
                                               std::size_t sentence_index,
                                               const mlm::Backend& backend,
                                               std::size_t k) {
    const text::Sentence& sentence = doc.sentences[sentence_index];
    std::vector<std::string> surfaces;
    surfaces.reserve(sentence.size());
    for (const auto& tok : sentence) surfaces.push_back(tok.surface);

    std::vector<PredictionRecord> out;
    for (std::size_t t = 0; t < sentence.size(); ++t) {
        const text::Token& tok = sentence[t];
        if (tok.pos != text::Pos::Noun && tok.pos != text::Pos::Verb) continue;
        mlm::MaskedQuery q;
        q.tokens = surfaces;
        q.mask_index = t;
        q.k = k;
        std::vector<mlm::ScoredPrediction> preds;
        try {
            preds = backend.predict_masked(q);
        } catch (const Error&) {
            std::throw_with_nested(
                Error("prediction failed at sentence " + std::to_string(sentence_index) +
                      " token " + std::to_string(t) + " ('" + tok.surface + "')"));
        }
        for (auto& p : preds) {
            out.push_back({{sentence_index, t, tok}, p.term, text::lemmatize(p.term),
                           p.confidence});
        }
    }
    return out;
}

}  // namespace

std::vector<PredictionRecord> collect_predictions(const text::AnnotatedDocument& doc,
                                                  const mlm::Backend& backend,
                                                  std::size_t k) {
    if (k < 1) throw InvalidQuery("k must be >= 1");
    const std::size_t n = doc.sentences.size();
    std::vector<std::future<std::vector<PredictionRecord>>> futures;
    futures.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        futures.push_back(std::async(std::launch::async | std::launch::deferred,
                                     predict_sentence, std::cref(doc), s,
                                     std::cref(backend), k));
    }
    std::vector<PredictionRecord> bag;
    for (auto& f : futures) {  // in-order assembly; errors surface lowest-index first
        auto part = f.get();
        bag.insert(bag.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return bag;
}

std::vector<PredictionRecord> basic_filter(const std::vector<PredictionRecord>& bag,
                                           const text::TermSet& disclosed,
                                           const text::Wordlists& wl) {
    std::vector<PredictionRecord> out;
    out.reserve(bag.size());
    for (const auto& rec : bag) {
        if (disclosed.contains(rec.lemma) || wl.contains(rec.lemma)) continue;
        out.push_back(rec);
    }
    return out;
}

}  // namespace reqterm::engine
