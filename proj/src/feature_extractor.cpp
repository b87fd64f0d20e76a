#include "reqterm/feature_extractor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"

namespace reqterm::features {

namespace {

constexpr const char* kSchemaVersion = "reqterm-matrix v1";

const char* kColumns =
    "doc_id,sentence_index,token_index,masked_surface,masked_lemma,masked_pos,"
    "masked_offset,term,lemma,confidence,"
    "f1,f2,f3,f4,f5,f6,f7,f8,f9,f9_defined,f10,f11,f12,f13,label";

}  // namespace

const char* FeatureMatrix::schema_version() { return kSchemaVersion; }
std::string FeatureMatrix::header() { return kColumns; }

text::Pos pos_in_context(const engine::PredictionRecord& record,
                         const text::AnnotatedDocument& doc) {
    const text::Sentence& sentence =
        doc.sentences.at(record.instance.sentence_index);
    std::string rebuilt;
    std::size_t substituted_offset = 0;
    for (std::size_t t = 0; t < sentence.size(); ++t) {
        if (t) rebuilt += ' ';
        if (t == record.instance.token_index) {
            substituted_offset = rebuilt.size();
            rebuilt += record.term;
        } else {
            rebuilt += sentence[t].surface;
        }
    }
    auto reparsed = text::parse_document(rebuilt, doc.doc_id + "#subst");
    for (const auto& s : reparsed.sentences) {
        for (const auto& tok : s) {
            if (tok.char_offset == substituted_offset) return tok.pos;
        }
    }
    return text::Pos::Other;  // unreachable for whole-word predictions
}

std::map<std::string, int> prediction_deciles(
    const std::vector<engine::PredictionRecord>& preds) {
    std::map<std::string, std::size_t> counts;
    for (const auto& rec : preds) ++counts[rec.lemma];
    std::map<std::string, int> deciles;
    if (counts.empty()) return deciles;
    std::vector<std::size_t> freqs;
    freqs.reserve(counts.size());
    for (const auto& [_, f] : counts) freqs.push_back(f);
    std::sort(freqs.begin(), freqs.end(), std::greater<>());
    const std::size_t total = freqs.size();
    for (const auto& [lemma, f] : counts) {
        std::size_t greater = static_cast<std::size_t>(
            std::lower_bound(freqs.begin(), freqs.end(), f, std::greater<>()) -
            freqs.begin());
        deciles[lemma] = static_cast<int>((10 * greater) / total);
    }
    return deciles;
}

namespace {

FeatureVector compute_vector_impl(const engine::PredictionRecord& record,
                                  const text::AnnotatedDocument& doc,
                                  const std::map<std::string, int>& deciles,
                                  const corpus::CorpusStats* stats,
                                  const lex::Matcher& sim) {
    FeatureVector v;
    const text::Token& masked = record.instance.masked_word;
    v.f1 = masked.pos;
    v.f2 = pos_in_context(record, doc);
    v.f3 = v.f1 == v.f2;
    v.f4 = static_cast<int>(masked.surface.size());
    v.f5 = static_cast<int>(record.term.size());
    int mn = std::min(v.f4, v.f5), mx = std::max(v.f4, v.f5);
    v.f6 = mx > 0 ? static_cast<double>(mn) / static_cast<double>(mx) : 1.0;
    v.f7 = record.confidence;
    v.f8 = static_cast<int>(lex::levenshtein(record.term, masked.surface));
    auto cos = lex::cosine(sim.store(), record.lemma, masked.lemma);
    v.f9_defined = cos.has_value();
    v.f9 = cos.value_or(0.0);
    if (auto it = deciles.find(record.lemma); it != deciles.end()) v.f10 = it->second;
    if (stats) {
        v.f11 = stats->decile_of(record.lemma);
        v.f12 = stats->avg_tfidf(record.lemma);
        v.f13 = stats->max_tfidf(record.lemma);
    }
    return v;
}

}  // namespace

FeatureVector compute_vector(const engine::PredictionRecord& record,
                             const text::AnnotatedDocument& doc,
                             const std::vector<engine::PredictionRecord>& all_preds,
                             const corpus::CorpusStats* stats,
                             const lex::Matcher& sim) {
    return compute_vector_impl(record, doc, prediction_deciles(all_preds), stats, sim);
}

FeatureMatrix build_matrix(const std::vector<engine::PredictionRecord>& preds,
                           const text::AnnotatedDocument& doc,
                           const corpus::CorpusStats* stats, const lex::Matcher& sim) {
    FeatureMatrix matrix;
    matrix.rows.reserve(preds.size());
    auto deciles = prediction_deciles(preds);
    for (const auto& rec : preds) {
        MatrixRow row;
        row.doc_id = doc.doc_id;
        row.record = rec;
        row.features = compute_vector_impl(rec, doc, deciles, stats, sim);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

void save_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path) {
    std::string out;
    out += "# ";
    out += kSchemaVersion;
    out += '\n';
    out += kColumns;
    out += '\n';
    for (const auto& row : matrix.rows) {
        const auto& v = row.features;
        const auto& rec = row.record;
        out += io::csv_join({
            row.doc_id,
            std::to_string(rec.instance.sentence_index),
            std::to_string(rec.instance.token_index),
            rec.instance.masked_word.surface,
            rec.instance.masked_word.lemma,
            text::pos_name(rec.instance.masked_word.pos),
            std::to_string(rec.instance.masked_word.char_offset),
            rec.term,
            rec.lemma,
            io::fmt_double(rec.confidence),
            text::pos_name(v.f1),
            text::pos_name(v.f2),
            v.f3 ? "1" : "0",
            std::to_string(v.f4),
            std::to_string(v.f5),
            io::fmt_double(v.f6),
            io::fmt_double(v.f7),
            std::to_string(v.f8),
            io::fmt_double(v.f9),
            v.f9_defined ? "1" : "0",
            std::to_string(v.f10),
            std::to_string(v.f11),
            io::fmt_double(v.f12),
            io::fmt_double(v.f13),
            row.label ? std::to_string(*row.label) : "",
        });
        out += '\n';
    }
    io::write_file(path, out);
}

FeatureMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatch(kSchemaVersion, "<empty file>");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != std::string("# ") + kSchemaVersion) {
        throw SchemaMismatch(kSchemaVersion, line);
    }
    if (!std::getline(in, line)) throw SchemaMismatch(kColumns, "<missing header>");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kColumns) throw SchemaMismatch(kColumns, line);

    FeatureMatrix matrix;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = io::csv_split(line);
        if (f.size() != 25) {
            throw IoError("matrix row has " + std::to_string(f.size()) +
                          " fields, expected 25");
        }
        MatrixRow row;
        std::size_t i = 0;
        row.doc_id = f[i++];
        row.record.instance.sentence_index = std::stoull(f[i++]);
        row.record.instance.token_index = std::stoull(f[i++]);
        row.record.instance.masked_word.surface = f[i++];
        row.record.instance.masked_word.lemma = f[i++];
        row.record.instance.masked_word.pos = text::pos_from_name(f[i++]);
        row.record.instance.masked_word.char_offset = std::stoull(f[i++]);
        row.record.term = f[i++];
        row.record.lemma = f[i++];
        row.record.confidence = std::stod(f[i++]);
        auto& v = row.features;
        v.f1 = text::pos_from_name(f[i++]);
        v.f2 = text::pos_from_name(f[i++]);
        v.f3 = f[i++] == "1";
        v.f4 = std::stoi(f[i++]);
        v.f5 = std::stoi(f[i++]);
        v.f6 = std::stod(f[i++]);
        v.f7 = std::stod(f[i++]);
        v.f8 = std::stoi(f[i++]);
        v.f9 = std::stod(f[i++]);
        v.f9_defined = f[i++] == "1";
        v.f10 = std::stoi(f[i++]);
        v.f11 = std::stoi(f[i++]);
        v.f12 = std::stod(f[i++]);
        v.f13 = std::stod(f[i++]);
        if (!f[i].empty()) row.label = std::stoi(f[i]);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace reqterm::features
