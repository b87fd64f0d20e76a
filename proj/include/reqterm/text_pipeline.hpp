#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace reqterm::text {

// Coarse tag set. Everything that is not a content word (determiners,
// prepositions, auxiliaries, numbers, punctuation, ...) maps to Other.
enum class Pos { Noun, Verb, Adj, Adv, Other };

const char* pos_name(Pos pos);
Pos pos_from_name(const std::string& name);

struct Token {
    std::string surface;
    std::string lemma;  // lower-cased lemma form; empty only for tokens without letters
    Pos pos = Pos::Other;
    std::size_t char_offset = 0;  // byte offset of the first character in the source text
};

using Sentence = std::vector<Token>;

struct AnnotatedDocument {
    std::string doc_id;
    std::vector<Sentence> sentences;  // every sentence has >= 1 token
    std::string source_text;

    std::size_t token_count() const;
};

// Deduplicated lemma set of word tokens (tokens containing at least one letter).
struct TermSet {
    std::set<std::string> lemmas;

    bool contains(const std::string& lemma) const { return lemmas.count(lemma) > 0; }
    std::size_t size() const { return lemmas.size(); }
    bool empty() const { return lemmas.empty(); }
};

// Common-word and vague/stopword lists. File format: one entry per line,
// '#' starts a comment line. Entries are lemma-normalized on load so that
// inflected entries still match lemmatized predictions.
class Wordlists {
public:
    static Wordlists load(const std::filesystem::path& common_250_path,
                          const std::filesystem::path& vague_stop_path);
    static Wordlists from_words(const std::vector<std::string>& common_250,
                                const std::vector<std::string>& vague_stop);

    const std::set<std::string>& common_250() const { return common_250_; }
    const std::set<std::string>& vague_stop() const { return vague_stop_; }
    const std::set<std::string>& combined() const { return combined_; }
    bool contains(const std::string& lemma) const { return combined_.count(lemma) > 0; }

private:
    std::set<std::string> common_250_;
    std::set<std::string> vague_stop_;
    std::set<std::string> combined_;
};

// Splits text into sentences, tokenizes, and annotates every token with a
// coarse POS tag and a lower-cased lemma. Throws EmptyDocument when the text
// contains no token at all.
AnnotatedDocument parse_document(const std::string& text, const std::string& doc_id);

// Lemmatizes one word outside any sentence context, with the same rules the
// parser applies. Used for normalizing predictions and wordlist entries.
std::string lemmatize(const std::string& word);

// True when the token counts as a word (contains at least one letter).
bool is_word(const Token& token);

// U(Lem(tokens)): deduplicated lemma set over all word tokens.
TermSet term_set(const AnnotatedDocument& doc);

// (withheld - disclosed) - combined wordlists.
TermSet novel_terms(const TermSet& withheld, const TermSet& disclosed, const Wordlists& wl);

// Renders the document back to plain text with one blank line between
// sentences, so that re-parsing yields the same sentence partition.
std::string detokenize(const AnnotatedDocument& doc);

}  // namespace reqterm::text
