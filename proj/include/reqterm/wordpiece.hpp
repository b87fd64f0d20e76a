#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace reqterm::mlm {

// WordPiece vocabulary with greedy longest-match-first sub-word splitting and
// the basic whitespace/punctuation pre-tokenizer used by BERT-style models.
class WordPieceVocab {
public:
    // One piece per line; the id of a piece is its 0-based line number.
    static WordPieceVocab load(const std::filesystem::path& path);
    static WordPieceVocab from_tokens(const std::vector<std::string>& tokens);

    std::size_t size() const { return pieces_.size(); }
    // -1 when the piece is not in the vocabulary.
    int id_of(const std::string& piece) const;
    const std::string& piece_of(std::size_t id) const { return pieces_.at(id); }

    // Splits one word into pieces ("encryption" -> ["en", "##cry", ...]);
    // returns {"[UNK]"} when no cover exists.
    std::vector<std::string> wordpiece(const std::string& word) const;

    // Whitespace split, then punctuation characters become single tokens.
    static std::vector<std::string> basic_tokenize(const std::string& text, bool lower);

    // basic_tokenize + wordpiece over each word.
    std::vector<std::string> tokenize(const std::string& text, bool lower) const;

private:
    std::vector<std::string> pieces_;
    std::unordered_map<std::string, int> ids_;
};

}  // namespace reqterm::mlm
