#include "reqterm/wordpiece.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "reqterm/errors.hpp"

namespace reqterm::mlm {

namespace {

bool is_punct_byte(unsigned char c) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
}

constexpr std::size_t kMaxWordChars = 100;

}  // namespace

WordPieceVocab WordPieceVocab::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocab file: " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.push_back(line);
    }
    // a trailing empty line is an artifact, interior empties are real ids
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    return from_tokens(tokens);
}

WordPieceVocab WordPieceVocab::from_tokens(const std::vector<std::string>& tokens) {
    WordPieceVocab v;
    v.pieces_ = tokens;
    v.ids_.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        v.ids_.emplace(tokens[i], static_cast<int>(i));
    }
    return v;
}

int WordPieceVocab::id_of(const std::string& piece) const {
    auto it = ids_.find(piece);
    return it == ids_.end() ? -1 : it->second;
}

std::vector<std::string> WordPieceVocab::wordpiece(const std::string& word) const {
    if (word.size() > kMaxWordChars) return {"[UNK]"};
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start < word.size()) {
        std::size_t end = word.size();
        std::string cur;
        bool found = false;
        while (end > start) {
            std::string sub = word.substr(start, end - start);
            if (start > 0) sub = "##" + sub;
            if (ids_.count(sub)) {
                cur = std::move(sub);
                found = true;
                break;
            }
            --end;
        }
        if (!found) return {"[UNK]"};
        pieces.push_back(std::move(cur));
        start = end;
    }
    if (pieces.empty()) return {"[UNK]"};
    return pieces;
}

std::vector<std::string> WordPieceVocab::basic_tokenize(const std::string& text,
                                                        bool lower) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (is_punct_byte(c)) {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        } else {
            cur += lower ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
        }
    }
    flush();
    return out;
}

std::vector<std::string> WordPieceVocab::tokenize(const std::string& text,
                                                  bool lower) const {
    std::vector<std::string> out;
    for (const auto& word : basic_tokenize(text, lower)) {
        for (auto& piece : wordpiece(word)) out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace reqterm::mlm
