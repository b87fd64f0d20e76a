#include "reqterm/lexical_similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reqterm/errors.hpp"

namespace reqterm::lex {

namespace {

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file: " + path.string());
    EmbeddingStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        if (token.empty()) continue;
        std::vector<double> vec;
        double v;
        while (ss >> v) vec.push_back(v);
        if (vec.empty()) {
            throw IoError("embedding line " + std::to_string(line_no) +
                          " has no values: " + path.string());
        }
        if (store.dimension_ == 0) {
            store.dimension_ = vec.size();
        } else if (vec.size() != store.dimension_) {
            throw IoError("embedding line " + std::to_string(line_no) + " has " +
                          std::to_string(vec.size()) + " values, expected " +
                          std::to_string(store.dimension_) + ": " + path.string());
        }
        store.vectors_.emplace(lower_ascii(token), std::move(vec));
    }
    return store;
}

EmbeddingStore EmbeddingStore::from_vectors(
    const std::unordered_map<std::string, std::vector<double>>& vectors) {
    EmbeddingStore store;
    for (const auto& [token, vec] : vectors) {
        if (store.dimension_ == 0) {
            store.dimension_ = vec.size();
        } else if (vec.size() != store.dimension_) {
            throw IoError("embedding vectors disagree on dimension");
        }
        store.vectors_.emplace(lower_ascii(token), vec);
    }
    return store;
}

const std::vector<double>* EmbeddingStore::find(const std::string& term) const {
    auto it = vectors_.find(lower_ascii(term));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<double> cosine(const EmbeddingStore& store, const std::string& a,
                             const std::string& b) {
    const std::vector<double>* va = store.find(a);
    const std::vector<double>* vb = store.find(b);
    if (!va || !vb) return std::nullopt;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < va->size(); ++i) {
        dot += (*va)[i] * (*vb)[i];
        na += (*va)[i] * (*va)[i];
        nb += (*vb)[i] * (*vb)[i];
    }
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

Matcher::Matcher(std::shared_ptr<const EmbeddingStore> store, double threshold)
    : store_(std::move(store)), threshold_(threshold) {
    if (!store_) store_ = std::make_shared<EmbeddingStore>();
    if (!(threshold_ > 0.0 && threshold_ <= 1.0)) {
        throw ConfigError("similarity threshold must be in (0,1], got " +
                          std::to_string(threshold_));
    }
}

bool Matcher::terms_match(const std::string& a, const std::string& b) const {
    std::string la = lower_ascii(a), lb = lower_ascii(b);
    if (la == lb) return true;
    auto sim = cosine(*store_, la, lb);
    return sim.has_value() && *sim >= threshold_;
}

}  // namespace reqterm::lex
