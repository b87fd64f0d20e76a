#ifdef REQTERM_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "json.hpp"
#include "reqterm/corpus_builder.hpp"
#include "reqterm/errors.hpp"

namespace reqterm::corpus {

namespace {

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

#ifdef REQTERM_HAVE_OPENSSL

// Direct title match via the public MediaWiki API: action=query with
// plain-text extracts, following redirects and title normalization.
class WikipediaFetcher final : public ArticleFetcher {
public:
    explicit WikipediaFetcher(const std::string& host) : host_(host) {}

    std::optional<Article> fetch(const std::string& phrase) override {
        httplib::SSLClient client(host_);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        client.set_follow_location(true);
        const std::string path =
            "/w/api.php?action=query&prop=extracts&explaintext=1&redirects=1"
            "&format=json&titles=" +
            url_encode(phrase);
        auto res = client.Get(path, {{"User-Agent", "reqterm-corpus-builder/1.0"}});
        if (!res) throw NetworkUnavailable(httplib::to_string(res.error()));
        if (res->status != 200) {
            throw NetworkUnavailable("HTTP " + std::to_string(res->status) +
                                     " from " + host_);
        }
        try {
            auto j = nlohmann::json::parse(res->body);
            const auto& pages = j.at("query").at("pages");
            for (const auto& [page_id, page] : pages.items()) {
                if (page_id == "-1") return std::nullopt;  // no such title
                if (!page.contains("extract")) return std::nullopt;
                std::string body = page.at("extract").get<std::string>();
                if (body.empty()) return std::nullopt;
                return Article{page.at("title").get<std::string>(), std::move(body)};
            }
        } catch (const nlohmann::json::exception& e) {
            throw NetworkUnavailable("unexpected API response: " + std::string(e.what()));
        }
        return std::nullopt;
    }

    std::string id() const override { return "wikipedia:" + host_; }

private:
    std::string host_;
};

#endif  // REQTERM_HAVE_OPENSSL

}  // namespace

std::unique_ptr<ArticleFetcher> make_wikipedia_fetcher(const std::string& host) {
#ifdef REQTERM_HAVE_OPENSSL
    return std::make_unique<WikipediaFetcher>(host);
#else
    (void)host;
    (void)url_encode;
    throw NetworkUnavailable("built without TLS support; use a warm cache");
#endif
}

}  // namespace reqterm::corpus
