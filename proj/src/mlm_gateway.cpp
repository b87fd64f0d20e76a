#include "reqterm/mlm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>

#include "mlm_local.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/seeds.hpp"

namespace reqterm::mlm {

void validate_query(const MaskedQuery& q) {
    if (q.tokens.empty()) throw InvalidQuery("token list is empty");
    if (q.mask_index >= q.tokens.size()) {
        throw InvalidQuery("mask_index " + std::to_string(q.mask_index) +
                           " out of range for " + std::to_string(q.tokens.size()) +
                           " tokens");
    }
    if (q.k < 1) throw InvalidQuery("k must be >= 1");
}

bool is_whole_word(const std::string& entry) {
    if (entry.empty()) return false;
    if (entry.size() >= 2 && entry[0] == '#' && entry[1] == '#') return false;
    if (entry.front() == '[' && entry.back() == ']') return false;
    return std::any_of(entry.begin(), entry.end(), [](unsigned char c) {
        return std::isalpha(c) || c >= 0x80;
    });
}

namespace {

// Deterministic offline backend. For every query it derives a seed from the
// token sequence and mask position (never from k, so a longer request is a
// superset of a shorter one), ranks a fixed vocabulary by a seeded shuffle,
// and assigns strictly decreasing confidences.
class StubBackend final : public Backend {
public:
    explicit StubBackend(std::uint64_t seed) : seed_(seed) {}

    std::vector<ScoredPrediction> predict_masked(const MaskedQuery& q) const override {
        validate_query(q);
        if (q.tokens.size() > context_window()) {
            throw QueryTooLong(q.tokens.size(), context_window());
        }
        std::string key;
        for (const auto& t : q.tokens) {
            key += t;
            key += '\x1f';
        }
        key += '\x1e';
        key += std::to_string(q.mask_index);
        std::mt19937_64 rng(derive_seed(seed_, key));

        const auto& vocab = stub_vocabulary();
        std::vector<std::size_t> order(vocab.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        std::uniform_real_distribution<double> u(0.0, 1.0);
        double conf = 0.50 + 0.45 * u(rng);
        std::vector<ScoredPrediction> out;
        out.reserve(q.k);
        for (std::size_t idx : order) {
            const std::string& entry = vocab[idx];
            double this_conf = conf;
            conf *= 0.55 + 0.40 * u(rng);  // strictly decreasing, stays in (0,1)
            if (!is_whole_word(entry)) continue;
            out.push_back({entry, this_conf});
            if (out.size() == q.k) break;
        }
        return out;
    }

    std::size_t context_window() const override { return 512; }
    std::string id() const override { return "stub:seed=" + std::to_string(seed_); }

private:
    static const std::vector<std::string>& stub_vocabulary() {
        static const std::vector<std::string> vocab = {
            // plausible requirement-domain words
            "system", "service", "network", "security", "performance", "data",
            "user", "access", "server", "client", "interface", "message",
            "request", "response", "error", "failure", "recovery", "backup",
            "configuration", "session", "password", "account", "database",
            "record", "report", "status", "update", "upgrade", "maintenance",
            "availability", "reliability", "stability", "integrity", "accuracy",
            "efficiency", "latency", "throughput", "bandwidth", "capacity",
            "traffic", "protocol", "encryption", "authentication", "authorization",
            "validation", "verification", "monitoring", "logging", "notification",
            "alert", "event", "trigger", "schedule", "timeout", "retry",
            "provide", "support", "ensure", "require", "allow", "enable",
            "display", "store", "send", "receive", "process", "manage",
            "create", "remove", "delete", "modify", "retrieve", "transmit",
            "encrypt", "decrypt", "validate", "verify", "monitor", "record",
            "notify", "respond", "restart", "resume", "suspend", "terminate",
            "operation", "function", "module", "component", "resource",
            "memory", "storage", "processor", "device", "hardware", "software",
            "document", "file", "folder", "directory", "page", "screen",
            "window", "menu", "button", "field", "value", "parameter",
            "option", "setting", "default", "limit", "threshold", "range",
            "quality", "safety", "privacy", "consistency", "compliance",
            "audit", "policy", "rule", "constraint", "condition", "state",
            "mode", "level", "priority", "category", "type", "format",
            "version", "release", "environment", "platform", "architecture",
            "design", "implementation", "test", "deployment", "installation",
            "connection", "channel", "link", "node", "cluster", "instance",
            "transaction", "query", "key", "index", "table", "schema",
            "certificate", "credential", "token", "signature", "checksum",
            "frequency", "duration", "interval", "period", "deadline",
            "capability", "feature", "behavior", "result", "output", "input",
            "source", "target", "destination", "origin", "location", "address",
            "identifier", "name", "label", "title", "description", "content",
            "people", "time", "way", "day", "thing", "world", "life", "hand",
            "part", "place", "work", "case", "point", "company", "number",
            "group", "problem", "fact",
            // pieces and specials the gateway must drop
            "##ing", "##tion", "##er", "##ment", "##s", "##ly", "##al",
            "[unused0]", "[unused1]", "[CLS]", "[SEP]", "[MASK]", "[PAD]",
            "[UNK]", "1", "2", "42", "...", ".", ",",
        };
        return vocab;
    }

    std::uint64_t seed_;
};

}  // namespace

BackendHandle load_backend(const std::string& spec) {
    if (spec == "stub") return std::make_shared<StubBackend>(7);
    if (spec.rfind("stub:", 0) == 0) {
        const std::string rest = spec.substr(5);
        const std::string key = "seed=";
        if (rest.rfind(key, 0) == 0) {
            try {
                std::size_t pos = 0;
                std::uint64_t seed = std::stoull(rest.substr(key.size()), &pos);
                if (pos == rest.size() - key.size()) {
                    return std::make_shared<StubBackend>(seed);
                }
            } catch (const std::exception&) {
                // fall through to ModelNotFound
            }
        }
        throw ModelNotFound(spec);
    }
    std::filesystem::path dir(spec);
    if (std::filesystem::is_directory(dir) &&
        std::filesystem::exists(dir / "config.json") &&
        std::filesystem::exists(dir / "vocab.txt") &&
        std::filesystem::exists(dir / "weights.bin")) {
        return load_local_backend(dir);
    }
    throw ModelNotFound(spec);
}

}  // namespace reqterm::mlm
