#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "json.hpp"
#include "mlm_local.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/wordpiece.hpp"

namespace reqterm::mlm {

namespace {

using Mat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXf;

// --- weights container --------------------------------------------------

struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<float> data;
};

// Binary weights file: magic "RTWB", u32 version, u32 tensor count, then per
// tensor u32 name length, name bytes, u32 ndim, u64 dims, f32 data row-major.
std::unordered_map<std::string, Tensor> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open weights file: " + path.string());
    auto fail = [&](const std::string& why) -> void {
        throw IoError("malformed weights file " + path.string() + ": " + why);
    };
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "RTWB") fail("bad magic");
    auto read_u32 = [&]() -> std::uint32_t {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in) fail("truncated");
        return v;
    };
    auto read_u64 = [&]() -> std::uint64_t {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in) fail("truncated");
        return v;
    };
    if (read_u32() != 1) fail("unsupported version");
    std::uint32_t count = read_u32();
    std::unordered_map<std::string, Tensor> tensors;
    tensors.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        std::uint32_t name_len = read_u32();
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) fail("truncated name");
        std::uint32_t ndim = read_u32();
        Tensor tensor;
        std::size_t total = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            std::size_t dim = static_cast<std::size_t>(read_u64());
            tensor.dims.push_back(dim);
            total *= dim;
        }
        tensor.data.resize(total);
        in.read(reinterpret_cast<char*>(tensor.data.data()),
                static_cast<std::streamsize>(total * sizeof(float)));
        if (!in) fail("truncated tensor data for " + name);
        tensors.emplace(std::move(name), std::move(tensor));
    }
    return tensors;
}

Mat as_matrix(const Tensor& t) {
    if (t.dims.size() != 2) throw IoError("tensor is not 2-d");
    return Eigen::Map<const Mat>(t.data.data(), static_cast<Eigen::Index>(t.dims[0]),
                                 static_cast<Eigen::Index>(t.dims[1]));
}

Vec as_vector(const Tensor& t) {
    if (t.dims.size() != 1) throw IoError("tensor is not 1-d");
    return Eigen::Map<const Vec>(t.data.data(), static_cast<Eigen::Index>(t.dims[0]));
}

// --- model ----------------------------------------------------------------

struct LayerWeights {
    Mat q_w, k_w, v_w;        // [H,H], HF layout [out,in]
    Vec q_b, k_b, v_b;
    Mat attn_out_w;           // [H,H]
    Vec attn_out_b;
    Vec attn_ln_g, attn_ln_b;
    Mat inter_w;              // [I,H]
    Vec inter_b;
    Mat out_w;                // [H,I]
    Vec out_b;
    Vec out_ln_g, out_ln_b;
};

float gelu_erf(float x) {
    return 0.5f * x * (1.0f + std::erf(x / std::sqrt(2.0f)));
}

void layer_norm_rows(Mat& x, const Vec& gamma, const Vec& beta, float eps) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        float mean = x.row(r).mean();
        float var = (x.row(r).array() - mean).square().mean();
        float inv = 1.0f / std::sqrt(var + eps);
        x.row(r) = ((x.row(r).array() - mean) * inv) * gamma.transpose().array() +
                   beta.transpose().array();
    }
}

class LocalTransformerBackend final : public Backend {
public:
    explicit LocalTransformerBackend(const std::filesystem::path& dir) : dir_(dir) {
        nlohmann::json cfg;
        try {
            std::ifstream in(dir / "config.json");
            cfg = nlohmann::json::parse(in);
        } catch (const std::exception& e) {
            throw IoError("cannot parse config.json: " + std::string(e.what()));
        }
        hidden_ = cfg.at("hidden_size").get<int>();
        layers_n_ = cfg.at("num_hidden_layers").get<int>();
        heads_ = cfg.at("num_attention_heads").get<int>();
        intermediate_ = cfg.at("intermediate_size").get<int>();
        max_pos_ = cfg.at("max_position_embeddings").get<int>();
        eps_ = cfg.value("layer_norm_eps", 1e-12);
        lower_case_ = cfg.value("do_lower_case", false);
        if (hidden_ % heads_ != 0) throw IoError("hidden_size not divisible by heads");

        vocab_ = WordPieceVocab::load(dir / "vocab.txt");
        cls_id_ = require_id("[CLS]");
        sep_id_ = require_id("[SEP]");
        mask_id_ = require_id("[MASK]");

        auto tensors = load_weights(dir / "weights.bin");
        auto want = [&](const std::string& name) -> const Tensor& {
            auto it = tensors.find(name);
            if (it == tensors.end()) {
                throw IoError("weights file is missing tensor '" + name + "'");
            }
            return it->second;
        };
        word_emb_ = as_matrix(want("bert.embeddings.word_embeddings.weight"));
        pos_emb_ = as_matrix(want("bert.embeddings.position_embeddings.weight"));
        type_emb_ = as_matrix(want("bert.embeddings.token_type_embeddings.weight"));
        emb_ln_g_ = as_vector(want("bert.embeddings.LayerNorm.weight"));
        emb_ln_b_ = as_vector(want("bert.embeddings.LayerNorm.bias"));
        layers_.resize(layers_n_);
        for (int i = 0; i < layers_n_; ++i) {
            const std::string p = "bert.encoder.layer." + std::to_string(i) + ".";
            LayerWeights& lw = layers_[i];
            lw.q_w = as_matrix(want(p + "attention.self.query.weight"));
            lw.q_b = as_vector(want(p + "attention.self.query.bias"));
            lw.k_w = as_matrix(want(p + "attention.self.key.weight"));
            lw.k_b = as_vector(want(p + "attention.self.key.bias"));
            lw.v_w = as_matrix(want(p + "attention.self.value.weight"));
            lw.v_b = as_vector(want(p + "attention.self.value.bias"));
            lw.attn_out_w = as_matrix(want(p + "attention.output.dense.weight"));
            lw.attn_out_b = as_vector(want(p + "attention.output.dense.bias"));
            lw.attn_ln_g = as_vector(want(p + "attention.output.LayerNorm.weight"));
            lw.attn_ln_b = as_vector(want(p + "attention.output.LayerNorm.bias"));
            lw.inter_w = as_matrix(want(p + "intermediate.dense.weight"));
            lw.inter_b = as_vector(want(p + "intermediate.dense.bias"));
            lw.out_w = as_matrix(want(p + "output.dense.weight"));
            lw.out_b = as_vector(want(p + "output.dense.bias"));
            lw.out_ln_g = as_vector(want(p + "output.LayerNorm.weight"));
            lw.out_ln_b = as_vector(want(p + "output.LayerNorm.bias"));
        }
        mlm_dense_w_ = as_matrix(want("cls.predictions.transform.dense.weight"));
        mlm_dense_b_ = as_vector(want("cls.predictions.transform.dense.bias"));
        mlm_ln_g_ = as_vector(want("cls.predictions.transform.LayerNorm.weight"));
        mlm_ln_b_ = as_vector(want("cls.predictions.transform.LayerNorm.bias"));
        mlm_bias_ = as_vector(want("cls.predictions.bias"));
        // the MLM decoder is tied to the word embeddings unless shipped separately
        if (auto it = tensors.find("cls.predictions.decoder.weight"); it != tensors.end()) {
            decoder_ = as_matrix(it->second);
        } else {
            decoder_ = word_emb_;
        }
        if (static_cast<std::size_t>(decoder_.rows()) != vocab_.size()) {
            throw IoError("decoder rows do not match vocab size");
        }
    }

    std::vector<ScoredPrediction> predict_masked(const MaskedQuery& q) const override {
        validate_query(q);
        // encode: [CLS] pieces... [SEP], the masked word is one [MASK] slot
        std::vector<int> ids;
        ids.push_back(cls_id_);
        std::size_t mask_pos = 0;
        for (std::size_t i = 0; i < q.tokens.size(); ++i) {
            if (i == q.mask_index) {
                mask_pos = ids.size();
                ids.push_back(mask_id_);
                continue;
            }
            for (const auto& piece : vocab_.tokenize(q.tokens[i], lower_case_)) {
                int id = vocab_.id_of(piece);
                ids.push_back(id >= 0 ? id : vocab_.id_of("[UNK]"));
            }
        }
        ids.push_back(sep_id_);
        if (ids.size() > static_cast<std::size_t>(max_pos_)) {
            throw QueryTooLong(ids.size(), static_cast<std::size_t>(max_pos_));
        }

        std::vector<double> probs = mask_probabilities(ids, mask_pos);
        std::vector<std::size_t> order(probs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probs[a] > probs[b];
        });
        std::vector<ScoredPrediction> out;
        out.reserve(q.k);
        for (std::size_t id : order) {
            const std::string& piece = vocab_.piece_of(id);
            if (!is_whole_word(piece)) continue;
            out.push_back({piece, probs[id]});
            if (out.size() == q.k) break;
        }
        return out;
    }

    std::size_t context_window() const override {
        return static_cast<std::size_t>(max_pos_);
    }
    std::string id() const override {
        return "local:" + dir_.filename().string();
    }

private:
    int require_id(const std::string& piece) const {
        int id = vocab_.id_of(piece);
        if (id < 0) throw IoError("vocab is missing special token " + piece);
        return id;
    }

    std::vector<double> mask_probabilities(const std::vector<int>& ids,
                                           std::size_t mask_pos) const {
        const auto S = static_cast<Eigen::Index>(ids.size());
        Mat x(S, hidden_);
        for (Eigen::Index s = 0; s < S; ++s) {
            x.row(s) = word_emb_.row(ids[s]) + pos_emb_.row(s) + type_emb_.row(0);
        }
        layer_norm_rows(x, emb_ln_g_, emb_ln_b_, static_cast<float>(eps_));

        const int dh = hidden_ / heads_;
        const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
        for (const LayerWeights& lw : layers_) {
            Mat Q = (x * lw.q_w.transpose()).rowwise() + lw.q_b.transpose();
            Mat K = (x * lw.k_w.transpose()).rowwise() + lw.k_b.transpose();
            Mat V = (x * lw.v_w.transpose()).rowwise() + lw.v_b.transpose();
            Mat ctx(S, hidden_);
            for (int h = 0; h < heads_; ++h) {
                auto Qh = Q.middleCols(h * dh, dh);
                auto Kh = K.middleCols(h * dh, dh);
                auto Vh = V.middleCols(h * dh, dh);
                Mat scores = (Qh * Kh.transpose()) * scale;
                for (Eigen::Index r = 0; r < S; ++r) {
                    float mx = scores.row(r).maxCoeff();
                    Eigen::ArrayXf e = (scores.row(r).array() - mx).exp();
                    scores.row(r) = (e / e.sum()).matrix();
                }
                ctx.middleCols(h * dh, dh) = scores * Vh;
            }
            Mat attn = (ctx * lw.attn_out_w.transpose()).rowwise() +
                       lw.attn_out_b.transpose();
            x += attn;
            layer_norm_rows(x, lw.attn_ln_g, lw.attn_ln_b, static_cast<float>(eps_));

            Mat inter = (x * lw.inter_w.transpose()).rowwise() + lw.inter_b.transpose();
            inter = inter.unaryExpr(&gelu_erf);
            Mat ffn = (inter * lw.out_w.transpose()).rowwise() + lw.out_b.transpose();
            x += ffn;
            layer_norm_rows(x, lw.out_ln_g, lw.out_ln_b, static_cast<float>(eps_));
        }

        Mat h = x.row(static_cast<Eigen::Index>(mask_pos));
        Mat t = (h * mlm_dense_w_.transpose()).rowwise() + mlm_dense_b_.transpose();
        t = t.unaryExpr(&gelu_erf);
        layer_norm_rows(t, mlm_ln_g_, mlm_ln_b_, static_cast<float>(eps_));
        Vec logits = (t * decoder_.transpose()).transpose().col(0) + mlm_bias_;

        // softmax in double for stable, comparable probabilities
        std::vector<double> probs(static_cast<std::size_t>(logits.size()));
        double mx = static_cast<double>(logits.maxCoeff());
        double sum = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            probs[i] = std::exp(static_cast<double>(logits[static_cast<Eigen::Index>(i)]) - mx);
            sum += probs[i];
        }
        for (double& p : probs) p /= sum;
        return probs;
    }

    std::filesystem::path dir_;
    int hidden_ = 0, layers_n_ = 0, heads_ = 0, intermediate_ = 0, max_pos_ = 0;
    double eps_ = 1e-12;
    bool lower_case_ = false;
    WordPieceVocab vocab_;
    int cls_id_ = 0, sep_id_ = 0, mask_id_ = 0;
    Mat word_emb_, pos_emb_, type_emb_;
    Vec emb_ln_g_, emb_ln_b_;
    std::vector<LayerWeights> layers_;
    Mat mlm_dense_w_;
    Vec mlm_dense_b_, mlm_ln_g_, mlm_ln_b_, mlm_bias_;
    Mat decoder_;
};

}  // namespace

BackendHandle load_local_backend(const std::filesystem::path& dir) {
    return std::make_shared<LocalTransformerBackend>(dir);
}

}  // namespace reqterm::mlm
