#include "reqterm/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/evaluation_harness.hpp"
#include "reqterm/feature_extractor.hpp"
#include "reqterm/io_util.hpp"
#include "reqterm/seeds.hpp"

namespace reqterm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kPresets{"none", "strict", "moderate", "lenient"};

std::string opt_cell(const std::optional<double>& v) {
    return v ? io::fmt_double(*v) : "";
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string file_hash(const std::string& path) {
    return path.empty() ? "none" : hash_hex(io::read_file(path));
}

// assigns only keys present in the file, so flags and env keep their
// documented precedence
void merge_config(RunConfig& cfg, const fs::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse config file '" + path.string() +
                          "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "inputs") cfg.inputs = value.get<std::vector<std::string>>();
            else if (key == "backend") cfg.backend = value.get<std::string>();
            else if (key == "k") cfg.k = value.get<int>();
            else if (key == "preset") cfg.preset = value.get<std::string>();
            else if (key == "models_dir") cfg.models_dir = value.get<std::string>();
            else if (key == "common_words") cfg.common_words = value.get<std::string>();
            else if (key == "vague_words") cfg.vague_words = value.get<std::string>();
            else if (key == "embeddings") cfg.embeddings = value.get<std::string>();
            else if (key == "corpus_cache") cfg.corpus_cache = value.get<std::string>();
            else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else if (key == "ks") cfg.ks = value.get<std::vector<int>>();
            else if (key == "repeats") cfg.repeats = value.get<int>();
            else if (key == "split_ratio") cfg.split_ratio = value.get<double>();
            else if (key == "plots") cfg.plots = value.get<bool>();
            else if (key == "online") cfg.online = value.get<bool>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

// Everything the pipeline commands share, loaded once per run.
struct LoadedRun {
    mlm::BackendHandle backend;
    text::Wordlists wordlists;
    lex::Matcher matcher{nullptr};
    std::shared_ptr<corpus::CorpusStats> stats;  // null without a corpus cache
    std::vector<text::AnnotatedDocument> docs;
    json provenance;
};

std::vector<text::AnnotatedDocument> parse_inputs(const RunConfig& cfg) {
    std::vector<text::AnnotatedDocument> docs;
    std::set<std::string> seen;
    for (const auto& input : cfg.inputs) {
        const std::string doc_id = fs::path(input).stem().string();
        if (!seen.insert(doc_id).second)
            throw ConfigError("two inputs share the document id '" + doc_id + "'");
        docs.push_back(text::parse_document(io::read_file(input), doc_id));
    }
    return docs;
}

LoadedRun load_run(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.common_words.empty())
        throw ConfigError(
            "a common-word list is required; pass --common-words (see "
            "data/wordlists/common_250.txt)");

    LoadedRun run;
    run.backend = mlm::load_backend(cfg.backend);
    run.wordlists = text::Wordlists::from_words(
        io::read_list_file(cfg.common_words),
        cfg.vague_words.empty() ? std::vector<std::string>{}
                                : io::read_list_file(cfg.vague_words));
    if (!cfg.embeddings.empty())
        run.matcher = lex::Matcher(std::make_shared<lex::EmbeddingStore>(
            lex::EmbeddingStore::load(cfg.embeddings)));
    run.docs = parse_inputs(cfg);
    if (!cfg.corpus_cache.empty()) {
        std::vector<std::string> phrases;
        for (const auto& doc : run.docs)
            for (auto& p : corpus::extract_keyphrases(doc)) phrases.push_back(p);
        auto corpus =
            corpus::build_corpus_offline(phrases, cfg.corpus_cache, "combined");
        run.stats = std::make_shared<corpus::CorpusStats>(
            corpus::compute_stats(corpus));
    }
    run.provenance = {
        {"backend", run.backend->id()},
        {"common_words_hash", file_hash(cfg.common_words)},
        {"vague_words_hash", file_hash(cfg.vague_words)},
        {"embeddings_hash", file_hash(cfg.embeddings)},
        {"corpus_articles", run.stats ? run.stats->article_count : 0},
        {"master_seed", cfg.master_seed},
        {"k", cfg.k},
        {"preset", cfg.preset},
    };
    return run;
}

eval::HarnessContext make_context(const RunConfig& cfg, const LoadedRun& run) {
    eval::HarnessContext ctx;
    ctx.backend = run.backend;
    ctx.wordlists = run.wordlists;
    ctx.matcher = run.matcher;
    ctx.stats = run.stats.get();
    ctx.k = cfg.k;
    ctx.split_ratio = cfg.split_ratio;
    ctx.master_seed = cfg.master_seed;
    return ctx;
}

fs::path out_file(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return fs::path(cfg.output_dir) / name;
}

void emit(CommandResult& res, const fs::path& path, const std::string& content) {
    io::write_file(path, content);
    res.outputs.push_back(path);
}

void emit_json(CommandResult& res, const fs::path& path, const json& j) {
    emit(res, path, j.dump(2) + "\n");
}

// the effective-config dump that makes every run replayable
void finish(CommandResult& res, const RunConfig& cfg) {
    const auto path = out_file(cfg, "config.json");
    save_config(cfg, path);
    res.outputs.push_back(path);
}

filter::FilterModel load_preset_model(const RunConfig& cfg,
                                      const std::string& preset) {
    const fs::path path = fs::path(cfg.models_dir) / (preset + ".json");
    if (!fs::exists(path))
        throw ConfigError("preset '" + preset + "' needs a trained model at '" +
                          path.string() + "'; run train-filter first");
    return filter::load_model(path);
}

std::string mask_context(const text::AnnotatedDocument& doc,
                         const engine::MaskInstance& inst) {
    std::string s;
    const auto& sent = doc.sentences[inst.sentence_index];
    for (std::size_t j = 0; j < sent.size(); ++j) {
        if (!s.empty()) s += ' ';
        if (j == inst.token_index)
            s += '[' + sent[j].surface + ']';
        else
            s += sent[j].surface;
    }
    return s;
}

std::vector<std::string> feature_cells(const features::FeatureVector& f) {
    return {text::pos_name(f.f1),
            text::pos_name(f.f2),
            f.f3 ? "1" : "0",
            std::to_string(f.f4),
            std::to_string(f.f5),
            io::fmt_double(f.f6),
            io::fmt_double(f.f7),
            std::to_string(f.f8),
            f.f9_defined ? io::fmt_double(f.f9) : "",
            f.f9_defined ? "1" : "0",
            std::to_string(f.f10),
            std::to_string(f.f11),
            io::fmt_double(f.f12),
            io::fmt_double(f.f13)};
}

json features_json(const features::FeatureVector& f) {
    return {{"f1", text::pos_name(f.f1)},
            {"f2", text::pos_name(f.f2)},
            {"f3", f.f3},
            {"f4", f.f4},
            {"f5", f.f5},
            {"f6", f.f6},
            {"f7", f.f7},
            {"f8", f.f8},
            {"f9", f.f9_defined ? json(f.f9) : json(nullptr)},
            {"f10", f.f10},
            {"f11", f.f11},
            {"f12", f.f12},
            {"f13", f.f13}};
}

json expiii_json(const std::vector<eval::EvaluationReport>& reports) {
    json rows = json::array();
    for (const auto& r : reports)
        rows.push_back({{"doc_id", r.doc_id},
                        {"repeat", r.repeat},
                        {"k", r.k},
                        {"filter_mode", r.filter_mode},
                        {"run_seed", r.run_seed},
                        {"accuracy", opt_json(r.accuracy)},
                        {"coverage", opt_json(r.coverage)},
                        {"cls_accuracy", opt_json(r.cls_accuracy)},
                        {"cls_precision", opt_json(r.cls_precision)},
                        {"cls_recall", opt_json(r.cls_recall)}});
    return rows;
}

std::string expiii_csv(const std::vector<eval::EvaluationReport>& reports) {
    std::string csv =
        "doc_id,repeat,k,filter_mode,run_seed,accuracy,coverage,"
        "cls_accuracy,cls_precision,cls_recall\n";
    for (const auto& r : reports)
        csv += io::csv_join({r.doc_id, std::to_string(r.repeat),
                             std::to_string(r.k), r.filter_mode,
                             std::to_string(r.run_seed), opt_cell(r.accuracy),
                             opt_cell(r.coverage), opt_cell(r.cls_accuracy),
                             opt_cell(r.cls_precision), opt_cell(r.cls_recall)}) +
               "\n";
    return csv;
}

// per-metric box plots over the simulation rows, grouped by k level
void emit_expi_plots(CommandResult& res, const RunConfig& cfg,
                     const std::vector<eval::ExpiRow>& rows) {
    std::vector<int> levels;
    for (const auto& row : rows) levels.push_back(row.k);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<std::pair<std::string, std::vector<double>>> acc, cov;
    for (int k : levels) {
        acc.push_back({"k=" + std::to_string(k), {}});
        cov.push_back({"k=" + std::to_string(k), {}});
        for (const auto& row : rows) {
            if (row.k != k) continue;
            if (row.accuracy) acc.back().second.push_back(*row.accuracy);
            if (row.coverage) cov.back().second.push_back(*row.coverage);
        }
    }
    auto acc_path = out_file(cfg, "accuracy.svg");
    write_box_plot(acc_path, "Accuracy by prediction count", "accuracy", acc);
    res.outputs.push_back(acc_path);
    auto cov_path = out_file(cfg, "coverage.svg");
    write_box_plot(cov_path, "Coverage by prediction count", "coverage", cov);
    res.outputs.push_back(cov_path);
}

std::optional<double> mean_defined(const std::vector<std::optional<double>>& vs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : vs)
        if (v) {
            sum += *v;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace

RunConfig load_config(const fs::path& path) {
    RunConfig cfg;
    merge_config(cfg, path);
    return cfg;
}

void save_config(const RunConfig& cfg, const fs::path& path) {
    const json j{{"inputs", cfg.inputs},
                 {"backend", cfg.backend},
                 {"k", cfg.k},
                 {"preset", cfg.preset},
                 {"models_dir", cfg.models_dir},
                 {"common_words", cfg.common_words},
                 {"vague_words", cfg.vague_words},
                 {"embeddings", cfg.embeddings},
                 {"corpus_cache", cfg.corpus_cache},
                 {"master_seed", cfg.master_seed},
                 {"output_dir", cfg.output_dir},
                 {"ks", cfg.ks},
                 {"repeats", cfg.repeats},
                 {"split_ratio", cfg.split_ratio},
                 {"plots", cfg.plots},
                 {"online", cfg.online}};
    io::write_file(path, j.dump(2) + "\n");
}

void validate_config(const RunConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("k must be at least 1");
    if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
    if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
        throw ConfigError("split ratio must lie strictly between 0 and 1");
    if (!kPresets.count(cfg.preset))
        throw ConfigError("unknown preset '" + cfg.preset +
                          "' (expected none|strict|moderate|lenient)");
    if (cfg.ks.empty()) throw ConfigError("the k-level list is empty");
    for (int k : cfg.ks)
        if (k < 1) throw ConfigError("every k level must be at least 1");
    for (const auto& input : cfg.inputs)
        if (!fs::exists(input))
            throw ConfigError("input file not found: '" + input + "'");
}

CommandResult cmd_recommend(const RunConfig& cfg) {
    if (cfg.inputs.empty())
        throw ConfigError("recommend needs at least one input document");
    auto run = load_run(cfg);
    std::optional<filter::FilterModel> model;
    if (cfg.preset != "none") model = load_preset_model(cfg, cfg.preset);

    CommandResult res;
    json doc_reports = json::array();
    for (const auto& doc : run.docs) {
        auto preds = engine::basic_filter(
            engine::collect_predictions(doc, *run.backend, cfg.k),
            text::term_set(doc), run.wordlists);
        auto matrix = features::build_matrix(preds, doc, run.stats.get(),
                                             run.matcher);

        // dedup by lemma, keeping the highest-confidence occurrence
        std::map<std::string, const features::MatrixRow*> best;
        for (const auto& row : matrix.rows) {
            if (model && model->classify(row.features) != 1) continue;
            auto [it, fresh] = best.try_emplace(row.record.lemma, &row);
            if (!fresh && row.record.confidence > it->second->record.confidence)
                it->second = &row;
        }
        std::vector<const features::MatrixRow*> ordered;
        for (const auto& [lemma, row] : best) ordered.push_back(row);
        std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
            if (a->record.confidence != b->record.confidence)
                return a->record.confidence > b->record.confidence;
            return a->record.lemma < b->record.lemma;
        });

        std::string csv =
            "lemma,term,confidence,sentence,masked_word,context,"
            "f1,f2,f3,f4,f5,f6,f7,f8,f9,f9_defined,f10,f11,f12,f13\n";
        json terms = json::array();
        for (const auto* row : ordered) {
            const auto& rec = row->record;
            std::vector<std::string> cells = {
                rec.lemma,
                rec.term,
                io::fmt_double(rec.confidence),
                std::to_string(rec.instance.sentence_index),
                rec.instance.masked_word.surface,
                mask_context(doc, rec.instance)};
            for (auto& cell : feature_cells(row->features))
                cells.push_back(std::move(cell));
            csv += io::csv_join(cells) + "\n";
            terms.push_back({{"lemma", rec.lemma},
                             {"term", rec.term},
                             {"confidence", rec.confidence},
                             {"sentence", rec.instance.sentence_index},
                             {"masked_word", rec.instance.masked_word.surface},
                             {"context", mask_context(doc, rec.instance)},
                             {"features", features_json(row->features)}});
        }
        emit(res, out_file(cfg, "recommend_" + doc.doc_id + ".csv"), csv);
        doc_reports.push_back({{"doc_id", doc.doc_id},
                               {"survivor_rows", matrix.rows.size()},
                               {"recommended", terms}});
    }
    emit_json(res, out_file(cfg, "recommend.json"),
              json{{"provenance", run.provenance}, {"documents", doc_reports}});
    finish(res, cfg);
    return res;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    if (cfg.inputs.empty())
        throw ConfigError("simulate needs at least one input document");
    auto run = load_run(cfg);
    auto ctx = make_context(cfg, run);

    auto expi = eval::run_expi(ctx, run.docs, cfg.ks);
    auto pairwise = eval::pairwise_by_k(expi);
    std::vector<filter::FilterModel> presets;
    if (cfg.preset != "none")
        presets.push_back(load_preset_model(cfg, cfg.preset));
    auto expiii = eval::run_expiii(ctx, run.docs, presets, cfg.repeats);

    CommandResult res;
    std::string csv = "doc_id,k,seed,accuracy,coverage\n";
    json expi_rows = json::array();
    for (const auto& row : expi) {
        csv += io::csv_join({row.doc_id, std::to_string(row.k),
                             std::to_string(row.seed), opt_cell(row.accuracy),
                             opt_cell(row.coverage)}) +
               "\n";
        expi_rows.push_back({{"doc_id", row.doc_id},
                             {"k", row.k},
                             {"seed", row.seed},
                             {"accuracy", opt_json(row.accuracy)},
                             {"coverage", opt_json(row.coverage)}});
    }
    emit(res, out_file(cfg, "expi.csv"), csv);

    csv = "k_a,k_b,p_accuracy,a12_accuracy,p_coverage,a12_coverage\n";
    json pair_rows = json::array();
    for (const auto& s : pairwise) {
        csv += io::csv_join({std::to_string(s.k_a), std::to_string(s.k_b),
                             opt_cell(s.p_accuracy), opt_cell(s.a12_accuracy),
                             opt_cell(s.p_coverage), opt_cell(s.a12_coverage)}) +
               "\n";
        pair_rows.push_back({{"k_a", s.k_a},
                             {"k_b", s.k_b},
                             {"p_accuracy", opt_json(s.p_accuracy)},
                             {"a12_accuracy", opt_json(s.a12_accuracy)},
                             {"p_coverage", opt_json(s.p_coverage)},
                             {"a12_coverage", opt_json(s.a12_coverage)}});
    }
    emit(res, out_file(cfg, "expi_pairwise.csv"), csv);
    emit(res, out_file(cfg, "expiii.csv"), expiii_csv(expiii));
    emit_json(res, out_file(cfg, "simulate.json"),
              json{{"provenance", run.provenance},
                   {"expi", expi_rows},
                   {"pairwise", pair_rows},
                   {"expiii", expiii_json(expiii)}});
    if (cfg.plots) emit_expi_plots(res, cfg, expi);
    finish(res, cfg);
    return res;
}

CommandResult cmd_train_filter(const RunConfig& cfg) {
    if (cfg.inputs.size() < 2)
        throw ConfigError("train-filter needs at least two input documents");
    auto run = load_run(cfg);
    auto ctx = make_context(cfg, run);
    auto result = eval::run_expii(ctx, run.docs);

    CommandResult res;
    fs::create_directories(cfg.models_dir);
    json model_paths;
    for (auto mode : {filter::TrainingMode::Strict, filter::TrainingMode::Moderate,
                      filter::TrainingMode::Lenient}) {
        auto model = filter::train_preset(
            result.data, mode, derive_seed(cfg.master_seed, "train-filter"));
        const fs::path path = fs::path(cfg.models_dir) /
                              (filter::training_mode_name(mode) + ".json");
        filter::save_model(model, path);
        res.outputs.push_back(path);
        model_paths[filter::training_mode_name(mode)] = path.string();
    }

    std::string csv = "algorithm,option,cv_accuracy,cv_precision,cv_recall\n";
    json table = json::array();
    for (const auto& row : result.table) {
        csv += io::csv_join({filter::algorithm_name(row.algorithm),
                             filter::training_mode_name(row.option),
                             io::fmt_double(row.cv.accuracy),
                             opt_cell(row.cv.precision), opt_cell(row.cv.recall)}) +
               "\n";
        table.push_back({{"algorithm", filter::algorithm_name(row.algorithm)},
                         {"option", filter::training_mode_name(row.option)},
                         {"cv_accuracy", row.cv.accuracy},
                         {"cv_precision", opt_json(row.cv.precision)},
                         {"cv_recall", opt_json(row.cv.recall)}});
    }
    emit(res, out_file(cfg, "cv_table.csv"), csv);

    csv = "feature,information_gain\n";
    json ig = json::array();
    for (const auto& [name, gain] : result.ig) {
        csv += io::csv_join({name, io::fmt_double(gain)}) + "\n";
        ig.push_back({{"feature", name}, {"information_gain", gain}});
    }
    emit(res, out_file(cfg, "ig_table.csv"), csv);

    emit_json(res, out_file(cfg, "train.json"),
              json{{"provenance", run.provenance},
                   {"dataset",
                    {{"rows", result.data.size()},
                     {"relevant", result.data.relevant_count()},
                     {"nonrelevant", result.data.nonrelevant_count()}}},
                   {"cv_table", table},
                   {"information_gain", ig},
                   {"models", model_paths}});
    finish(res, cfg);
    return res;
}

CommandResult cmd_build_corpus(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.inputs.empty())
        throw ConfigError("build-corpus needs at least one input document");
    if (cfg.corpus_cache.empty())
        throw ConfigError("build-corpus needs a cache directory (--corpus-cache)");
    auto docs = parse_inputs(cfg);

    CommandResult res;
    std::unique_ptr<corpus::ArticleFetcher> fetcher;
    if (cfg.online) fetcher = corpus::make_wikipedia_fetcher();
    for (const auto& doc : docs) {
        auto phrases = corpus::extract_keyphrases(doc);
        auto built = cfg.online
                         ? corpus::build_corpus(phrases, 0, *fetcher,
                                                cfg.corpus_cache, doc.doc_id)
                         : corpus::build_corpus_offline(phrases, cfg.corpus_cache,
                                                        doc.doc_id);
        json titles = json::array();
        for (const auto& a : built.articles) titles.push_back(a.title);
        emit_json(res, out_file(cfg, "corpus_" + doc.doc_id + ".json"),
                  json{{"doc_id", doc.doc_id},
                       {"phrases", phrases},
                       {"article_count", built.articles.size()},
                       {"titles", titles},
                       {"fetched_at", built.fetched_at},
                       {"cache_dir", cfg.corpus_cache}});
    }
    finish(res, cfg);
    return res;
}

CommandResult cmd_eval_filter(const RunConfig& cfg) {
    if (cfg.inputs.empty())
        throw ConfigError("eval-filter needs at least one input document");
    auto run = load_run(cfg);
    auto ctx = make_context(cfg, run);

    std::vector<filter::FilterModel> presets;
    if (cfg.preset == "none") {
        for (const std::string name : {"strict", "moderate", "lenient"})
            if (fs::exists(fs::path(cfg.models_dir) / (name + ".json")))
                presets.push_back(load_preset_model(cfg, name));
        if (presets.empty())
            throw ConfigError("no trained models found in '" + cfg.models_dir +
                              "'; run train-filter first");
    } else {
        presets.push_back(load_preset_model(cfg, cfg.preset));
    }
    auto reports = eval::run_expiii(ctx, run.docs, presets, cfg.repeats);

    CommandResult res;
    emit(res, out_file(cfg, "eval_filter.csv"), expiii_csv(reports));

    // aggregate per mode in first-appearance order; undefined values are
    // excluded from means rather than counted as zero
    std::vector<std::string> modes;
    std::map<std::string, std::vector<const eval::EvaluationReport*>> by_mode;
    for (const auto& r : reports) {
        if (!by_mode.count(r.filter_mode)) modes.push_back(r.filter_mode);
        by_mode[r.filter_mode].push_back(&r);
    }
    std::string csv =
        "filter_mode,runs,mean_accuracy,mean_coverage,"
        "mean_cls_accuracy,mean_cls_precision,mean_cls_recall\n";
    json summary = json::array();
    for (const auto& mode : modes) {
        const auto& group = by_mode[mode];
        std::vector<std::optional<double>> acc, cov, ca, cp, cr;
        for (const auto* r : group) {
            acc.push_back(r->accuracy);
            cov.push_back(r->coverage);
            ca.push_back(r->cls_accuracy);
            cp.push_back(r->cls_precision);
            cr.push_back(r->cls_recall);
        }
        csv += io::csv_join({mode, std::to_string(group.size()),
                             opt_cell(mean_defined(acc)), opt_cell(mean_defined(cov)),
                             opt_cell(mean_defined(ca)), opt_cell(mean_defined(cp)),
                             opt_cell(mean_defined(cr))}) +
               "\n";
        summary.push_back({{"filter_mode", mode},
                           {"runs", group.size()},
                           {"mean_accuracy", opt_json(mean_defined(acc))},
                           {"mean_coverage", opt_json(mean_defined(cov))},
                           {"mean_cls_accuracy", opt_json(mean_defined(ca))},
                           {"mean_cls_precision", opt_json(mean_defined(cp))},
                           {"mean_cls_recall", opt_json(mean_defined(cr))}});
    }
    emit(res, out_file(cfg, "eval_filter_summary.csv"), csv);
    emit_json(res, out_file(cfg, "eval_filter.json"),
              json{{"provenance", run.provenance},
                   {"reports", expiii_json(reports)},
                   {"summary", summary}});

    if (cfg.plots) {
        std::vector<std::pair<std::string, std::vector<double>>> acc, cov;
        for (const auto& mode : modes) {
            acc.push_back({mode, {}});
            cov.push_back({mode, {}});
            for (const auto* r : by_mode[mode]) {
                if (r->accuracy) acc.back().second.push_back(*r->accuracy);
                if (r->coverage) cov.back().second.push_back(*r->coverage);
            }
        }
        auto acc_path = out_file(cfg, "eval_accuracy.svg");
        write_box_plot(acc_path, "Accuracy by filter mode", "accuracy", acc);
        res.outputs.push_back(acc_path);
        auto cov_path = out_file(cfg, "eval_coverage.svg");
        write_box_plot(cov_path, "Coverage by filter mode", "coverage", cov);
        res.outputs.push_back(cov_path);
    }
    finish(res, cfg);
    return res;
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (sorted[i + 1] - sorted[i]) * (h - static_cast<double>(i));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string svg_line(double x1, double y1, double x2, double y2) {
    return "<line x1='" + num(x1) + "' y1='" + num(y1) + "' x2='" + num(x2) +
           "' y2='" + num(y2) + "' stroke='#333333' stroke-width='1'/>\n";
}

std::string svg_text(double x, double y, const std::string& anchor,
                     const std::string& content, const std::string& extra = "") {
    return "<text x='" + num(x) + "' y='" + num(y) + "' text-anchor='" + anchor +
           "' font-size='12' fill='#333333'" + extra + ">" + content + "</text>\n";
}

}  // namespace

void write_box_plot(
    const fs::path& path, const std::string& title, const std::string& y_label,
    const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
    const double width = 640, height = 420;
    const double left = 70, right = 20, top = 50, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    double ymin = 0.0, ymax = 1.0;  // metrics are proportions; extend if exceeded
    for (const auto& [label, values] : groups)
        for (double v : values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    auto ty = [&](double v) { return top + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::string svg =
        "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420' "
        "viewBox='0 0 640 420' font-family='sans-serif'>\n"
        "<rect width='640' height='420' fill='#ffffff'/>\n";
    svg += svg_text(width / 2, 28, "middle", title, " font-size='16'");
    svg += svg_text(18, top + ph / 2, "middle", y_label,
                    " transform='rotate(-90 18 " + num(top + ph / 2) + ")'");
    svg += svg_line(left, top, left, top + ph);
    svg += svg_line(left, top + ph, left + pw, top + ph);
    for (int t = 0; t <= 4; ++t) {
        const double v = ymin + (ymax - ymin) * t / 4.0;
        svg += svg_line(left - 4, ty(v), left, ty(v));
        svg += svg_text(left - 8, ty(v) + 4, "end", num(v));
    }

    const auto n = groups.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = left + pw * (static_cast<double>(i) + 0.5) /
                                     static_cast<double>(n == 0 ? 1 : n);
        svg += svg_text(cx, top + ph + 20, "middle", groups[i].first);
        auto values = groups[i].second;
        if (values.empty()) continue;
        std::sort(values.begin(), values.end());
        const double bw = std::min(60.0, pw / static_cast<double>(n) * 0.5);
        const double q1 = quantile(values, 0.25), med = quantile(values, 0.5),
                     q3 = quantile(values, 0.75);
        svg += svg_line(cx, ty(values.front()), cx, ty(values.back()));
        svg += svg_line(cx - bw / 4, ty(values.front()), cx + bw / 4,
                        ty(values.front()));
        svg += svg_line(cx - bw / 4, ty(values.back()), cx + bw / 4,
                        ty(values.back()));
        svg += "<rect x='" + num(cx - bw / 2) + "' y='" + num(ty(q3)) +
               "' width='" + num(bw) + "' height='" +
               num(std::max(0.5, ty(q1) - ty(q3))) +
               "' fill='#7da7c9' stroke='#333333'/>\n";
        svg += svg_line(cx - bw / 2, ty(med), cx + bw / 2, ty(med));
    }
    svg += "</svg>\n";
    io::write_file(path, svg);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    RunConfig cfg;
    if (const char* env = std::getenv("REQTERM_CACHE_DIR")) cfg.corpus_cache = env;

    // the config file loads before CLI11 assigns flags, so flags override it
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    try {
        if (!config_path.empty()) merge_config(cfg, config_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"terminology recommender for requirements documents"};
    app.require_subcommand(1);
    std::string config_sink;  // value already consumed by the pre-scan
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_sink,
                        "JSON config file; explicit flags override its values");
        sub->add_option("-i,--input", cfg.inputs,
                        "requirements document (repeatable)");
        sub->add_option("--backend", cfg.backend,
                        "backend spec: stub, stub:seed=<n>, or a model directory");
        sub->add_option("-k,--k", cfg.k, "predictions per masked word");
        sub->add_option("--preset", cfg.preset,
                        "relevance filter preset: none|strict|moderate|lenient");
        sub->add_option("--models-dir", cfg.models_dir,
                        "directory holding trained preset models");
        sub->add_option("--common-words", cfg.common_words,
                        "common-word list file");
        sub->add_option("--vague-words", cfg.vague_words,
                        "vague/stop word list file");
        sub->add_option("--embeddings", cfg.embeddings,
                        "word-embedding table file");
        sub->add_option("--corpus-cache", cfg.corpus_cache,
                        "article cache directory (env REQTERM_CACHE_DIR)");
        sub->add_option("--seed", cfg.master_seed, "master seed");
        sub->add_option("-o,--out", cfg.output_dir, "output directory");
        sub->add_option("--ks", cfg.ks, "k levels for the simulation")
            ->delimiter(',');
        sub->add_option("--repeats", cfg.repeats,
                        "repeated splits per document");
        sub->add_option("--split-ratio", cfg.split_ratio,
                        "disclosed share of sentences");
        sub->add_flag("--plots", cfg.plots, "emit SVG box plots");
        sub->add_flag("--online", cfg.online, "allow live article fetching");
    };
    auto* rec = app.add_subcommand("recommend",
                                   "report potentially missing terms");
    auto* sim = app.add_subcommand("simulate",
                                   "run the withholding simulation");
    auto* train = app.add_subcommand("train-filter",
                                     "train the relevance filter presets");
    auto* corp = app.add_subcommand("build-corpus",
                                    "build the per-document article corpus");
    auto* evalf = app.add_subcommand("eval-filter",
                                     "evaluate trained presets on documents");
    for (auto* sub : {rec, sim, train, corp, evalf}) add_common(sub);

    std::vector<const char*> argv{"reqterm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        CommandResult result;
        if (rec->parsed()) result = cmd_recommend(cfg);
        else if (sim->parsed()) result = cmd_simulate(cfg);
        else if (train->parsed()) result = cmd_train_filter(cfg);
        else if (corp->parsed()) result = cmd_build_corpus(cfg);
        else result = cmd_eval_filter(cfg);
        for (const auto& path : result.outputs)
            out << "wrote " << path.string() << "\n";
        return 0;
    } catch (const DegenerateDataset& e) {
        err << "error: " << e.what() << "\n"
            << "guidance: the labelled pool needs both relevant and "
               "non-relevant examples; add or lengthen training documents, or "
               "raise --k so more predictions get labelled.\n";
        return 1;
    } catch (const NoArticlesFound& e) {
        err << "error: " << e.what() << "\n"
            << "hint: populate the article cache with build-corpus --online, "
               "or point --corpus-cache at a warm cache.\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace reqterm::cli
