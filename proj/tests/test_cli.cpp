#include "reqterm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "reqterm/corpus_builder.hpp"
#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"
#include "reqterm/relevance_filter.hpp"
#include "reqterm/text_pipeline.hpp"

using namespace reqterm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "reqterm_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kDocA =
    "The system shall store the user password in the encrypted database. "
    "The server shall send a notification message to the client. "
    "The network shall monitor traffic for security events. "
    "The backup service shall restore the configuration after a failure. "
    "The interface shall display the session status to the operator. "
    "The database shall validate each record before storage.";

const char* kDocB =
    "The protocol shall encrypt every message with a session key. "
    "The monitor shall alert the administrator on errors. "
    "The account service shall verify user credentials at login. "
    "The scheduler shall retry failed operations after a timeout. "
    "The gateway shall process requests within the latency limit. "
    "The audit module shall log every configuration change.";

// two documents, a wordlist, and a base config rooted in `dir`
cli::RunConfig sandbox_config(const fs::path& dir) {
    io::write_file(dir / "doc_a.txt", kDocA);
    io::write_file(dir / "doc_b.txt", kDocB);
    io::write_file(dir / "common.txt", "the\nshall\na\nan\nof\nto\nfor\n");

    cli::RunConfig cfg;
    cfg.inputs = {(dir / "doc_a.txt").string(), (dir / "doc_b.txt").string()};
    cfg.backend = "stub:seed=1";
    cfg.common_words = (dir / "common.txt").string();
    cfg.models_dir = (dir / "models").string();
    cfg.output_dir = (dir / "out").string();
    cfg.master_seed = 11;
    return cfg;
}

std::set<std::string> csv_lemmas(const fs::path& csv_path) {
    std::istringstream in(io::read_file(csv_path));
    std::string line;
    std::getline(in, line);  // header
    std::set<std::string> lemmas;
    while (std::getline(in, line))
        if (!line.empty()) lemmas.insert(io::csv_split(line).at(0));
    return lemmas;
}

struct TitleEchoFetcher : corpus::ArticleFetcher {
    std::optional<corpus::Article> fetch(const std::string& phrase) override {
        return corpus::Article{
            phrase, "An article about " + phrase +
                        " covering systems, networks, and storage services."};
    }
    std::string id() const override { return "title-echo"; }
};

}  // namespace

TEST_CASE("config file round-trips every field") {
    const auto dir = fresh_dir("config");
    cli::RunConfig cfg;
    cfg.inputs = {"a.txt", "b.txt"};
    cfg.backend = "stub:seed=5";
    cfg.k = 20;
    cfg.preset = "moderate";
    cfg.models_dir = "m";
    cfg.common_words = "c.txt";
    cfg.vague_words = "v.txt";
    cfg.embeddings = "e.vec";
    cfg.corpus_cache = "cache";
    cfg.master_seed = 18446744073709551615ull;  // uint64 max survives JSON
    cfg.output_dir = "results";
    cfg.ks = {3, 9};
    cfg.repeats = 7;
    cfg.split_ratio = 0.25;
    cfg.plots = true;
    cfg.online = true;

    cli::save_config(cfg, dir / "config.json");
    auto back = cli::load_config(dir / "config.json");
    CHECK(back.inputs == cfg.inputs);
    CHECK(back.backend == cfg.backend);
    CHECK(back.k == cfg.k);
    CHECK(back.preset == cfg.preset);
    CHECK(back.models_dir == cfg.models_dir);
    CHECK(back.common_words == cfg.common_words);
    CHECK(back.vague_words == cfg.vague_words);
    CHECK(back.embeddings == cfg.embeddings);
    CHECK(back.corpus_cache == cfg.corpus_cache);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.output_dir == cfg.output_dir);
    CHECK(back.ks == cfg.ks);
    CHECK(back.repeats == cfg.repeats);
    CHECK(back.split_ratio == cfg.split_ratio);
    CHECK(back.plots == cfg.plots);
    CHECK(back.online == cfg.online);

    io::write_file(dir / "typo.json", R"({"presett": "none"})");
    CHECK_THROWS_AS(cli::load_config(dir / "typo.json"), ConfigError);
    io::write_file(dir / "broken.json", "{nope");
    CHECK_THROWS_AS(cli::load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("validate_config rejects bad settings") {
    cli::RunConfig cfg;
    CHECK_NOTHROW(cli::validate_config(cfg));
    cfg.k = 0;
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
    cfg.k = 1;
    cfg.preset = "harsh";
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
    cfg.preset = "none";
    cfg.split_ratio = 1.0;
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
    cfg.split_ratio = 0.5;
    cfg.repeats = 0;
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
    cfg.repeats = 1;
    cfg.ks = {};
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
    cfg.ks = {5};
    cfg.inputs = {"/definitely/not/there.txt"};
    CHECK_THROWS_AS(cli::validate_config(cfg), ConfigError);
}

TEST_CASE("recommend: survivors only, deduplicated, deterministic") {
    const auto dir = fresh_dir("recommend");
    auto cfg = sandbox_config(dir);
    auto res = cli::cmd_recommend(cfg);
    REQUIRE(res.outputs.size() == 4);  // 2 CSVs + report + config dump

    const auto doc = text::parse_document(kDocA, "doc_a");
    const auto disclosed = text::term_set(doc);
    const auto wl = text::Wordlists::from_words(
        io::read_list_file(cfg.common_words), {});
    auto lemmas = csv_lemmas(fs::path(cfg.output_dir) / "recommend_doc_a.csv");
    CHECK(!lemmas.empty());
    for (const auto& lemma : lemmas) {
        CHECK(!disclosed.contains(lemma));  // never suggests a present term
        CHECK(!wl.contains(lemma));
    }

    // confidences are sorted descending in the report
    std::istringstream in(
        io::read_file(fs::path(cfg.output_dir) / "recommend_doc_a.csv"));
    std::string line;
    std::getline(in, line);
    double prev = 2.0;
    while (std::getline(in, line)) {
        const double conf = std::stod(io::csv_split(line).at(2));
        CHECK(conf <= prev);
        prev = conf;
    }

    auto report = json::parse(
        io::read_file(fs::path(cfg.output_dir) / "recommend.json"));
    CHECK(report["provenance"]["backend"].get<std::string>() != "");
    CHECK(report["provenance"]["master_seed"].get<std::uint64_t>() == 11);
    CHECK(report["documents"].size() == 2);

    // a second run from the dumped config is byte-identical
    auto replay = cli::load_config(fs::path(cfg.output_dir) / "config.json");
    replay.output_dir = (dir / "out2").string();
    cli::cmd_recommend(replay);
    CHECK(io::read_file(fs::path(cfg.output_dir) / "recommend_doc_a.csv") ==
          io::read_file(dir / "out2" / "recommend_doc_a.csv"));
    CHECK(io::read_file(fs::path(cfg.output_dir) / "recommend.json") ==
          io::read_file(dir / "out2" / "recommend.json"));
}

TEST_CASE("train-filter then recommend: strict report is a subset of none") {
    const auto dir = fresh_dir("strict_subset");
    auto cfg = sandbox_config(dir);
    cfg.k = 25;  // enough labelled rows for the preset pipeline

    auto trained = cli::cmd_train_filter(cfg);
    for (const std::string name : {"strict", "moderate", "lenient"}) {
        const auto path = fs::path(cfg.models_dir) / (name + ".json");
        CHECK(fs::exists(path));
        auto model = filter::load_model(path);  // loadable, right mode
        CHECK(filter::training_mode_name(model.training_mode) == name);
    }

    // 15 comparison rows, 13 ranked features
    std::istringstream cv(io::read_file(fs::path(cfg.output_dir) / "cv_table.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(cv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 15);
    std::istringstream ig(io::read_file(fs::path(cfg.output_dir) / "ig_table.csv"));
    rows = -1;
    while (std::getline(ig, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 13);

    // retraining with the same seed reproduces the table byte for byte
    auto again = cfg;
    again.output_dir = (dir / "out_retrain").string();
    again.models_dir = (dir / "models_retrain").string();
    cli::cmd_train_filter(again);
    CHECK(io::read_file(fs::path(cfg.output_dir) / "cv_table.csv") ==
          io::read_file(fs::path(again.output_dir) / "cv_table.csv"));
    CHECK(io::read_file(fs::path(cfg.models_dir) / "strict.json") ==
          io::read_file(fs::path(again.models_dir) / "strict.json"));

    auto none_cfg = cfg;
    none_cfg.output_dir = (dir / "out_none").string();
    cli::cmd_recommend(none_cfg);
    auto strict_cfg = cfg;
    strict_cfg.preset = "strict";
    strict_cfg.output_dir = (dir / "out_strict").string();
    cli::cmd_recommend(strict_cfg);

    for (const std::string doc : {"doc_a", "doc_b"}) {
        auto none = csv_lemmas(fs::path(none_cfg.output_dir) /
                               ("recommend_" + doc + ".csv"));
        auto strict = csv_lemmas(fs::path(strict_cfg.output_dir) /
                                 ("recommend_" + doc + ".csv"));
        for (const auto& lemma : strict) CHECK(none.count(lemma) == 1);
        CHECK(strict.size() <= none.size());
    }
}

TEST_CASE("train-filter preconditions") {
    const auto dir = fresh_dir("train_pre");
    auto cfg = sandbox_config(dir);
    cfg.inputs.resize(1);
    CHECK_THROWS_AS(cli::cmd_train_filter(cfg), ConfigError);
}

TEST_CASE("simulate: row counts, rerun byte-identity, plots") {
    const auto dir = fresh_dir("simulate");
    auto cfg = sandbox_config(dir);
    cfg.ks = {5, 15};
    cfg.repeats = 2;
    cfg.plots = true;
    auto res = cli::cmd_simulate(cfg);

    std::istringstream in(io::read_file(fs::path(cfg.output_dir) / "expi.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // 2 docs x 2 k-levels

    for (const std::string name : {"accuracy.svg", "coverage.svg"}) {
        const auto svg = io::read_file(fs::path(cfg.output_dir) / name);
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("k=5") != std::string::npos);
        CHECK(svg.find("k=15") != std::string::npos);
        CHECK(svg.find("nan") == std::string::npos);
    }

    // same master seed, fresh directory: byte-identical tables
    auto rerun = cfg;
    rerun.output_dir = (dir / "out_rerun").string();
    cli::cmd_simulate(rerun);
    for (const std::string name :
         {"expi.csv", "expi_pairwise.csv", "expiii.csv", "simulate.json",
          "accuracy.svg", "coverage.svg"}) {
        CAPTURE(name);
        CHECK(io::read_file(fs::path(cfg.output_dir) / name) ==
              io::read_file(fs::path(rerun.output_dir) / name));
    }

    auto report = json::parse(
        io::read_file(fs::path(cfg.output_dir) / "simulate.json"));
    CHECK(report["expi"].size() == 4);
    CHECK(report["pairwise"].size() == 1);           // one pair: 5 vs 15
    CHECK(report["expiii"].size() == 2 * 2);         // baseline only, 2 repeats
    for (const auto& row : report["expiii"])
        CHECK(row["filter_mode"].get<std::string>() == "none");
}

TEST_CASE("eval-filter aggregates every trained preset") {
    const auto dir = fresh_dir("eval_filter");
    auto cfg = sandbox_config(dir);
    cfg.k = 25;
    cli::cmd_train_filter(cfg);

    auto eval_cfg = cfg;
    eval_cfg.repeats = 2;
    eval_cfg.output_dir = (dir / "out_eval").string();
    cli::cmd_eval_filter(eval_cfg);

    std::istringstream in(io::read_file(fs::path(eval_cfg.output_dir) /
                                        "eval_filter_summary.csv"));
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::string> modes;
    while (std::getline(in, line))
        if (!line.empty()) {
            auto cells = io::csv_split(line);
            modes.push_back(cells.at(0));
            CHECK(cells.at(1) == "4");  // 2 docs x 2 repeats
        }
    CHECK(modes == std::vector<std::string>{"none", "strict", "moderate",
                                            "lenient"});

    // with no models trained anywhere, the command refuses to run
    auto bare = sandbox_config(fresh_dir("eval_filter_bare"));
    CHECK_THROWS_AS(cli::cmd_eval_filter(bare), ConfigError);
}

TEST_CASE("build-corpus offline reuses a warm cache; recommend consumes it") {
    const auto dir = fresh_dir("corpus_cli");
    auto cfg = sandbox_config(dir);
    cfg.corpus_cache = (dir / "cache").string();

    // warm the cache through the library with a deterministic fetcher
    const auto doc_a = text::parse_document(kDocA, "doc_a");
    const auto doc_b = text::parse_document(kDocB, "doc_b");
    TitleEchoFetcher fetcher;
    for (const auto* doc : {&doc_a, &doc_b})
        corpus::build_corpus(corpus::extract_keyphrases(*doc), 0, fetcher,
                             cfg.corpus_cache, doc->doc_id);

    auto res = cli::cmd_build_corpus(cfg);
    auto summary = json::parse(
        io::read_file(fs::path(cfg.output_dir) / "corpus_doc_a.json"));
    CHECK(summary["doc_id"] == "doc_a");
    CHECK(summary["article_count"].get<int>() >= 1);
    CHECK(summary["titles"].size() ==
          summary["article_count"].get<std::size_t>());

    // frequency features now come from the cached corpus
    auto rec_cfg = cfg;
    rec_cfg.output_dir = (dir / "out_rec").string();
    CHECK_NOTHROW(cli::cmd_recommend(rec_cfg));
    auto report = json::parse(
        io::read_file(fs::path(rec_cfg.output_dir) / "recommend.json"));
    CHECK(report["provenance"]["corpus_articles"].get<int>() >= 1);

    // cold cache stays an error
    auto cold = cfg;
    cold.corpus_cache = (dir / "empty_cache").string();
    cold.output_dir = (dir / "out_cold").string();
    CHECK_THROWS_AS(cli::cmd_build_corpus(cold), Error);
}

TEST_CASE("run_cli: dispatch, flag overrides, and error reporting") {
    const auto dir = fresh_dir("run_cli");
    auto cfg = sandbox_config(dir);
    cli::save_config(cfg, dir / "run.json");

    std::ostringstream out, err;
    int rc = cli::run_cli({"recommend", "--config", (dir / "run.json").string()},
                          out, err);
    CHECK(rc == 0);
    CHECK(out.str().find("recommend.json") != std::string::npos);
    CHECK(err.str().empty());

    // an explicit flag overrides the config file value
    out.str("");
    rc = cli::run_cli({"recommend", "--config", (dir / "run.json").string(),
                       "--out", (dir / "out_flag").string()},
                      out, err);
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out_flag" / "recommend.json"));

    // --ks accepts both comma-separated and repeated values
    out.str("");
    rc = cli::run_cli({"recommend", "--config", (dir / "run.json").string(),
                       "--ks", "3,9", "--out", (dir / "out_ks").string()},
                      out, err);
    CHECK(rc == 0);
    const auto echoed = cli::load_config(dir / "out_ks" / "config.json");
    CHECK(echoed.ks == std::vector<int>{3, 9});

    // missing embedding file: nonzero exit and the path in the message
    err.str("");
    rc = cli::run_cli({"recommend", "--config", (dir / "run.json").string(),
                       "--embeddings", (dir / "missing.vec").string()},
                      out, err);
    CHECK(rc != 0);
    CHECK(err.str().find("missing.vec") != std::string::npos);

    // missing model for a preset: actionable guidance
    err.str("");
    rc = cli::run_cli({"recommend", "--config", (dir / "run.json").string(),
                       "--preset", "strict"},
                      out, err);
    CHECK(rc != 0);
    CHECK(err.str().find("train-filter") != std::string::npos);

    // cold corpus cache: hint names the way out
    err.str("");
    rc = cli::run_cli({"build-corpus", "--config", (dir / "run.json").string(),
                       "--corpus-cache", (dir / "nocache").string()},
                      out, err);
    CHECK(rc != 0);
    CHECK(err.str().find("hint") != std::string::npos);

    // usage errors come from the parser, not a crash
    CHECK(cli::run_cli({"no-such-command"}, out, err) != 0);
    CHECK(cli::run_cli({}, out, err) != 0);
    CHECK(cli::run_cli({"--help"}, out, err) == 0);
}

TEST_CASE("box plot handles empty groups and degenerate data") {
    const auto dir = fresh_dir("boxplot");
    cli::write_box_plot(dir / "plot.svg", "Title", "metric",
                        {{"left", {0.2, 0.4, 0.4, 0.9}},
                         {"mid", {}},
                         {"right", {0.5}},
                         {"same", {0.7, 0.7, 0.7}}});
    const auto svg = io::read_file(dir / "plot.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    for (const std::string label : {"left", "mid", "right", "same"})
        CHECK(svg.find(label) != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}
