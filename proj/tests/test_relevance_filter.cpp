#include "reqterm/relevance_filter.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "doctest.h"
#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"

using namespace reqterm;
using namespace reqterm::filter;

namespace {

features::FeatureVector base_features() {
    features::FeatureVector v;
    v.f1 = text::Pos::Noun;
    v.f2 = text::Pos::Noun;
    v.f3 = true;
    v.f4 = 8;
    v.f5 = 6;
    v.f6 = 0.75;
    v.f7 = 0.5;
    v.f8 = 3;
    v.f9 = 0.0;
    v.f9_defined = false;
    v.f10 = 4;
    v.f11 = 9;
    v.f12 = 0.0;
    v.f13 = 0.0;
    return v;
}

features::MatrixRow make_row(int id, const features::FeatureVector& v,
                             std::optional<int> label,
                             const std::string& lemma = "",
                             const std::string& doc = "synth") {
    features::MatrixRow row;
    row.doc_id = doc;
    row.record.term = lemma.empty() ? "term" + std::to_string(id) : lemma;
    row.record.lemma = row.record.term;
    row.record.confidence = v.f7;
    row.record.instance.sentence_index = 0;
    row.record.instance.token_index = id;
    row.record.instance.masked_word = {"word", "word", text::Pos::Noun, 0};
    row.features = v;
    row.label = label;
    return row;
}

// two classes cleanly split by confidence (f7)
LabeledDataset separable_ds(int per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lo(0.0, 0.2), hi(0.8, 1.0);
    features::FeatureMatrix m;
    int id = 0;
    for (int i = 0; i < per_class; ++i) {
        auto pos = base_features();
        pos.f7 = hi(rng);
        m.rows.push_back(make_row(id++, pos, 1));
        auto neg = base_features();
        neg.f7 = lo(rng);
        m.rows.push_back(make_row(id++, neg, 0));
    }
    return make_labeled(std::move(m));
}

LabeledDataset random_label_ds(int per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> len(2, 14);
    features::FeatureMatrix m;
    int id = 0;
    for (int cls : {0, 1})
        for (int i = 0; i < per_class; ++i) {
            auto v = base_features();
            v.f4 = len(rng);
            v.f5 = len(rng);
            v.f6 = unit(rng);
            v.f7 = unit(rng);
            v.f12 = unit(rng);
            v.f13 = v.f12 + unit(rng);
            m.rows.push_back(make_row(id++, v, cls));
        }
    return make_labeled(std::move(m));
}

// imbalanced, overlapping classes: positives shifted up on f7
LabeledDataset overlap_ds(int n_pos, int n_neg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> pos_conf(0.65, 0.18), neg_conf(0.35, 0.18);
    features::FeatureMatrix m;
    int id = 0;
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    for (int i = 0; i < n_pos; ++i) {
        auto v = base_features();
        v.f7 = clamp01(pos_conf(rng));
        m.rows.push_back(make_row(id++, v, 1));
    }
    for (int i = 0; i < n_neg; ++i) {
        auto v = base_features();
        v.f7 = clamp01(neg_conf(rng));
        m.rows.push_back(make_row(id++, v, 0));
    }
    return make_labeled(std::move(m));
}

double h2(double p) {
    double h = 0.0;
    for (double q : {p, 1.0 - p})
        if (q > 0.0) h -= q * std::log2(q);
    return h;
}

constexpr Algorithm kAll[] = {Algorithm::NN, Algorithm::DT, Algorithm::LR,
                              Algorithm::RF, Algorithm::SVM};

}  // namespace

TEST_CASE("label_predictions: lemma and similarity matches become relevant") {
    features::FeatureMatrix m;
    m.rows.push_back(make_row(0, base_features(), std::nullopt, "stability", "d1"));
    m.rows.push_back(make_row(1, base_features(), std::nullopt, "throughput", "d1"));
    m.rows.push_back(make_row(2, base_features(), std::nullopt, "dependability", "d2"));

    text::TermSet withheld;
    withheld.lemmas = {"stability", "robustness"};

    auto store = std::make_shared<lex::EmbeddingStore>(lex::EmbeddingStore::from_vectors(
        {{"robustness", {1.0, 0.1}}, {"dependability", {1.0, 0.12}}}));
    lex::Matcher matcher(store);

    auto ds = label_predictions(m, withheld, matcher);
    REQUIRE(ds.size() == 3);
    CHECK(*ds.matrix.rows[0].label == 1);  // exact lemma match
    CHECK(*ds.matrix.rows[1].label == 0);  // OOV, no lemma match
    CHECK(*ds.matrix.rows[2].label == 1);  // cosine above threshold
    CHECK(ds.relevant_count() == 2);
    CHECK(ds.nonrelevant_count() == 1);
    CHECK(ds.provenance == std::vector<std::string>{"d1", "d2"});
}

TEST_CASE("undersample: majority reduced to 1:1") {
    features::FeatureMatrix m;
    int id = 0;
    for (int i = 0; i < 300; ++i) m.rows.push_back(make_row(id++, base_features(), 0));
    for (int i = 0; i < 100; ++i) m.rows.push_back(make_row(id++, base_features(), 1));
    auto ds = make_labeled(std::move(m));

    auto balanced = undersample(ds, 42);
    CHECK(balanced.relevant_count() == 100);
    CHECK(balanced.nonrelevant_count() == 100);
    CHECK(balanced.size() == 200);

    // every minority row survives
    std::set<std::string> kept;
    for (const auto& row : balanced.matrix.rows)
        if (*row.label == 1) kept.insert(row.record.lemma);
    CHECK(kept.size() == 100);

    // seeded: same seed identical, different seed picks another subset
    auto again = undersample(ds, 42);
    REQUIRE(again.size() == balanced.size());
    bool identical = true;
    for (std::size_t i = 0; i < again.size(); ++i)
        identical &= again.matrix.rows[i].record.lemma ==
                     balanced.matrix.rows[i].record.lemma;
    CHECK(identical);
    auto other = undersample(ds, 43);
    bool same_subset = true;
    for (std::size_t i = 0; i < other.size(); ++i)
        same_subset &= other.matrix.rows[i].record.lemma ==
                       balanced.matrix.rows[i].record.lemma;
    CHECK(!same_subset);

    // already balanced: unchanged
    auto twice = undersample(balanced, 7);
    CHECK(twice.size() == balanced.size());

    // single-class input is degenerate
    features::FeatureMatrix ones;
    ones.rows.push_back(make_row(0, base_features(), 1));
    CHECK_THROWS_AS(undersample(make_labeled(std::move(ones)), 1),
                    DegenerateDataset);
}

TEST_CASE("cross_validate: separable data scores 1.0 for every algorithm") {
    auto ds = separable_ds(30, 20260819);
    for (auto a : kAll) {
        CAPTURE(algorithm_name(a));
        auto res = cross_validate(ds, a, 10, 11);
        CHECK(res.accuracy == doctest::Approx(1.0));
        REQUIRE(res.precision.has_value());
        REQUIRE(res.recall.has_value());
        CHECK(*res.precision == doctest::Approx(1.0));
        CHECK(*res.recall == doctest::Approx(1.0));
    }
}

TEST_CASE("cross_validate: random labels hover near chance") {
    double total = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        auto ds = random_label_ds(60, 1000 + s);
        auto res = cross_validate(ds, Algorithm::LR, 10, 500 + s, std::nullopt,
                                  {{"epochs", 100}});
        total += res.accuracy;
    }
    const double mean = total / seeds;
    CHECK(mean > 0.45);
    CHECK(mean < 0.55);
}

TEST_CASE("cross_validate: degenerate folds are excluded, not zero-filled") {
    // all non-relevant: no positive predictions or actuals anywhere
    features::FeatureMatrix zeros;
    for (int i = 0; i < 40; ++i) zeros.rows.push_back(make_row(i, base_features(), 0));
    auto res0 = cross_validate(make_labeled(std::move(zeros)), Algorithm::DT, 10, 3);
    CHECK(res0.accuracy == doctest::Approx(1.0));
    CHECK(!res0.precision.has_value());
    CHECK(!res0.recall.has_value());

    // all relevant: constant-positive classifier, all metrics defined and 1.0
    features::FeatureMatrix ones;
    for (int i = 0; i < 40; ++i) ones.rows.push_back(make_row(i, base_features(), 1));
    auto res1 = cross_validate(make_labeled(std::move(ones)), Algorithm::DT, 10, 3);
    CHECK(res1.accuracy == doctest::Approx(1.0));
    REQUIRE(res1.precision.has_value());
    REQUIRE(res1.recall.has_value());
    CHECK(*res1.precision == doctest::Approx(1.0));
    CHECK(*res1.recall == doctest::Approx(1.0));
}

TEST_CASE("cross_validate: error taxonomy") {
    auto ds = separable_ds(3, 1);  // 6 rows
    CHECK_THROWS_AS(cross_validate(ds, Algorithm::DT, 10, 1), TooFewRows);
    CHECK_THROWS_AS(cross_validate(ds, Algorithm::DT, 1, 1), ConfigError);
    CHECK_THROWS_AS(algorithm_from_name("XGB"), UnsupportedAlgorithm);
    features::FeatureMatrix empty;
    CHECK_THROWS_AS(train(make_labeled(std::move(empty)), Algorithm::DT,
                          std::nullopt, {}, 1),
                    DegenerateDataset);
}

TEST_CASE("stratified_folds: disjoint cover with balanced classes") {
    auto ds = overlap_ds(23, 77, 5);
    const int folds = 10;
    auto fold_of = stratified_folds(ds, folds, 99);
    REQUIRE(fold_of.size() == ds.size());

    std::vector<int> size(folds, 0);
    std::vector<int> pos(folds, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        REQUIRE(fold_of[i] >= 0);
        REQUIRE(fold_of[i] < folds);
        ++size[fold_of[i]];
        pos[fold_of[i]] += *ds.matrix.rows[i].label;
    }
    // partitions cover the dataset and are near-equal per class
    CHECK(std::accumulate(size.begin(), size.end(), 0) == 100);
    auto [szmin, szmax] = std::minmax_element(size.begin(), size.end());
    CHECK(*szmax - *szmin <= 1);
    auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
    CHECK(*pmax - *pmin <= 1);
}

TEST_CASE("random_search: reproducible and finds the better configuration") {
    auto ds = separable_ds(12, 77);
    // epochs=0 leaves logistic regression untrained (chance); 400 separates
    SearchSpace space = {{"epochs", {0.0, 400.0}}};
    auto best = random_search(ds, Algorithm::LR, space, 8, 123, 4);
    CHECK(best.at("epochs") == doctest::Approx(400.0));

    auto rerun = random_search(ds, Algorithm::LR, space, 8, 123, 4);
    CHECK(best == rerun);

    auto single = random_search(ds, Algorithm::LR, space, 1, 123, 4);
    CHECK((single.at("epochs") == 0.0 || single.at("epochs") == 400.0));

    CHECK_THROWS_AS(random_search(ds, Algorithm::LR, space, 0, 1, 4), ConfigError);
}

TEST_CASE("information_gain: label copy is maximal, constants are zero") {
    features::FeatureMatrix m;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 60; ++i) {
        const int label = i < 24 ? 1 : 0;
        auto v = base_features();
        v.f3 = label == 1;  // F3 mirrors the label exactly
        v.f7 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        m.rows.push_back(make_row(i, v, label));
    }
    auto ds = make_labeled(std::move(m));
    auto ranked = information_gain(ds);
    REQUIRE(ranked.size() == 13);
    CHECK(ranked.front().first == "F3");
    CHECK(ranked.front().second == doctest::Approx(h2(24.0 / 60.0)).epsilon(1e-12));
    for (std::size_t i = 1; i < ranked.size(); ++i)
        CHECK(ranked[i - 1].second >= ranked[i].second);  // descending
    // constant features carry no information
    for (const auto& [name, ig] : ranked)
        if (name == "F4" || name == "F11" || name == "F12")
            CHECK(ig == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("information_gain: hand-computed joint distribution") {
    // f7=0.0 -> 40 non-relevant, 10 relevant; f7=1.0 -> 5 non-relevant, 45 relevant
    features::FeatureMatrix m;
    int id = 0;
    auto add = [&](double conf, int label, int count) {
        for (int i = 0; i < count; ++i) {
            auto v = base_features();
            v.f7 = conf;
            m.rows.push_back(make_row(id++, v, label));
        }
    };
    add(0.0, 0, 40);
    add(0.0, 1, 10);
    add(1.0, 0, 5);
    add(1.0, 1, 45);
    auto ds = make_labeled(std::move(m));

    const double expected = h2(0.55) - 0.5 * h2(0.2) - 0.5 * h2(0.9);
    auto ranked = information_gain(ds);
    double ig_f7 = -1.0;
    for (const auto& [name, ig] : ranked)
        if (name == "F7") ig_f7 = ig;
    CHECK(ig_f7 == doctest::Approx(expected).epsilon(1e-9));
    CHECK(ranked.front().first == "F7");
}

TEST_CASE("apply_filter: accept-all, reject-all, and dedup") {
    features::FeatureMatrix m;
    m.rows.push_back(make_row(0, base_features(), std::nullopt, "latency"));
    m.rows.push_back(make_row(1, base_features(), std::nullopt, "latency"));
    m.rows.push_back(make_row(2, base_features(), std::nullopt, "jitter"));

    features::FeatureMatrix all_pos;
    for (int i = 0; i < 8; ++i) all_pos.rows.push_back(make_row(i, base_features(), 1));
    auto accept = train(make_labeled(std::move(all_pos)), Algorithm::DT,
                        std::nullopt, {}, 1);
    auto out = apply_filter(accept, m);
    CHECK(out.lemmas == std::set<std::string>{"latency", "jitter"});  // deduped

    features::FeatureMatrix all_neg;
    for (int i = 0; i < 8; ++i) all_neg.rows.push_back(make_row(i, base_features(), 0));
    auto reject = train(make_labeled(std::move(all_neg)), Algorithm::DT,
                        std::nullopt, {}, 1);
    CHECK(apply_filter(reject, m).empty());

    auto stale = accept;
    stale.matrix_schema = "reqterm-matrix v0";
    CHECK_THROWS_AS(apply_filter(stale, m), SchemaMismatch);
}

TEST_CASE("apply_filter: output never leaves the input lemma set") {
    auto pool = overlap_ds(40, 160, 31);
    auto model = train_preset(pool, TrainingMode::Moderate, 8);
    auto fresh = overlap_ds(25, 75, 77);
    auto out = apply_filter(model, fresh.matrix);
    std::set<std::string> input_lemmas;
    for (const auto& row : fresh.matrix.rows) input_lemmas.insert(row.record.lemma);
    for (const auto& lemma : out.lemmas) CHECK(input_lemmas.count(lemma) == 1);
}

TEST_CASE("presets: algorithm pairing and cost structure") {
    auto ds = overlap_ds(40, 120, 9);
    auto strict = train_preset(ds, TrainingMode::Strict, 5);
    CHECK(strict.algorithm == Algorithm::RF);
    CHECK(strict.training_mode == TrainingMode::Strict);
    CHECK(strict.cost.cost_fn == doctest::Approx(1.0));

    auto moderate = train_preset(ds, TrainingMode::Moderate, 5);
    CHECK(moderate.algorithm == Algorithm::RF);
    CHECK(moderate.training_mode == TrainingMode::Moderate);

    auto lenient = train_preset(ds, TrainingMode::Lenient, 5);
    CHECK(lenient.algorithm == Algorithm::SVM);
    CHECK(lenient.cost.cost_fn == doctest::Approx(2.0 * lenient.cost.cost_fp));

    CHECK_THROWS_AS(train_preset(ds, TrainingMode::Custom, 5), ConfigError);
}

TEST_CASE("presets: mean recall grows with leniency") {
    const int seeds = 24;
    double rec_strict = 0.0, rec_moderate = 0.0, rec_lenient = 0.0;
    for (int s = 0; s < seeds; ++s) {
        auto pool = overlap_ds(45, 255, 9000 + s);
        auto held_out = overlap_ds(30, 170, 50000 + s);
        auto recall_of = [&](const FilterModel& model) {
            int tp = 0, fn = 0;
            for (const auto& row : held_out.matrix.rows) {
                if (*row.label != 1) continue;
                (model.classify(row.features) == 1 ? tp : fn) += 1;
            }
            return static_cast<double>(tp) / (tp + fn);
        };
        rec_strict += recall_of(train_preset(pool, TrainingMode::Strict, 100 + s));
        rec_moderate += recall_of(train_preset(pool, TrainingMode::Moderate, 100 + s));
        rec_lenient += recall_of(train_preset(pool, TrainingMode::Lenient, 100 + s));
    }
    rec_strict /= seeds;
    rec_moderate /= seeds;
    rec_lenient /= seeds;
    CAPTURE(rec_strict);
    CAPTURE(rec_moderate);
    CAPTURE(rec_lenient);
    CHECK(rec_lenient >= rec_moderate);
    CHECK(rec_moderate >= rec_strict);
    CHECK(rec_lenient > rec_strict);  // the ends must separate
}

TEST_CASE("model persistence: reloaded models classify identically") {
    auto dir = std::filesystem::temp_directory_path() / "reqterm_model_test";
    std::filesystem::create_directories(dir);
    auto ds = separable_ds(15, 3);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<features::FeatureVector> probes;
    for (int i = 0; i < 200; ++i) {
        auto v = base_features();
        v.f1 = static_cast<text::Pos>(i % 5);
        v.f2 = static_cast<text::Pos>((i * 3) % 5);
        v.f3 = v.f1 == v.f2;
        v.f4 = 1 + i % 15;
        v.f5 = 1 + (i * 7) % 15;
        v.f6 = static_cast<double>(std::min(v.f4, v.f5)) / std::max(v.f4, v.f5);
        v.f7 = unit(rng);
        v.f8 = i % 9;
        v.f9 = unit(rng);
        v.f9_defined = i % 3 != 0;
        v.f10 = i % 10;
        v.f11 = (i * 7) % 10;
        v.f12 = unit(rng);
        v.f13 = v.f12 + unit(rng);
        probes.push_back(v);
    }

    for (auto a : kAll) {
        CAPTURE(algorithm_name(a));
        auto model = train(ds, a, CostMatrix{2.0, 1.0}, {}, 17);
        const auto path = dir / (algorithm_name(a) + ".json");
        save_model(model, path);
        auto loaded = load_model(path);
        CHECK(loaded.algorithm == model.algorithm);
        CHECK(loaded.training_mode == model.training_mode);
        CHECK(loaded.hyperparams == model.hyperparams);
        CHECK(loaded.cost.cost_fn == model.cost.cost_fn);
        CHECK(loaded.cost.cost_fp == model.cost.cost_fp);
        CHECK(loaded.matrix_schema == features::FeatureMatrix::schema_version());
        for (const auto& v : probes) CHECK(loaded.classify(v) == model.classify(v));
        for (const auto& row : ds.matrix.rows)
            CHECK(loaded.classify(row.features) == model.classify(row.features));
    }

    // malformed files and foreign formats are rejected
    const auto bad = dir / "bad.json";
    io::write_file(bad, "{not json");
    CHECK_THROWS_AS(load_model(bad), IoError);
    io::write_file(bad, "{\"format\": \"other v2\"}");
    CHECK_THROWS_AS(load_model(bad), SchemaMismatch);
    std::filesystem::remove_all(dir);
}

TEST_CASE("training is deterministic per seed") {
    auto ds = overlap_ds(30, 90, 12);
    auto probe = overlap_ds(20, 60, 13);
    for (auto a : kAll) {
        CAPTURE(algorithm_name(a));
        auto m1 = train(ds, a, std::nullopt, {}, 42);
        auto m2 = train(ds, a, std::nullopt, {}, 42);
        for (const auto& row : probe.matrix.rows)
            CHECK(m1.classify(row.features) == m2.classify(row.features));
    }
}
