#include "reqterm/evaluation_harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "reqterm/errors.hpp"
#include "reqterm/feature_extractor.hpp"
#include "reqterm/seeds.hpp"

namespace reqterm::eval {

namespace {

// 1-based midranks of the pooled sample (ties share the average rank).
std::vector<double> midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n,
                         double w_obs) {
    // Enumerate every way to assign n of the pooled ranks to the first
    // sample; the mask starts as 1^n 0^m and prev_permutation walks all
    // C(n+m, n) distinct arrangements.
    const std::size_t total_n = ranks.size();
    std::vector<char> mask(total_n, 0);
    std::fill(mask.begin(), mask.begin() + n, 1);
    long long le = 0, ge = 0, total = 0;
    do {
        double w = 0.0;
        for (std::size_t i = 0; i < total_n; ++i)
            if (mask[i]) w += ranks[i];
        le += (w <= w_obs + 1e-9);
        ge += (w >= w_obs - 1e-9);
        ++total;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    const double p =
        2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, p);
}

text::AnnotatedDocument half_document(const text::AnnotatedDocument& doc,
                                      const std::vector<std::size_t>& keep,
                                      const std::string& suffix) {
    text::AnnotatedDocument half;
    half.doc_id = doc.doc_id + suffix;
    for (auto i : keep) half.sentences.push_back(doc.sentences[i]);
    half.source_text = text::detokenize(half);
    return half;
}

struct RunOutcome {
    DocumentSplit split;
    std::vector<engine::PredictionRecord> preds;
    text::TermSet d;
    text::TermSet n;
};

RunOutcome run_once(const HarnessContext& ctx,
                    const text::AnnotatedDocument& doc, int k,
                    std::uint64_t seed) {
    RunOutcome out;
    out.split = split_document(doc, ctx.split_ratio, seed);
    out.preds =
        disclosed_predictions(out.split.disclosed, *ctx.backend, ctx.wordlists, k);
    out.d = recommendation_set(out.preds);
    out.n = novel_withheld(out.split, ctx.wordlists);
    return out;
}

std::vector<double> defined_values(const std::vector<ExpiRow>& rows, int k,
                                   bool want_accuracy) {
    std::vector<double> vals;
    for (const auto& row : rows) {
        if (row.k != k) continue;
        const auto& metric = want_accuracy ? row.accuracy : row.coverage;
        if (metric) vals.push_back(*metric);
    }
    return vals;
}

}  // namespace

DocumentSplit split_document(const text::AnnotatedDocument& doc, double ratio,
                             std::uint64_t seed) {
    if (doc.sentences.size() < 2) throw TooSmall(doc.sentences.size());
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ConfigError("split ratio must lie strictly between 0 and 1");

    const std::size_t n = doc.sentences.size();
    const auto withheld_count = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * (1.0 - ratio)));
    const std::size_t disclosed_count = n - withheld_count;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> h1(order.begin(), order.begin() + disclosed_count);
    std::vector<std::size_t> h2(order.begin() + disclosed_count, order.end());
    std::sort(h1.begin(), h1.end());
    std::sort(h2.begin(), h2.end());

    DocumentSplit split;
    split.disclosed = half_document(doc, h1, ":h1");
    split.withheld = half_document(doc, h2, ":h2");
    split.seed = seed;
    split.ratio = ratio;
    return split;
}

std::optional<double> accuracy_metric(const text::TermSet& d,
                                      const text::TermSet& n,
                                      const lex::Matcher& matcher) {
    if (d.empty()) return std::nullopt;
    std::size_t matched = 0;
    for (const auto& t : d.lemmas)
        for (const auto& other : n.lemmas)
            if (matcher.terms_match(t, other)) {
                ++matched;
                break;
            }
    return static_cast<double>(matched) / static_cast<double>(d.size());
}

std::optional<double> coverage_metric(const text::TermSet& d,
                                      const text::TermSet& n,
                                      const lex::Matcher& matcher) {
    if (n.empty()) return std::nullopt;
    std::size_t matched = 0;
    for (const auto& t : n.lemmas)
        for (const auto& other : d.lemmas)
            if (matcher.terms_match(t, other)) {
                ++matched;
                break;
            }
    return static_cast<double>(matched) / static_cast<double>(n.size());
}

ClassificationMetrics classification_metrics(std::size_t tp, std::size_t fp,
                                             std::size_t tn, std::size_t fn) {
    const std::size_t total = tp + fp + tn + fn;
    if (total == 0)
        throw ConfigError("classification metrics need at least one outcome");
    ClassificationMetrics m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp > 0)
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0)
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return m;
}

double wilcoxon_rank_sum(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
    if (xs.empty() || ys.empty())
        throw ConfigError("rank-sum test needs non-empty samples");
    const std::size_t n = xs.size(), m = ys.size(), total_n = n + m;

    std::vector<double> pooled(xs);
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    const auto ranks = midranks(pooled);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += ranks[i];

    if (n <= 8 && m <= 8) return exact_two_sided_p(ranks, n, w);

    const double mean = static_cast<double>(n) * (total_n + 1) / 2.0;
    std::map<double, std::size_t> tie_groups;
    for (double v : pooled) ++tie_groups[v];
    double tie_term = 0.0;
    for (const auto& [value, t] : tie_groups)
        tie_term += static_cast<double>(t) * t * t - static_cast<double>(t);
    const double nn = static_cast<double>(total_n);
    const double var = static_cast<double>(n) * m / 12.0 *
                       ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0;

    double z = w - mean;
    z -= 0.5 * (z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0));  // continuity
    z /= std::sqrt(var);
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

double vargha_delaney_a12(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
    if (xs.empty() || ys.empty())
        throw ConfigError("effect size needs non-empty samples");
    double score = 0.0;
    for (double x : xs)
        for (double y : ys) {
            if (x > y) score += 1.0;
            else if (x == y) score += 0.5;
        }
    return score / (static_cast<double>(xs.size()) * ys.size());
}

std::vector<engine::PredictionRecord> disclosed_predictions(
    const text::AnnotatedDocument& disclosed, const mlm::Backend& backend,
    const text::Wordlists& wl, int k) {
    const auto bag = engine::collect_predictions(disclosed, backend, k);
    return engine::basic_filter(bag, text::term_set(disclosed), wl);
}

text::TermSet novel_withheld(const DocumentSplit& split,
                             const text::Wordlists& wl) {
    return text::novel_terms(text::term_set(split.withheld),
                             text::term_set(split.disclosed), wl);
}

text::TermSet recommendation_set(
    const std::vector<engine::PredictionRecord>& preds) {
    text::TermSet d;
    for (const auto& p : preds) d.lemmas.insert(p.lemma);
    return d;
}

std::vector<ExpiRow> run_expi(const HarnessContext& ctx,
                              const std::vector<text::AnnotatedDocument>& docs,
                              const std::vector<int>& ks) {
    std::vector<ExpiRow> rows;
    for (const auto& doc : docs)
        for (int k : ks) {
            const auto seed = derive_seed(
                ctx.master_seed, "expi-" + doc.doc_id + "-k" + std::to_string(k));
            const auto run = run_once(ctx, doc, k, seed);
            ExpiRow row;
            row.doc_id = doc.doc_id;
            row.k = k;
            row.seed = seed;
            row.accuracy = accuracy_metric(run.d, run.n, ctx.matcher);
            row.coverage = coverage_metric(run.d, run.n, ctx.matcher);
            rows.push_back(std::move(row));
        }
    return rows;
}

std::vector<PairwiseStat> pairwise_by_k(const std::vector<ExpiRow>& rows) {
    std::set<int> levels;
    for (const auto& row : rows) levels.insert(row.k);
    const std::vector<int> ks(levels.begin(), levels.end());

    std::vector<PairwiseStat> stats;
    for (std::size_t a = 0; a < ks.size(); ++a)
        for (std::size_t b = a + 1; b < ks.size(); ++b) {
            PairwiseStat s;
            s.k_a = ks[a];
            s.k_b = ks[b];
            const auto acc_a = defined_values(rows, ks[a], true);
            const auto acc_b = defined_values(rows, ks[b], true);
            if (!acc_a.empty() && !acc_b.empty()) {
                s.p_accuracy = wilcoxon_rank_sum(acc_a, acc_b);
                s.a12_accuracy = vargha_delaney_a12(acc_a, acc_b);
            }
            const auto cov_a = defined_values(rows, ks[a], false);
            const auto cov_b = defined_values(rows, ks[b], false);
            if (!cov_a.empty() && !cov_b.empty()) {
                s.p_coverage = wilcoxon_rank_sum(cov_a, cov_b);
                s.a12_coverage = vargha_delaney_a12(cov_a, cov_b);
            }
            stats.push_back(s);
        }
    return stats;
}

ExpiiResult run_expii(const HarnessContext& ctx,
                      const std::vector<text::AnnotatedDocument>& docs) {
    features::FeatureMatrix combined;
    for (const auto& doc : docs) {
        const auto seed = derive_seed(ctx.master_seed, "expii-split-" + doc.doc_id);
        const auto run = run_once(ctx, doc, ctx.k, seed);
        auto matrix = features::build_matrix(run.preds, run.split.disclosed,
                                             ctx.stats, ctx.matcher);
        const auto labeled = filter::label_predictions(matrix, run.n, ctx.matcher);
        for (const auto& row : labeled.matrix.rows) combined.rows.push_back(row);
    }

    ExpiiResult result;
    result.data = filter::make_labeled(std::move(combined));
    result.ig = filter::information_gain(result.data);

    const auto moderate_ds = filter::undersample(
        result.data, derive_seed(ctx.master_seed, "expii-us-moderate"));
    const auto lenient_ds = filter::undersample(
        result.data, derive_seed(ctx.master_seed, "expii-us-lenient"));
    const filter::CostMatrix lenient_cost{2.0, 1.0};

    const filter::Algorithm algs[] = {filter::Algorithm::NN, filter::Algorithm::DT,
                                      filter::Algorithm::LR, filter::Algorithm::RF,
                                      filter::Algorithm::SVM};
    for (auto alg : algs)
        for (auto option :
             {filter::TrainingMode::Strict, filter::TrainingMode::Moderate,
              filter::TrainingMode::Lenient}) {
            const auto& ds = option == filter::TrainingMode::Strict ? result.data
                             : option == filter::TrainingMode::Moderate
                                 ? moderate_ds
                                 : lenient_ds;
            const std::optional<filter::CostMatrix> cost =
                option == filter::TrainingMode::Lenient
                    ? std::optional<filter::CostMatrix>(lenient_cost)
                    : std::nullopt;
            const auto cv_seed = derive_seed(
                ctx.master_seed, "expii-cv-" + filter::algorithm_name(alg) + "-" +
                                     filter::training_mode_name(option));
            ExpiiRow row{alg, option,
                         filter::cross_validate(ds, alg, 10, cv_seed, cost, {})};
            result.table.push_back(row);
        }
    return result;
}

std::vector<EvaluationReport> run_expiii(
    const HarnessContext& ctx, const std::vector<text::AnnotatedDocument>& docs,
    const std::vector<filter::FilterModel>& presets, int repeats) {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    std::vector<EvaluationReport> reports;
    for (int r = 0; r < repeats; ++r) {
        for (const auto& doc : docs) {
            const auto seed = derive_seed(
                ctx.master_seed,
                "expiii-r" + std::to_string(r) + "-" + doc.doc_id);
            const auto run = run_once(ctx, doc, ctx.k, seed);

            EvaluationReport base;
            base.doc_id = doc.doc_id;
            base.repeat = r;
            base.k = ctx.k;
            base.filter_mode = "none";
            base.run_seed = seed;
            base.accuracy = accuracy_metric(run.d, run.n, ctx.matcher);
            base.coverage = coverage_metric(run.d, run.n, ctx.matcher);
            reports.push_back(base);

            const auto matrix = features::build_matrix(
                run.preds, run.split.disclosed, ctx.stats, ctx.matcher);
            const auto truth =
                filter::label_predictions(matrix, run.n, ctx.matcher);
            for (const auto& model : presets) {
                EvaluationReport rep = base;
                rep.filter_mode = filter::training_mode_name(model.training_mode);
                const auto recommended = filter::apply_filter(model, matrix);
                rep.accuracy = accuracy_metric(recommended, run.n, ctx.matcher);
                rep.coverage = coverage_metric(recommended, run.n, ctx.matcher);
                std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
                for (const auto& row : truth.matrix.rows) {
                    const int got = model.classify(row.features);
                    const int want = *row.label;
                    if (want == 1 && got == 1) ++tp;
                    else if (want == 0 && got == 1) ++fp;
                    else if (want == 0 && got == 0) ++tn;
                    else ++fn;
                }
                if (tp + fp + tn + fn > 0) {
                    const auto cls = classification_metrics(tp, fp, tn, fn);
                    rep.cls_accuracy = cls.accuracy;
                    rep.cls_precision = cls.precision;
                    rep.cls_recall = cls.recall;
                }
                reports.push_back(std::move(rep));
            }
        }
    }
    return reports;
}

}  // namespace reqterm::eval
