#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace reqterm::cli {

// Effective settings of one run. Serialized as JSON next to every command's
// outputs so that re-running from the dump reproduces them byte for byte.
struct RunConfig {
    std::vector<std::string> inputs;  // requirements document paths
    std::string backend = "stub";     // backend spec for the model gateway
    int k = 15;                       // predictions per mask
    std::string preset = "none";      // none | strict | moderate | lenient
    std::string models_dir = "models";
    std::string common_words;  // path; empty = no common-word list
    std::string vague_words;   // path; empty = no vague-word list
    std::string embeddings;    // path; empty = exact lemma matching only
    std::string corpus_cache;  // path; empty = frequency features disabled
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    std::vector<int> ks = {5, 10, 15, 20};  // k levels for simulate
    int repeats = 5;                        // repeats per document for simulate/eval
    double split_ratio = 0.5;
    bool plots = false;   // emit SVG box plots alongside tables
    bool online = false;  // allow live article fetching in build-corpus
};

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

// Sanity checks shared by all commands: k >= 1, repeats >= 1, ratio in (0,1),
// a known preset name, and readable input files. Throws ConfigError.
void validate_config(const RunConfig& config);

struct CommandResult {
    std::vector<std::filesystem::path> outputs;  // files written, in order
};

// Recommends potentially missing terms for each input document: masks every
// noun/verb, queries the backend, drops known/noise terms, optionally applies
// the preset's trained relevance filter, and reports the deduplicated
// survivors with confidences, mask contexts, and feature values.
CommandResult cmd_recommend(const RunConfig& config);

// Withholding simulation: per-k accuracy/coverage rows with pairwise
// statistics, plus filtered-vs-unfiltered repeats when a preset is configured.
CommandResult cmd_simulate(const RunConfig& config);

// Builds the labelled dataset from the input documents and trains the three
// preset models; emits the cross-validation table and the information-gain
// ranking. Needs at least two documents.
CommandResult cmd_train_filter(const RunConfig& config);

// Fetches (or reuses from cache) one article per document key phrase and
// writes a per-document corpus summary.
CommandResult cmd_build_corpus(const RunConfig& config);

// Evaluates trained preset models against the input documents with fresh
// withholding splits and reports per-run and aggregated metrics.
CommandResult cmd_eval_filter(const RunConfig& config);

// Minimal SVG box-and-whisker plot: one box per group, whiskers spanning the
// full range, y axis covering at least [0, 1] (all plotted metrics are
// proportions). Groups with no values get a label but no box.
void write_box_plot(
    const std::filesystem::path& path, const std::string& title,
    const std::string& y_label,
    const std::vector<std::pair<std::string, std::vector<double>>>& groups);

// Full argument-vector entry point: subcommand dispatch, config-file loading
// with flag overrides, and error reporting. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace reqterm::cli
