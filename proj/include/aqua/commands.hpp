#ifndef AQUA_COMMANDS_HPP
#define AQUA_COMMANDS_HPP

#include "aqua/config.hpp"
#include "aqua/trainer.hpp"

#include <string>
#include <utility>
#include <vector>

namespace aqua {

struct SynthResult {
    std::vector<std::string> degraded;
    std::vector<std::string> transmission;
    std::vector<std::string> clean;
    std::string manifest;
};

/// Generate a corpus on disk: degraded/clean PNG pairs, 16-bit transmission
/// maps, and a JSON manifest with one record per sample.
SynthResult cmd_synth(const RunConfig& cfg, const std::string& out_dir);

/// Load a corpus written by cmd_synth. Ground-truth maps are read only when
/// requested; the unsupervised phase never touches them.
std::vector<TrainSample> load_corpus(const std::string& corpus_dir, bool with_truth);

struct TrainResult {
    std::string checkpoint;
    std::string curve_csv;
    std::vector<double> curve;
};

/// Run the configured phase over a corpus; writes the final checkpoint and a
/// per-epoch `epoch,loss` CSV (mean MSE when supervised, mean smooth quality
/// score when unsupervised). An empty init path starts from seeded Glorot
/// weights.
TrainResult cmd_train(const RunConfig& cfg, const std::string& corpus_dir,
                      const std::string& out_dir, const std::string& init_checkpoint = "");

struct RestoreResult {
    std::vector<std::string> restored;
    std::vector<std::string> transmission;
};

/// Restore a batch of images with a trained checkpoint: per input, writes
/// <stem>_restored.png and the estimated map as <stem>_t.png.
RestoreResult cmd_restore(const std::string& checkpoint,
                          const std::vector<std::string>& inputs, const std::string& out_dir,
                          double epsilon_t = kDefaultEpsilonT);

/// Per-pair quality report CSV with the fixed header
/// file,q_c,q_a,q_bi,q_g,iqm,uciqe_in,uciqe_out. Mismatched pairs are
/// skipped with a warning; throws if every pair fails.
int cmd_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
             const std::string& out_csv, const IqmWeights& weights = {});

} // namespace aqua

#endif
