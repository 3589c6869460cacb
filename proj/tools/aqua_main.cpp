#include "aqua/commands.hpp"
#include "aqua/physics.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

aqua::RunConfig load_config(const std::string& config_path, std::optional<std::uint64_t> seed) {
    aqua::RunConfig cfg =
        config_path.empty() ? aqua::RunConfig{} : aqua::RunConfig::parse_file(config_path);
    if (seed) cfg.set_seed(*seed);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater image restoration via learned transmission maps"};
    app.require_subcommand(1);

    std::string config_path, out_dir, corpus_dir, checkpoint, init_checkpoint;
    std::optional<std::uint64_t> seed;
    std::optional<int> count;
    double epsilon_t = aqua::kDefaultEpsilonT;
    std::vector<std::string> images;
    std::vector<std::string> eval_files;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic degraded corpus");
    synth->add_option("--config", config_path, "Run configuration file");
    synth->add_option("--seed", seed, "Override the config seed");
    synth->add_option("--count", count, "Override the sample count");
    synth->add_option("--out", out_dir, "Output corpus directory")->required();

    auto* train = app.add_subcommand("train", "Train one phase on a corpus");
    train->add_option("--config", config_path, "Run configuration file");
    train->add_option("--seed", seed, "Override the config seed");
    train->add_option("--corpus", corpus_dir, "Corpus directory with manifest.json")->required();
    train->add_option("--init", init_checkpoint, "Starting checkpoint (defaults to seeded init)");
    train->add_option("--out", out_dir, "Directory for model.ckpt and curve.csv")->required();

    auto* restore = app.add_subcommand("restore", "Restore images with a trained model");
    restore->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
    restore->add_option("--epsilon-t", epsilon_t, "Transmission floor used in the inversion");
    restore->add_option("--out", out_dir, "Output directory")->required();
    restore->add_option("images", images, "Input PNG images")->required();

    auto* eval = app.add_subcommand("eval", "Quality report over (original, restored) pairs");
    eval->add_option("--config", config_path, "Run configuration file (for the IQM weights)");
    eval->add_option("--out", out_dir, "Output CSV path")->required();
    eval->add_option("pairs", eval_files, "ORIG RESTORED [ORIG RESTORED ...]")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            aqua::RunConfig cfg = load_config(config_path, seed);
            if (count) cfg.count = *count;
            aqua::cmd_synth(cfg, out_dir);
        } else if (train->parsed()) {
            aqua::cmd_train(load_config(config_path, seed), corpus_dir, out_dir, init_checkpoint);
            std::cout << "checkpoint and loss curve written to " << out_dir << "\n";
        } else if (restore->parsed()) {
            const auto res = aqua::cmd_restore(checkpoint, images, out_dir, epsilon_t);
            std::cout << "restored " << res.restored.size() << " images to " << out_dir << "\n";
        } else if (eval->parsed()) {
            if (eval_files.size() % 2 != 0)
                throw std::runtime_error("eval expects an even list: ORIG RESTORED ...");
            std::vector<std::pair<std::string, std::string>> pairs;
            for (std::size_t i = 0; i < eval_files.size(); i += 2)
                pairs.emplace_back(eval_files[i], eval_files[i + 1]);
            const int rows = aqua::cmd_eval(pairs, out_dir,
                                            load_config(config_path, seed).train.iqm_weights);
            std::cout << "wrote " << rows << " rows to " << out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
