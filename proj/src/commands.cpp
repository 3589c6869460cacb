#include "aqua/commands.hpp"

#include "aqua/checkpoint.hpp"
#include "aqua/metrics.hpp"
#include "aqua/network.hpp"
#include "aqua/physics.hpp"
#include "aqua/png_io.hpp"
#include "aqua/synthgen.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace aqua {

namespace {

std::string sample_name(int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "sample_%04d%s.png", index, suffix);
    return buf;
}

std::string format_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_curve_csv(const std::string& path, const std::vector<double>& curve) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write curve CSV: " + path);
    os << "epoch,loss\n";
    for (std::size_t e = 0; e < curve.size(); ++e)
        os << (e + 1) << "," << format_value(curve[e]) << "\n";
}

bool is_procedural_base(const std::string& base) {
    return base == "checkers" || base == "gradient" || base == "noise";
}

} // namespace

SynthResult cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);

    RgbImage file_base;
    const RgbImage* base_ptr = nullptr;
    if (!is_procedural_base(cfg.scene.base)) {
        file_base = read_image_png(cfg.scene.base);
        base_ptr = &file_base;
    }

    const auto samples = generate(cfg.scene, cfg.count, cfg.height, cfg.width, base_ptr);

    SynthResult res;
    ordered_json manifest = ordered_json::array();
    for (int k = 0; k < cfg.count; ++k) {
        const GeneratedSample& s = samples[k];
        const std::string degraded = sample_name(k, "");
        const std::string tmap = sample_name(k, "_t");
        const std::string clean = sample_name(k, "_clean");
        write_image_png((fs::path(out_dir) / degraded).string(), s.degraded);
        write_gray16_png((fs::path(out_dir) / tmap).string(), s.truth_t);
        write_image_png((fs::path(out_dir) / clean).string(), s.clean);

        ordered_json rec;
        rec["degraded"] = degraded;
        rec["transmission"] = tmap;
        rec["clean"] = clean;
        rec["background"] = {s.background.r, s.background.g, s.background.b};
        rec["beta"] = {cfg.scene.beta.beta_r, cfg.scene.beta.beta_g, cfg.scene.beta.beta_b};
        rec["seed"] = s.seed;
        manifest.push_back(rec);

        res.degraded.push_back(degraded);
        res.transmission.push_back(tmap);
        res.clean.push_back(clean);
    }

    res.manifest = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream os(res.manifest);
    if (!os) throw std::runtime_error("cannot write manifest: " + res.manifest);
    os << manifest.dump(2) << "\n";
    std::cout << "wrote " << cfg.count << " samples to " << out_dir << "\n";
    return res;
}

std::vector<TrainSample> load_corpus(const std::string& corpus_dir, bool with_truth) {
    const fs::path dir(corpus_dir);
    std::ifstream is(dir / "manifest.json");
    if (!is) throw std::runtime_error("no manifest.json in corpus: " + corpus_dir);
    ordered_json manifest;
    try {
        is >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest: " + std::string(e.what()));
    }

    std::vector<TrainSample> samples;
    for (const auto& rec : manifest) {
        TrainSample s;
        s.degraded = read_image_png((dir / rec.at("degraded").get<std::string>()).string());
        if (with_truth) {
            if (!rec.contains("transmission"))
                throw std::runtime_error("corpus record lacks a ground-truth transmission map");
            const fs::path tpath = dir / rec.at("transmission").get<std::string>();
            if (!fs::exists(tpath))
                throw std::runtime_error("missing ground-truth map: " + tpath.string());
            s.truth_t = read_gray16_png(tpath.string());
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

TrainResult cmd_train(const RunConfig& cfg, const std::string& corpus_dir,
                      const std::string& out_dir, const std::string& init_checkpoint) {
    cfg.validate();
    fs::create_directories(out_dir);

    const bool supervised = cfg.train.phase == TrainPhase::supervised;
    auto dataset = load_corpus(corpus_dir, supervised);

    ModelParams model =
        init_checkpoint.empty() ? glorot_init(cfg.train.seed) : load_params(init_checkpoint);

    TrainResult res;
    res.curve = supervised ? train_supervised(model, dataset, cfg.train)
                           : train_unsupervised(model, dataset, cfg.train);

    res.checkpoint = (fs::path(out_dir) / "model.ckpt").string();
    res.curve_csv = (fs::path(out_dir) / "curve.csv").string();
    save_params(model, res.checkpoint);
    write_curve_csv(res.curve_csv, res.curve);
    return res;
}

RestoreResult cmd_restore(const std::string& checkpoint,
                          const std::vector<std::string>& inputs, const std::string& out_dir,
                          double epsilon_t) {
    const ModelParams model = load_params(checkpoint);
    fs::create_directories(out_dir);

    RestoreResult res;
    for (const std::string& input : inputs) {
        const RgbImage img = read_image_png(input);
        const Plane t = forward(img, model);
        const BackgroundLight bg = estimate_background(img, t);
        const RgbImage restored = restore(img, t, bg, epsilon_t);

        const std::string stem = fs::path(input).stem().string();
        const std::string rpath = (fs::path(out_dir) / (stem + "_restored.png")).string();
        const std::string tpath = (fs::path(out_dir) / (stem + "_t.png")).string();
        write_image_png(rpath, restored);
        write_gray16_png(tpath, t);
        res.restored.push_back(rpath);
        res.transmission.push_back(tpath);
    }
    return res;
}

int cmd_eval(const std::vector<std::pair<std::string, std::string>>& pairs,
             const std::string& out_csv, const IqmWeights& weights) {
    std::ofstream os(out_csv);
    if (!os) throw std::runtime_error("cannot write report: " + out_csv);
    os << "file,q_c,q_a,q_bi,q_g,iqm,uciqe_in,uciqe_out\n";

    int written = 0;
    for (const auto& [orig_path, restored_path] : pairs) {
        const RgbImage orig = read_image_png(orig_path);
        const RgbImage restored = read_image_png(restored_path);
        if (!same_size(orig, restored)) {
            std::cerr << "warning: skipping pair with mismatched dimensions: " << orig_path
                      << " vs " << restored_path << "\n";
            continue;
        }
        const QualityReport rep = iqm_score(orig, restored, weights);
        os << fs::path(orig_path).filename().string() << "," << format_value(rep.q_c) << ","
           << format_value(rep.q_a) << "," << format_value(rep.q_bi) << ","
           << format_value(rep.q_g) << "," << format_value(rep.iqm) << ","
           << format_value(uciqe(orig)) << "," << format_value(uciqe(restored)) << "\n";
        ++written;
    }
    if (!pairs.empty() && written == 0)
        throw std::runtime_error("eval: every pair failed");
    return written;
}

} // namespace aqua
