#include "aqua/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace aqua {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: " + value);
    }
    if (used != value.size()) throw ConfigError("config key '" + key + "': not a number: " + value);
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: " + value);
    }
    if (used != value.size())
        throw ConfigError("config key '" + key + "': not an integer: " + value);
    return v;
}

std::map<std::string, std::string> parse_pairs(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError("duplicate config key: " + key);
        kv[key] = value;
    }
    return kv;
}

} // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    auto kv = parse_pairs(text);
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    RunConfig cfg;

    // phase first: it selects the training defaults
    TrainPhase phase = TrainPhase::supervised;
    if (const std::string v = take("phase"); !v.empty()) {
        if (v == "supervised")
            phase = TrainPhase::supervised;
        else if (v == "unsupervised")
            phase = TrainPhase::unsupervised;
        else
            throw ConfigError("config key 'phase': expected supervised or unsupervised");
    }
    cfg.train = TrainConfig::defaults(phase);

    if (const std::string v = take("epochs"); !v.empty())
        cfg.train.epochs = static_cast<int>(parse_int("epochs", v));
    if (const std::string v = take("learning_rate"); !v.empty())
        cfg.train.learning_rate = parse_double("learning_rate", v);
    if (const std::string v = take("momentum"); !v.empty())
        cfg.train.momentum = parse_double("momentum", v);
    if (const std::string v = take("batch_size"); !v.empty())
        cfg.train.batch_size = static_cast<int>(parse_int("batch_size", v));
    if (const std::string v = take("seed"); !v.empty())
        cfg.set_seed(static_cast<std::uint64_t>(parse_int("seed", v)));
    if (const std::string v = take("epsilon_t"); !v.empty())
        cfg.train.epsilon_t = parse_double("epsilon_t", v);
    if (const std::string v = take("soft_edge_steepness"); !v.empty())
        cfg.train.soft_edge_steepness = parse_double("soft_edge_steepness", v);

    if (const std::string v = take("lambda_c"); !v.empty())
        cfg.train.iqm_weights.lambda_c = parse_double("lambda_c", v);
    if (const std::string v = take("lambda_a"); !v.empty())
        cfg.train.iqm_weights.lambda_a = parse_double("lambda_a", v);
    if (const std::string v = take("lambda_bi"); !v.empty())
        cfg.train.iqm_weights.lambda_bi = parse_double("lambda_bi", v);
    if (const std::string v = take("lambda_g"); !v.empty())
        cfg.train.iqm_weights.lambda_g = parse_double("lambda_g", v);

    if (const std::string v = take("count"); !v.empty())
        cfg.count = static_cast<int>(parse_int("count", v));
    if (const std::string v = take("width"); !v.empty())
        cfg.width = static_cast<Eigen::Index>(parse_int("width", v));
    if (const std::string v = take("height"); !v.empty())
        cfg.height = static_cast<Eigen::Index>(parse_int("height", v));

    if (const std::string v = take("base"); !v.empty()) cfg.scene.base = v;
    if (const std::string v = take("depth_model"); !v.empty()) {
        if (v == "linear")
            cfg.scene.depth_model = DepthModel::linear;
        else if (v == "radial")
            cfg.scene.depth_model = DepthModel::radial;
        else if (v == "noise")
            cfg.scene.depth_model = DepthModel::noise;
        else
            throw ConfigError("config key 'depth_model': expected linear, radial or noise");
    }
    if (const std::string v = take("d_min"); !v.empty()) cfg.scene.d_min = parse_double("d_min", v);
    if (const std::string v = take("d_max"); !v.empty()) cfg.scene.d_max = parse_double("d_max", v);

    if (const std::string v = take("beta_preset"); !v.empty()) {
        try {
            cfg.scene.beta = beta_preset(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (const std::string v = take("beta_r"); !v.empty())
        cfg.scene.beta.beta_r = parse_double("beta_r", v);
    if (const std::string v = take("beta_g"); !v.empty())
        cfg.scene.beta.beta_g = parse_double("beta_g", v);
    if (const std::string v = take("beta_b"); !v.empty())
        cfg.scene.beta.beta_b = parse_double("beta_b", v);

    if (const std::string v = take("background_r"); !v.empty())
        cfg.scene.background.r = parse_double("background_r", v);
    if (const std::string v = take("background_g"); !v.empty())
        cfg.scene.background.g = parse_double("background_g", v);
    if (const std::string v = take("background_b"); !v.empty())
        cfg.scene.background.b = parse_double("background_b", v);

    if (!kv.empty()) throw ConfigError("unknown config key: " + kv.begin()->first);
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str());
}

void RunConfig::validate() const {
    try {
        train.validate();
        scene.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (count < 1) throw ConfigError("count must be >= 1");
    if (width < 1 || height < 1) throw ConfigError("width and height must be >= 1");
    const BackgroundLight& b = scene.background;
    if (b.r < 0 || b.r > 1 || b.g < 0 || b.g > 1 || b.b < 0 || b.b > 1)
        throw ConfigError("background channels must lie in [0,1]");
}

} // namespace aqua
