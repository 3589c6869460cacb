#ifndef AQUA_CONFIG_HPP
#define AQUA_CONFIG_HPP

#include "aqua/synthgen.hpp"
#include "aqua/trainer.hpp"

#include <cstdint>
#include <string>

namespace aqua {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// On-disk run configuration: flat `key = value` lines, `#` comments.
/// Unknown keys are rejected. Every key has a default; paths are supplied on
/// the command line. `epochs` and `learning_rate` default per phase when not
/// given. Individual beta_* keys override `beta_preset`.
struct RunConfig {
    TrainConfig train = TrainConfig::defaults(TrainPhase::supervised);
    SceneSpec scene;
    int count = 10;
    Eigen::Index width = 64;
    Eigen::Index height = 64;

    static RunConfig parse_string(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    void set_seed(std::uint64_t s) {
        train.seed = s;
        scene.seed = s;
    }

    void validate() const;
};

} // namespace aqua

#endif
