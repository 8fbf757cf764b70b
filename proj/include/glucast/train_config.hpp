#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "glucast/errors.hpp"

namespace glucast::training {

enum class Phase { pretrain1, pretrain2, finetune };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::pretrain1: return "pretrain1";
        case Phase::pretrain2: return "pretrain2";
        case Phase::finetune: return "finetune";
    }
    return "finetune";
}

inline Phase phase_from_name(const std::string& name) {
    if (name == "pretrain1") return Phase::pretrain1;
    if (name == "pretrain2") return Phase::pretrain2;
    if (name == "finetune") return Phase::finetune;
    throw ConfigError("unknown training phase '" + name + "'");
}

// Hyper-parameters attached to a training run and recorded in checkpoints.
struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 1;
    std::size_t ph_minutes = 30;   // prediction horizon
    std::size_t window_len = 12;   // input samples per window
    Phase phase = Phase::finetune;

    std::size_t horizon_steps() const { return ph_minutes / 5; }

    void validate() const {
        if (epochs == 0) throw ConfigError("epochs must be at least 1");
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
        if (ph_minutes == 0 || ph_minutes % 5 != 0) {
            throw ConfigError("ph_minutes must be a positive multiple of 5");
        }
        if (window_len == 0) throw ConfigError("window_len must be positive");
    }

    bool operator==(const TrainConfig&) const = default;
};

}  // namespace glucast::training
