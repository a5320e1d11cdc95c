#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sslnl/nn/tensor.hpp"

namespace sslnl::nn {

enum class OptimizerKind { Sgd, Adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Sgd;
    double learning_rate = 0.01;
    double momentum = 0.9;     // SGD
    double weight_decay = 1e-4;
    double beta1 = 0.9;        // Adam
    double beta2 = 0.999;
    double eps = 1e-8;
};

enum class LrSchedule { Constant, CosineAnnealing };

inline double scheduled_lr(double base_lr, LrSchedule schedule, int epoch, int total_epochs) {
    if (schedule == LrSchedule::Constant || total_epochs <= 1) return base_lr;
    const double t = static_cast<double>(epoch) / total_epochs;
    return base_lr * 0.5 * (1.0 + std::cos(M_PI * t));
}

// Owns per-parameter state; bind() must be called once against the model's
// parameter list before step().
template <typename S>
class Optimizer {
public:
    explicit Optimizer(const OptimizerConfig& cfg) : cfg_(cfg) {}

    void bind(const std::vector<Param<S>*>& params) {
        params_ = params;
        slot1_.resize(params.size());
        slot2_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            slot1_[i].assign(params[i]->size(), S(0));
            if (cfg_.kind == OptimizerKind::Adam) slot2_[i].assign(params[i]->size(), S(0));
        }
        t_ = 0;
    }

    void zero_grad() {
        for (Param<S>* p : params_) std::fill(p->grad.begin(), p->grad.end(), S(0));
    }

    void step(double lr) {
        ++t_;
        if (cfg_.kind == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < params_.size(); ++i) {
                Param<S>& p = *params_[i];
                std::vector<S>& vel = slot1_[i];
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const double g = static_cast<double>(p.grad[j]) + cfg_.weight_decay * p.value[j];
                    const double v = cfg_.momentum * vel[j] + g;
                    vel[j] = static_cast<S>(v);
                    p.value[j] -= static_cast<S>(lr * v);
                }
            }
        } else {
            const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
            const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
            for (std::size_t i = 0; i < params_.size(); ++i) {
                Param<S>& p = *params_[i];
                std::vector<S>& m = slot1_[i];
                std::vector<S>& v = slot2_[i];
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const double g = static_cast<double>(p.grad[j]) + cfg_.weight_decay * p.value[j];
                    const double mj = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
                    const double vj = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
                    m[j] = static_cast<S>(mj);
                    v[j] = static_cast<S>(vj);
                    p.value[j] -= static_cast<S>(lr * (mj / bc1) / (std::sqrt(vj / bc2) + cfg_.eps));
                }
            }
        }
    }

private:
    OptimizerConfig cfg_;
    std::vector<Param<S>*> params_;
    std::vector<std::vector<S>> slot1_; // SGD velocity / Adam m
    std::vector<std::vector<S>> slot2_; // Adam v
    int t_ = 0;
};

} // namespace sslnl::nn
