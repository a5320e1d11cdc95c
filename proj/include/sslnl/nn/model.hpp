#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sslnl/nn/layers.hpp"

namespace sslnl::nn {

struct StageSpec {
    int channels = 0;
    int blocks = 1;
    int stride = 1;
};

struct EncoderConfig {
    int in_h = 32, in_w = 32, in_c = 1;
    std::vector<StageSpec> stages;
    int feature_dim = 64;
    std::string preset = "custom";
};

// ~75k parameter residual net for desk-scale runs.
EncoderConfig tiny_preset(int in_h = 32, int in_w = 32, int in_c = 1);
// Stage layout of ResNet18 with a 3x3 stem (no 7x7/maxpool; desk inputs are small).
EncoderConfig resnet18like_preset(int in_h = 32, int in_w = 32, int in_c = 3);
EncoderConfig preset_by_name(const std::string& name, int in_h, int in_w, int in_c);

struct HeadSpec {
    enum class Kind { Classifier, Rotation, Permutation, Projection };
    Kind kind = Kind::Classifier;
    int out_dim = 2;     // K classes / 4 rotations / P permutations / projection dim
    int num_patches = 1; // g, permutation head only

    static HeadSpec classifier(int k) { return {Kind::Classifier, k, 1}; }
    static HeadSpec rotation() { return {Kind::Rotation, 4, 1}; }
    static HeadSpec permutation(int p, int g) { return {Kind::Permutation, p, g}; }
    static HeadSpec projection(int dim) { return {Kind::Projection, dim, 1}; }

    std::string kind_name() const;
};

// Stem conv-bn-relu, residual stages, global average pool, optional linear
// neck to feature_dim. One encoder instance is shared across puzzle patch
// streams (the patches travel as extra batch rows).
template <typename S>
class Encoder {
public:
    void configure(const EncoderConfig& cfg);
    void init(Rng& rng);

    // (N, C, H, W) -> (N, feature_dim)
    MatX<S> forward(const Tensor4<S>& x, bool train);
    Tensor4<S> backward(const MatX<S>& dfeat);

    int feature_dim() const { return cfg_.feature_dim; }
    const EncoderConfig& config() const { return cfg_; }
    Conv2d<S>& first_conv() { return stem_; }

    template <typename Fn>
    void visit_params(Fn&& fn) {
        fn(stem_.weight);
        fn(stem_.bias);
        fn(stem_bn_.gamma);
        fn(stem_bn_.beta);
        for (auto& b : blocks_) b.visit_params(fn);
        if (has_neck_) {
            fn(neck_.weight);
            fn(neck_.bias);
        }
    }
    template <typename Fn>
    void visit_buffers(Fn&& fn) {
        fn(stem_bn_.running_mean);
        fn(stem_bn_.running_var);
        for (auto& b : blocks_) b.visit_buffers(fn);
    }

private:
    EncoderConfig cfg_;
    Conv2d<S> stem_;
    BatchNorm2d<S> stem_bn_;
    Relu<S> stem_relu_;
    std::vector<BasicBlock<S>> blocks_;
    GlobalAvgPool<S> gap_;
    bool has_neck_ = false;
    Linear<S> neck_;
};

// Encoder plus one task head. Puzzle models consume g patches per sample:
// forward expects N*g batch rows and returns N logit rows over the
// concatenated patch features.
template <typename S>
class Model {
public:
    void build(const EncoderConfig& cfg, const HeadSpec& head, std::uint64_t seed);

    MatX<S> forward(const Tensor4<S>& x, bool train);
    // Accumulates parameter gradients; returns nothing (input grads unused).
    void backward(const MatX<S>& dlogits);

    // Features straight out of the encoder, no head (N rows).
    MatX<S> features(const Tensor4<S>& x, bool train);

    Encoder<S>& encoder() { return encoder_; }
    const EncoderConfig& encoder_config() const { return encoder_.config(); }
    const HeadSpec& head_spec() const { return head_spec_; }
    int patches_per_sample() const { return head_spec_.num_patches; }

    template <typename Fn>
    void visit_params(Fn&& fn) {
        encoder_.visit_params(fn);
        fn(head_fc1_.weight);
        fn(head_fc1_.bias);
        if (head_two_layers_) {
            fn(head_fc2_.weight);
            fn(head_fc2_.bias);
        }
    }
    template <typename Fn>
    void visit_encoder_params(Fn&& fn) {
        encoder_.visit_params(fn);
    }
    template <typename Fn>
    void visit_buffers(Fn&& fn) {
        encoder_.visit_buffers(fn);
    }

    std::vector<Param<S>*> parameters();
    std::size_t parameter_count();

    // FNV-1a over the raw parameter bytes, init/determinism comparisons.
    std::uint64_t parameter_hash();

    // Fresh head parameters, encoder untouched (pretext -> classifier reuse).
    void reinit_head(std::uint64_t seed);

private:
    Encoder<S> encoder_;
    HeadSpec head_spec_;
    Linear<S> head_fc1_;
    Linear<S> head_fc2_;
    Relu<S> head_relu_; // projection head hidden activation (as 1x1 tensor trick)
    bool head_two_layers_ = false;
    std::vector<char> head_hidden_mask_;
    MatX<S> feat_cache_shape_probe_;
    int last_groups_ = 0;
};

template <typename S>
Model<S> build_model(const EncoderConfig& cfg, const HeadSpec& head, std::uint64_t seed);

extern template class Encoder<float>;
extern template class Encoder<double>;
extern template class Model<float>;
extern template class Model<double>;
extern template Model<float> build_model<float>(const EncoderConfig&, const HeadSpec&, std::uint64_t);
extern template Model<double> build_model<double>(const EncoderConfig&, const HeadSpec&, std::uint64_t);

} // namespace sslnl::nn
