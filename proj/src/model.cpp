#include "sslnl/nn/model.hpp"

namespace sslnl::nn {

EncoderConfig tiny_preset(int in_h, int in_w, int in_c) {
    EncoderConfig cfg;
    cfg.in_h = in_h;
    cfg.in_w = in_w;
    cfg.in_c = in_c;
    cfg.stages = {{16, 1, 2}, {32, 1, 2}, {64, 1, 2}};
    cfg.feature_dim = 64;
    cfg.preset = "tiny";
    return cfg;
}

EncoderConfig resnet18like_preset(int in_h, int in_w, int in_c) {
    EncoderConfig cfg;
    cfg.in_h = in_h;
    cfg.in_w = in_w;
    cfg.in_c = in_c;
    cfg.stages = {{64, 2, 1}, {128, 2, 2}, {256, 2, 2}, {512, 2, 2}};
    cfg.feature_dim = 512;
    cfg.preset = "resnet18like";
    return cfg;
}

EncoderConfig preset_by_name(const std::string& name, int in_h, int in_w, int in_c) {
    if (name == "tiny") return tiny_preset(in_h, in_w, in_c);
    if (name == "resnet18like") return resnet18like_preset(in_h, in_w, in_c);
    fail("config", "unknown encoder preset: " + name);
}

std::string HeadSpec::kind_name() const {
    switch (kind) {
        case Kind::Classifier: return "classifier";
        case Kind::Rotation: return "rotation";
        case Kind::Permutation: return "permutation";
        case Kind::Projection: return "projection";
    }
    return "?";
}

template <typename S>
void Encoder<S>::configure(const EncoderConfig& cfg) {
    check(!cfg.stages.empty(), "config", "encoder needs at least one stage");
    check(cfg.feature_dim > 0, "config", "feature_dim must be positive");
    check(cfg.in_c > 0 && cfg.in_h > 0 && cfg.in_w > 0, "config", "bad encoder input size");
    for (const StageSpec& s : cfg.stages)
        check(s.channels > 0 && s.blocks > 0 && (s.stride == 1 || s.stride == 2), "config",
              "stage needs channels>0, blocks>0, stride in {1,2}");
    cfg_ = cfg;

    stem_.configure("encoder.stem", cfg.in_c, cfg.stages[0].channels, 3, 1);
    stem_bn_.configure("encoder.stem_bn", cfg.stages[0].channels);

    blocks_.clear();
    int prev = cfg.stages[0].channels;
    for (std::size_t si = 0; si < cfg.stages.size(); ++si) {
        const StageSpec& st = cfg.stages[si];
        for (int bi = 0; bi < st.blocks; ++bi) {
            BasicBlock<S> block;
            const int stride = (bi == 0) ? st.stride : 1;
            block.configure("encoder.stage" + std::to_string(si) + ".block" + std::to_string(bi), prev,
                            st.channels, stride);
            blocks_.push_back(std::move(block));
            prev = st.channels;
        }
    }
    has_neck_ = (prev != cfg.feature_dim);
    if (has_neck_) neck_.configure("encoder.neck", prev, cfg.feature_dim);
}

template <typename S>
void Encoder<S>::init(Rng& rng) {
    stem_.init(rng);
    for (auto& b : blocks_) b.init(rng);
    if (has_neck_) neck_.init(rng);
}

template <typename S>
MatX<S> Encoder<S>::forward(const Tensor4<S>& x, bool train) {
    Tensor4<S> t = stem_relu_.forward(stem_bn_.forward(stem_.forward(x), train));
    for (auto& b : blocks_) t = b.forward(t, train);
    MatX<S> feat = gap_.forward(t);
    if (has_neck_) feat = neck_.forward(feat);
    return feat;
}

template <typename S>
Tensor4<S> Encoder<S>::backward(const MatX<S>& dfeat) {
    MatX<S> d = has_neck_ ? neck_.backward(dfeat) : dfeat;
    Tensor4<S> t = gap_.backward(d);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) t = it->backward(t);
    return stem_.backward(stem_bn_.backward(stem_relu_.backward(std::move(t))));
}

template <typename S>
void Model<S>::build(const EncoderConfig& cfg, const HeadSpec& head, std::uint64_t seed) {
    head_spec_ = head;
    if (head.kind == HeadSpec::Kind::Rotation)
        check(head.out_dim == 4, "config", "rotation head predicts exactly 4 angles");
    check(head.out_dim >= 1, "config", "head output dimension must be positive");
    if (head.kind == HeadSpec::Kind::Permutation)
        check(head.num_patches >= 2, "config", "permutation head needs >= 2 patches");
    else
        check(head.num_patches == 1, "config", head.kind_name() + " head takes a single input stream");

    encoder_.configure(cfg);
    const int d = cfg.feature_dim;
    head_two_layers_ = (head.kind == HeadSpec::Kind::Projection);
    if (head.kind == HeadSpec::Kind::Permutation)
        head_fc1_.configure("head.fc1", d * head.num_patches, head.out_dim);
    else if (head_two_layers_)
        head_fc1_.configure("head.fc1", d, d);
    else
        head_fc1_.configure("head.fc1", d, head.out_dim);
    if (head_two_layers_) head_fc2_.configure("head.fc2", d, head.out_dim);

    Rng rng(derive_seed(seed, "model-init"));
    encoder_.init(rng);
    head_fc1_.init(rng);
    if (head_two_layers_) head_fc2_.init(rng);
}

template <typename S>
MatX<S> Model<S>::forward(const Tensor4<S>& x, bool train) {
    const int g = head_spec_.num_patches;
    if (x.n % g != 0)
        fail("shape", "batch rows (" + std::to_string(x.n) + ") not divisible by patches per sample (" +
                          std::to_string(g) + ")");
    MatX<S> feat = encoder_.forward(x, train);
    last_groups_ = x.n / g;

    MatX<S> head_in;
    if (g > 1) {
        const int d = encoder_.feature_dim();
        head_in.resize(last_groups_, g * d);
        for (int s = 0; s < last_groups_; ++s)
            for (int p = 0; p < g; ++p) head_in.block(s, p * d, 1, d) = feat.row(s * g + p);
    } else {
        head_in = std::move(feat);
    }

    MatX<S> out = head_fc1_.forward(head_in);
    if (head_two_layers_) {
        head_hidden_mask_.assign(static_cast<std::size_t>(out.rows()) * out.cols(), 0);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                if (out(i, j) > S(0))
                    head_hidden_mask_[static_cast<std::size_t>(i) * out.cols() + j] = 1;
                else
                    out(i, j) = S(0);
            }
        out = head_fc2_.forward(out);
    }
    return out;
}

template <typename S>
void Model<S>::backward(const MatX<S>& dlogits) {
    MatX<S> d = dlogits;
    if (head_two_layers_) {
        d = head_fc2_.backward(d);
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j)
                if (!head_hidden_mask_[static_cast<std::size_t>(i) * d.cols() + j]) d(i, j) = S(0);
    }
    d = head_fc1_.backward(d);

    const int g = head_spec_.num_patches;
    if (g > 1) {
        const int dd = encoder_.feature_dim();
        MatX<S> dfeat(last_groups_ * g, dd);
        for (int s = 0; s < last_groups_; ++s)
            for (int p = 0; p < g; ++p) dfeat.row(s * g + p) = d.block(s, p * dd, 1, dd);
        encoder_.backward(dfeat);
    } else {
        encoder_.backward(d);
    }
}

template <typename S>
MatX<S> Model<S>::features(const Tensor4<S>& x, bool train) {
    return encoder_.forward(x, train);
}

template <typename S>
std::vector<Param<S>*> Model<S>::parameters() {
    std::vector<Param<S>*> out;
    visit_params([&](Param<S>& p) { out.push_back(&p); });
    return out;
}

template <typename S>
std::size_t Model<S>::parameter_count() {
    std::size_t total = 0;
    visit_params([&](Param<S>& p) { total += p.size(); });
    return total;
}

template <typename S>
std::uint64_t Model<S>::parameter_hash() {
    std::uint64_t h = 1469598103934665603ull;
    visit_params([&](Param<S>& p) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(p.value.data());
        for (std::size_t i = 0; i < p.value.size() * sizeof(S); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    });
    return h;
}

template <typename S>
void Model<S>::reinit_head(std::uint64_t seed) {
    Rng rng(derive_seed(seed, "head-init"));
    head_fc1_.init(rng);
    std::fill(head_fc1_.bias.value.begin(), head_fc1_.bias.value.end(), S(0));
    if (head_two_layers_) {
        head_fc2_.init(rng);
        std::fill(head_fc2_.bias.value.begin(), head_fc2_.bias.value.end(), S(0));
    }
}

template <typename S>
Model<S> build_model(const EncoderConfig& cfg, const HeadSpec& head, std::uint64_t seed) {
    Model<S> m;
    m.build(cfg, head, seed);
    return m;
}

template class Encoder<float>;
template class Encoder<double>;
template class Model<float>;
template class Model<double>;
template Model<float> build_model<float>(const EncoderConfig&, const HeadSpec&, std::uint64_t);
template Model<double> build_model<double>(const EncoderConfig&, const HeadSpec&, std::uint64_t);

} // namespace sslnl::nn
