#pragma once

#include <deque>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>

#include "bift/conv.hpp"
#include "bift/ops.hpp"
#include "bift/rng.hpp"
#include "bift/tape.hpp"

namespace bift {

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kInitStddev = 0.02;
inline constexpr int64_t kPgBottleneckDefault = 100;

// How the affine parameters of a modulation site are produced.
//   FT: spatially varying (N,C,H,W) gamma/beta from a parameter generator.
//   CIN: learned channelwise (N,C,1,1) vectors (generator + global average).
//   AdaIN: channelwise statistics of the guide features, no learned weights.
enum class AffineVariant { FT, CIN, AdaIN };

// Owns every trainable tensor of a model; insertion order is the canonical
// order for init, optimizer state and checkpoints. A deque keeps parameter
// addresses stable while layers hold pointers.
template <typename T>
class ParamStore {
 public:
  Parameter<T>& add(std::string name, Shape s) {
    check(!by_name_.contains(name), Err::InvalidArgument, "duplicate parameter " + name);
    params_.emplace_back(name, Tensor<T>(s));
    by_name_.emplace(std::move(name), &params_.back());
    return params_.back();
  }

  Parameter<T>* find(const std::string& name) {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
  }

  std::deque<Parameter<T>>& all() { return params_; }
  const std::deque<Parameter<T>>& all() const { return params_; }

  int64_t total_count() const {
    int64_t n = 0;
    for (const auto& p : params_) n += p.value.count();
    return n;
  }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

 private:
  std::deque<Parameter<T>> params_;
  std::unordered_map<std::string, Parameter<T>*> by_name_;
};

template <typename T>
void init_truncated_normal(Tensor<T>& t, Rng& rng, double stddev = kInitStddev) {
  for (int64_t i = 0; i < t.count(); ++i) t[i] = static_cast<T>(rng.truncated_normal(stddev));
}

// Truncated-normal weights, zero biases. Each parameter draws from a stream
// keyed by (seed, name), so the init of a given parameter does not depend on
// what else the model contains.
template <typename T>
void init_params(ParamStore<T>& ps, uint64_t seed, double stddev = kInitStddev);

extern template void init_params<float>(ParamStore<float>&, uint64_t, double);
extern template void init_params<double>(ParamStore<double>&, uint64_t, double);

template <typename T>
struct Conv2dLayer {
  Parameter<T>* w = nullptr;
  Parameter<T>* b = nullptr;
  int stride = 1, pad = 0;

  Conv2dLayer() = default;
  Conv2dLayer(ParamStore<T>& ps, const std::string& name, int64_t cin, int64_t cout,
              int64_t k, int stride_, int pad_)
      : stride(stride_), pad(pad_) {
    w = &ps.add(name + "/w", Shape{cout, cin, k, k});
    b = &ps.add(name + "/b", Shape{1, cout, 1, 1});
  }

  int forward(Tape<T>& t, int x, bool frozen = false) const {
    int wi = frozen ? t.frozen(*w) : t.param(*w);
    int bi = frozen ? t.frozen(*b) : t.param(*b);
    return op_conv2d(t, x, wi, bi, stride, pad);
  }
};

template <typename T>
struct TConv2dLayer {
  Parameter<T>* w = nullptr;
  Parameter<T>* b = nullptr;
  int stride = 1, pad = 0;

  TConv2dLayer() = default;
  TConv2dLayer(ParamStore<T>& ps, const std::string& name, int64_t cin, int64_t cout,
               int64_t k, int stride_, int pad_)
      : stride(stride_), pad(pad_) {
    w = &ps.add(name + "/w", Shape{cin, cout, k, k});
    b = &ps.add(name + "/b", Shape{1, cout, 1, 1});
  }

  int forward(Tape<T>& t, int x, bool frozen = false) const {
    int wi = frozen ? t.frozen(*w) : t.param(*w);
    int bi = frozen ? t.frozen(*b) : t.param(*b);
    return op_conv2d_transpose(t, x, wi, bi, stride, pad);
  }
};

// Maps one branch's features to the gamma/beta that modulate the other
// branch: a shared 3x3 bottleneck conv followed by two parallel 3x3 heads.
template <typename T>
struct ParamGenerator {
  Conv2dLayer<T> conv_a;      // guide channels -> bottleneck
  Conv2dLayer<T> head_gamma;  // bottleneck -> feature channels
  Conv2dLayer<T> head_beta;

  ParamGenerator() = default;
  ParamGenerator(ParamStore<T>& ps, const std::string& name, int64_t guide_ch,
                 int64_t feat_ch, int64_t bottleneck)
      : conv_a(ps, name + "/conv_a", guide_ch, bottleneck, 3, 1, 1),
        head_gamma(ps, name + "/head_gamma", bottleneck, feat_ch, 3, 1, 1),
        head_beta(ps, name + "/head_beta", bottleneck, feat_ch, 3, 1, 1) {}

  // (gamma, beta), each shaped like the feature map being modulated.
  std::pair<int, int> generate(Tape<T>& t, int guide_feat, bool frozen = false) const {
    int a = op_leaky_relu(t, conv_a.forward(t, guide_feat, frozen), static_cast<T>(kLeakySlope));
    return {head_gamma.forward(t, a, frozen), head_beta.forward(t, a, frozen)};
  }
};

template <typename T>
std::pair<int, int> param_generate(Tape<T>& t, int guide_feat, const ParamGenerator<T>& pg,
                                   bool frozen = false) {
  return pg.generate(t, guide_feat, frozen);
}

// Spatially varying modulation of instance-normalized features (the FT
// layer): out = gamma (.) IN(f) + beta with gamma/beta from the generator.
template <typename T>
struct FTLayer {
  ParamGenerator<T> pg;

  FTLayer() = default;
  FTLayer(ParamStore<T>& ps, const std::string& name, int64_t guide_ch, int64_t feat_ch,
          int64_t bottleneck)
      : pg(ps, name, guide_ch, feat_ch, bottleneck) {}

  int forward(Tape<T>& t, int f, int guide_feat, bool frozen = false) const {
    auto [gamma, beta] = pg.generate(t, guide_feat, frozen);
    return ft_modulate(t, f, gamma, beta);
  }
};

// Channelwise modulation of IN(f) per the affine variant. For CIN the
// generator output is pooled to vectors; for AdaIN the guide's per-channel
// statistics are the parameters directly (std -> scale, mean -> shift in the
// standard orientation; `swapped` reproduces the mean-as-scale wording).
template <typename T>
int channelwise_modulate(Tape<T>& t, int f, AffineVariant variant, int guide_feat,
                         const ParamGenerator<T>* pg, bool swapped = false,
                         bool frozen = false);

extern template int channelwise_modulate<float>(Tape<float>&, int, AffineVariant, int,
                                                const ParamGenerator<float>*, bool, bool);
extern template int channelwise_modulate<double>(Tape<double>&, int, AffineVariant, int,
                                                 const ParamGenerator<double>*, bool, bool);

}  // namespace bift
