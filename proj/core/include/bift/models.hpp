#pragma once

#include <memory>
#include <vector>

#include "bift/scheme.hpp"

namespace bift {

enum class GenBase { UNet, ResNet };
enum class HeadActivation { Linear, Tanh };

struct GeneratorSpec {
  GenBase base = GenBase::ResNet;
  int depth = 4;  // U-Net levels; the ResNet base always has 4 encoder sites
  int64_t base_width = 16;
  int64_t in_channels = 1;
  int64_t guide_channels = 3;
  int64_t out_channels = 1;
  HeadActivation head = HeadActivation::Linear;

  // Encoder normalization sites (candidate FT sites).
  int num_sites() const { return base == GenBase::UNet ? depth : 4; }
};

std::string gen_base_name(GenBase b);
GenBase gen_base_from_name(const std::string& name);
std::string head_name(HeadActivation h);
HeadActivation head_from_name(const std::string& name);

// Generator assembled for one conditioning scheme: two encoder stacks, the
// per-site modulation wiring, middle blocks, and a decoder returning to the
// input resolution.
template <typename T>
class Generator {
 public:
  GeneratorSpec spec;
  SchemeConfig cfg;
  ParamStore<T> params;

  std::vector<Conv2dLayer<T>> enc_in;
  std::vector<Conv2dLayer<T>> enc_guide;
  // site_mod[i]: whether site i is a modulation site (else plain IN).
  std::vector<bool> site_mod;
  std::vector<std::unique_ptr<ParamGenerator<T>>> pg_guide2in;  // per site, may be null
  std::vector<std::unique_ptr<ParamGenerator<T>>> pg_in2guide;
  std::vector<Conv2dLayer<T>> mid;      // residual-block convs, in pairs (ResNet)
  std::vector<TConv2dLayer<T>> dec_up;
  Conv2dLayer<T> head;

  BranchSite<T> site(int i) const {
    BranchSite<T> s;
    s.pg_guide2in = pg_guide2in[static_cast<size_t>(i)].get();
    s.pg_in2guide = pg_in2guide[static_cast<size_t>(i)].get();
    s.affine = cfg.affine;
    s.bidirectional = cfg.scheme == Scheme::BiFT;
    s.adain_swapped = cfg.adain_swapped;
    return s;
  }
};

struct DiscriminatorSpec {
  int layers = 3;  // stride-2 stages
  int64_t base_width = 16;
};

// PatchGAN discriminator over input (+) guide (+) candidate.
template <typename T>
class Discriminator {
 public:
  DiscriminatorSpec spec;
  int64_t in_channels = 0;  // total concatenated channels
  ParamStore<T> params;
  std::vector<Conv2dLayer<T>> convs;
  Conv2dLayer<T> head;
};

// Builds the generator for a conditioning scheme. Parameter init is
// name-keyed off `seed`, so two schemes built from one seed share the init
// of every parameter they have in common.
template <typename T>
std::unique_ptr<Generator<T>> build_scheme(const SchemeConfig& cfg, const GeneratorSpec& spec,
                                           uint64_t seed);

template <typename T>
std::unique_ptr<Discriminator<T>> build_discriminator(const DiscriminatorSpec& spec,
                                                      int64_t in_channels, uint64_t seed);

// Runs the generator; `frozen` evaluates without registering parameters for
// gradient updates. Guide spatial dims must equal input spatial dims.
template <typename T>
int generator_forward(Tape<T>& t, const Generator<T>& g, int input, int guide,
                      bool frozen = false);

// Patch logits (N,1,h',w').
template <typename T>
int discriminator_forward(Tape<T>& t, const Discriminator<T>& d, int input, int guide,
                          int candidate, bool frozen = false);

#define BIFT_EXTERN_MODEL(T)                                                              \
  extern template class Generator<T>;                                                    \
  extern template class Discriminator<T>;                                                \
  extern template std::unique_ptr<Generator<T>> build_scheme<T>(const SchemeConfig&,     \
                                                                const GeneratorSpec&,    \
                                                                uint64_t);               \
  extern template std::unique_ptr<Discriminator<T>> build_discriminator<T>(              \
      const DiscriminatorSpec&, int64_t, uint64_t);                                      \
  extern template int generator_forward<T>(Tape<T>&, const Generator<T>&, int, int,      \
                                           bool);                                        \
  extern template int discriminator_forward<T>(Tape<T>&, const Discriminator<T>&, int,   \
                                               int, int, bool);
BIFT_EXTERN_MODEL(float)
BIFT_EXTERN_MODEL(double)
#undef BIFT_EXTERN_MODEL

}  // namespace bift
