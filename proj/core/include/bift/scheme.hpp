#pragma once

#include <cstdint>
#include <string>

#include "bift/layers.hpp"

namespace bift {

// How the guidance image is wired into the translation model.
//   InputConcat:   guide joined to the input along channels at layer 0.
//   FeatureConcat: separate encoders, features joined at the bottleneck.
//   UniFT:         guide branch modulates the input branch at FT sites.
//   BiFT:          both branches modulate each other at FT sites.
enum class Scheme { InputConcat, FeatureConcat, UniFT, BiFT };

enum class FtPlacement { DeepestK, FinalLayerOnly };

struct SchemeConfig {
  Scheme scheme = Scheme::BiFT;
  AffineVariant affine = AffineVariant::FT;
  int ft_layer_count = 4;
  FtPlacement placement = FtPlacement::DeepestK;
  bool adain_swapped = false;
  int64_t pg_bottleneck = kPgBottleneckDefault;

  bool has_guide_branch() const { return scheme != Scheme::InputConcat; }
  bool has_ft_sites() const { return scheme == Scheme::UniFT || scheme == Scheme::BiFT; }
};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);
std::string affine_name(AffineVariant v);
AffineVariant affine_from_name(const std::string& name);
std::string placement_name(FtPlacement p);
FtPlacement placement_from_name(const std::string& name);

// One modulation site between the two branches. For AdaIN both generator
// pointers stay null; for uni-directional wiring pg_in2guide stays null.
template <typename T>
struct BranchSite {
  const ParamGenerator<T>* pg_guide2in = nullptr;
  const ParamGenerator<T>* pg_in2guide = nullptr;
  AffineVariant affine = AffineVariant::FT;
  bool bidirectional = true;
  bool adain_swapped = false;
};

// Applies one modulation site with simultaneous-read semantics: both
// parameter generators see the pre-update features, then both branches are
// modulated. Uni-directional sites leave the guide branch plain-normalized.
// Returns (f_in', f_guide').
template <typename T>
std::pair<int, int> bft_layer_step(Tape<T>& t, int f_in, int f_guide,
                                   const BranchSite<T>& site, bool frozen = false);

extern template std::pair<int, int> bft_layer_step<float>(Tape<float>&, int, int,
                                                          const BranchSite<float>&, bool);
extern template std::pair<int, int> bft_layer_step<double>(Tape<double>&, int, int,
                                                           const BranchSite<double>&, bool);

}  // namespace bift
