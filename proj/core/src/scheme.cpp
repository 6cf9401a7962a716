#include "bift/scheme.hpp"

namespace bift {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::InputConcat: return "input_concat";
    case Scheme::FeatureConcat: return "feature_concat";
    case Scheme::UniFT: return "uft";
    case Scheme::BiFT: return "bft";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "input_concat") return Scheme::InputConcat;
  if (name == "feature_concat") return Scheme::FeatureConcat;
  if (name == "uft") return Scheme::UniFT;
  if (name == "bft") return Scheme::BiFT;
  fail(Err::Config, "unknown scheme '" + name + "'");
}

std::string affine_name(AffineVariant v) {
  switch (v) {
    case AffineVariant::FT: return "ft";
    case AffineVariant::CIN: return "cin";
    case AffineVariant::AdaIN: return "adain";
  }
  return "?";
}

AffineVariant affine_from_name(const std::string& name) {
  if (name == "ft") return AffineVariant::FT;
  if (name == "cin") return AffineVariant::CIN;
  if (name == "adain") return AffineVariant::AdaIN;
  fail(Err::Config, "unknown affine variant '" + name + "'");
}

std::string placement_name(FtPlacement p) {
  return p == FtPlacement::DeepestK ? "deepest_k" : "final_layer_only";
}

FtPlacement placement_from_name(const std::string& name) {
  if (name == "deepest_k") return FtPlacement::DeepestK;
  if (name == "final_layer_only") return FtPlacement::FinalLayerOnly;
  fail(Err::Config, "unknown placement '" + name + "'");
}

template <typename T>
std::pair<int, int> bft_layer_step(Tape<T>& t, int f_in, int f_guide,
                                   const BranchSite<T>& site, bool frozen) {
  const Shape si = t.value(f_in).shape();
  const Shape sg = t.value(f_guide).shape();
  check(si.h == sg.h && si.w == sg.w && si.n == sg.n, Err::DimMismatch,
        "bft_layer_step: branch dims " + si.str() + " vs " + sg.str());

  // Both generators read the pre-update features (Eqs. use the same layer
  // index on both sides), so gamma/beta for each branch are computed before
  // either branch is overwritten.
  int in2, gd2;
  switch (site.affine) {
    case AffineVariant::FT: {
      auto [gg, bg] = site.pg_guide2in->generate(t, f_guide, frozen);
      if (site.bidirectional) {
        auto [gi, bi] = site.pg_in2guide->generate(t, f_in, frozen);
        in2 = ft_modulate(t, f_in, gg, bg);
        gd2 = ft_modulate(t, f_guide, gi, bi);
      } else {
        in2 = ft_modulate(t, f_in, gg, bg);
        gd2 = instance_norm(t, f_guide);
      }
      break;
    }
    case AffineVariant::CIN: {
      in2 = channelwise_modulate(t, f_in, AffineVariant::CIN, f_guide, site.pg_guide2in,
                                 false, frozen);
      gd2 = site.bidirectional
                ? channelwise_modulate(t, f_guide, AffineVariant::CIN, f_in,
                                       site.pg_in2guide, false, frozen)
                : instance_norm(t, f_guide);
      break;
    }
    case AffineVariant::AdaIN: {
      in2 = channelwise_modulate<T>(t, f_in, AffineVariant::AdaIN, f_guide, nullptr,
                                    site.adain_swapped, frozen);
      gd2 = site.bidirectional
                ? channelwise_modulate<T>(t, f_guide, AffineVariant::AdaIN, f_in, nullptr,
                                          site.adain_swapped, frozen)
                : instance_norm(t, f_guide);
      break;
    }
    default:
      fail(Err::InvalidArgument, "bft_layer_step: bad affine variant");
  }
  return {in2, gd2};
}

template std::pair<int, int> bft_layer_step<float>(Tape<float>&, int, int,
                                                   const BranchSite<float>&, bool);
template std::pair<int, int> bft_layer_step<double>(Tape<double>&, int, int,
                                                    const BranchSite<double>&, bool);

}  // namespace bift
