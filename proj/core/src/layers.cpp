#include "bift/layers.hpp"

#include "bift/hash.hpp"

namespace bift {

template <typename T>
void init_params(ParamStore<T>& ps, uint64_t seed, double stddev) {
  for (auto& p : ps.all()) {
    if (p.name.size() >= 2 && p.name.compare(p.name.size() - 2, 2, "/w") == 0) {
      Rng rng(Rng::mix(seed, fnv1a64(p.name)));
      init_truncated_normal(p.value, rng, stddev);
    } else {
      std::fill(p.value.vec().begin(), p.value.vec().end(), T(0));
    }
  }
}

template void init_params<float>(ParamStore<float>&, uint64_t, double);
template void init_params<double>(ParamStore<double>&, uint64_t, double);

template <typename T>
int channelwise_modulate(Tape<T>& t, int f, AffineVariant variant, int guide_feat,
                         const ParamGenerator<T>* pg, bool swapped, bool frozen) {
  const Shape fs = t.value(f).shape();
  int normed = instance_norm(t, f);
  switch (variant) {
    case AffineVariant::CIN: {
      check(pg != nullptr, Err::InvalidArgument, "channelwise_modulate: CIN needs a generator");
      auto [gmap, bmap] = pg->generate(t, guide_feat, frozen);
      int gvec = reduce_stats(t, gmap).first;  // global spatial average
      int bvec = reduce_stats(t, bmap).first;
      return op_add_bcast(t, op_mul_bcast(t, normed, gvec), bvec);
    }
    case AffineVariant::AdaIN: {
      const Shape gs = t.value(guide_feat).shape();
      check(gs.c == fs.c && gs.n == fs.n, Err::DimMismatch,
            "channelwise_modulate: AdaIN channel mismatch " + gs.str() + " vs " + fs.str());
      auto [gmean, gstd] = reduce_stats(t, guide_feat);
      int scale = swapped ? gmean : gstd;
      int shift = swapped ? gstd : gmean;
      return op_add_bcast(t, op_mul_bcast(t, normed, scale), shift);
    }
    case AffineVariant::FT:
      fail(Err::InvalidArgument, "channelwise_modulate: FT variant is spatially varying");
  }
  fail(Err::InvalidArgument, "channelwise_modulate: unknown variant");
}

template int channelwise_modulate<float>(Tape<float>&, int, AffineVariant, int,
                                         const ParamGenerator<float>*, bool, bool);
template int channelwise_modulate<double>(Tape<double>&, int, AffineVariant, int,
                                          const ParamGenerator<double>*, bool, bool);

}  // namespace bift
