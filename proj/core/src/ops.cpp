#include "bift/ops.hpp"

#include <algorithm>
#include <cmath>

namespace bift {

namespace {

template <typename T>
void require_same_shape(const Tape<T>& t, int a, int b, const char* op) {
  check(t.value(a).shape() == t.value(b).shape(), Err::DimMismatch,
        std::string(op) + ": dims " + t.value(a).shape().str() + " vs " +
            t.value(b).shape().str());
}

}  // namespace

template <typename T>
int op_add(Tape<T>& t, int a, int b) {
  require_same_shape(t, a, b, "add");
  const Tensor<T>& va = t.value(a);
  const Tensor<T>& vb = t.value(b);
  Tensor<T> out(va.shape());
  for (int64_t i = 0; i < out.count(); ++i) out[i] = va[i] + vb[i];
  return t.emit("add", {a, b}, std::move(out), [a, b](Tape<T>& tp, int self) {
    tp.accum_grad(a, tp.grad(self));
    tp.accum_grad(b, tp.grad(self));
  });
}

template <typename T>
int op_sub(Tape<T>& t, int a, int b) {
  require_same_shape(t, a, b, "sub");
  const Tensor<T>& va = t.value(a);
  const Tensor<T>& vb = t.value(b);
  Tensor<T> out(va.shape());
  for (int64_t i = 0; i < out.count(); ++i) out[i] = va[i] - vb[i];
  return t.emit("sub", {a, b}, std::move(out), [a, b](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    tp.accum_grad(a, g);
    if (tp.needs_grad(b)) {
      Tensor<T> gb(g.shape());
      for (int64_t i = 0; i < g.count(); ++i) gb[i] = -g[i];
      tp.accum_grad(b, gb);
    }
  });
}

template <typename T>
int op_mul(Tape<T>& t, int a, int b) {
  require_same_shape(t, a, b, "mul");
  const Tensor<T>& va = t.value(a);
  const Tensor<T>& vb = t.value(b);
  Tensor<T> out(va.shape());
  for (int64_t i = 0; i < out.count(); ++i) out[i] = va[i] * vb[i];
  return t.emit("mul", {a, b}, std::move(out), [a, b](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    if (tp.needs_grad(a)) {
      Tensor<T> ga(g.shape());
      const Tensor<T>& vb = tp.value(b);
      for (int64_t i = 0; i < g.count(); ++i) ga[i] = g[i] * vb[i];
      tp.accum_grad(a, ga);
    }
    if (tp.needs_grad(b)) {
      Tensor<T> gb(g.shape());
      const Tensor<T>& va = tp.value(a);
      for (int64_t i = 0; i < g.count(); ++i) gb[i] = g[i] * va[i];
      tp.accum_grad(b, gb);
    }
  });
}

template <typename T>
int op_scale(Tape<T>& t, int a, T s) {
  const Tensor<T>& va = t.value(a);
  Tensor<T> out(va.shape());
  for (int64_t i = 0; i < out.count(); ++i) out[i] = va[i] * s;
  return t.emit("scale", {a}, std::move(out), [a, s](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    Tensor<T> ga(g.shape());
    for (int64_t i = 0; i < g.count(); ++i) ga[i] = g[i] * s;
    tp.accum_grad(a, ga);
  });
}

template <typename T>
int op_add_scalar(Tape<T>& t, int a, T s) {
  const Tensor<T>& va = t.value(a);
  Tensor<T> out(va.shape());
  for (int64_t i = 0; i < out.count(); ++i) out[i] = va[i] + s;
  return t.emit("add_scalar", {a}, std::move(out),
                [a](Tape<T>& tp, int self) { tp.accum_grad(a, tp.grad(self)); });
}

template <typename T>
int op_sum(Tape<T>& t, int a) {
  const Tensor<T>& va = t.value(a);
  T acc = 0;
  for (int64_t i = 0; i < va.count(); ++i) acc += va[i];
  Tensor<T> out(Shape{1, 1, 1, 1});
  out[0] = acc;
  return t.emit("sum", {a}, std::move(out), [a](Tape<T>& tp, int self) {
    Tensor<T> ga(tp.value(a).shape(), tp.grad(self)[0]);
    tp.accum_grad(a, ga);
  });
}

template <typename T>
int op_mean(Tape<T>& t, int a) {
  const Tensor<T>& va = t.value(a);
  check(va.count() > 0, Err::InvalidArgument, "mean of empty tensor");
  T acc = 0;
  for (int64_t i = 0; i < va.count(); ++i) acc += va[i];
  Tensor<T> out(Shape{1, 1, 1, 1});
  out[0] = acc / static_cast<T>(va.count());
  return t.emit("mean", {a}, std::move(out), [a](Tape<T>& tp, int self) {
    const Tensor<T>& va2 = tp.value(a);
    Tensor<T> ga(va2.shape(), tp.grad(self)[0] / static_cast<T>(va2.count()));
    tp.accum_grad(a, ga);
  });
}

template <typename T>
std::pair<int, int> reduce_stats(Tape<T>& t, int x) {
  const Tensor<T>& v = t.value(x);
  const Shape s = v.shape();
  check(s.spatial() >= 1, Err::InvalidArgument, "reduce_stats: degenerate spatial dims");
  const int64_t hw = s.spatial();
  Tensor<T> mean(Shape{s.n, s.c, 1, 1});
  Tensor<T> stdev(Shape{s.n, s.c, 1, 1});
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c) {
      const T* p = v.data() + (n * s.c + c) * hw;
      T acc = 0;
      for (int64_t i = 0; i < hw; ++i) acc += p[i];
      T mu = acc / static_cast<T>(hw);
      T var = 0;
      for (int64_t i = 0; i < hw; ++i) {
        T d = p[i] - mu;
        var += d * d;
      }
      var /= static_cast<T>(hw);
      mean[n * s.c + c] = mu;
      stdev[n * s.c + c] = std::sqrt(var + static_cast<T>(kStatsEps));
    }

  int mean_id = t.emit("spatial_mean", {x}, std::move(mean), [x](Tape<T>& tp, int self) {
    const Shape sh = tp.value(x).shape();
    const int64_t hw2 = sh.spatial();
    const Tensor<T>& g = tp.grad(self);
    Tensor<T> gx(sh);
    for (int64_t n = 0; n < sh.n; ++n)
      for (int64_t c = 0; c < sh.c; ++c) {
        T gv = g[n * sh.c + c] / static_cast<T>(hw2);
        T* q = gx.data() + (n * sh.c + c) * hw2;
        for (int64_t i = 0; i < hw2; ++i) q[i] += gv;
      }
    tp.accum_grad(x, gx);
  });

  // The deviation's backward needs mu; keep a copy rather than chaining off
  // the mean node so each node has a self-contained closure.
  Tensor<T> mu_saved = t.value(mean_id);
  int std_id = t.emit(
      "spatial_std", {x}, std::move(stdev),
      [x, mu_saved = std::move(mu_saved)](Tape<T>& tp, int self) {
        const Tensor<T>& v2 = tp.value(x);
        const Shape sh = v2.shape();
        const int64_t hw2 = sh.spatial();
        const Tensor<T>& g = tp.grad(self);
        const Tensor<T>& sig = tp.value(self);
        Tensor<T> gx(sh);
        for (int64_t n = 0; n < sh.n; ++n)
          for (int64_t c = 0; c < sh.c; ++c) {
            const int64_t nc = n * sh.c + c;
            T scale = g[nc] / (static_cast<T>(hw2) * sig[nc]);
            const T* p = v2.data() + nc * hw2;
            T* q = gx.data() + nc * hw2;
            T mu = mu_saved[nc];
            for (int64_t i = 0; i < hw2; ++i) q[i] += scale * (p[i] - mu);
          }
        tp.accum_grad(x, gx);
      });

  return {mean_id, std_id};
}

template <typename T>
int instance_norm(Tape<T>& t, int x) {
  const Tensor<T>& v = t.value(x);
  const Shape s = v.shape();
  check(s.spatial() >= 1, Err::InvalidArgument, "instance_norm: degenerate spatial dims");
  const int64_t hw = s.spatial();
  Tensor<T> out(s);
  Tensor<T> inv_std(Shape{s.n, s.c, 1, 1});
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c) {
      const int64_t nc = n * s.c + c;
      const T* p = v.data() + nc * hw;
      T acc = 0;
      for (int64_t i = 0; i < hw; ++i) acc += p[i];
      T mu = acc / static_cast<T>(hw);
      T var = 0;
      for (int64_t i = 0; i < hw; ++i) {
        T d = p[i] - mu;
        var += d * d;
      }
      var /= static_cast<T>(hw);
      T inv = T(1) / std::sqrt(var + static_cast<T>(kStatsEps));
      inv_std[nc] = inv;
      T* q = out.data() + nc * hw;
      for (int64_t i = 0; i < hw; ++i) q[i] = (p[i] - mu) * inv;
    }

  return t.emit(
      "instance_norm", {x}, std::move(out),
      [x, inv_std = std::move(inv_std)](Tape<T>& tp, int self) {
        const Tensor<T>& y = tp.value(self);
        const Tensor<T>& g = tp.grad(self);
        const Shape sh = y.shape();
        const int64_t hw2 = sh.spatial();
        Tensor<T> gx(sh);
        for (int64_t n = 0; n < sh.n; ++n)
          for (int64_t c = 0; c < sh.c; ++c) {
            const int64_t nc = n * sh.c + c;
            const T* gy = g.data() + nc * hw2;
            const T* yv = y.data() + nc * hw2;
            T mg = 0, mgy = 0;
            for (int64_t i = 0; i < hw2; ++i) {
              mg += gy[i];
              mgy += gy[i] * yv[i];
            }
            mg /= static_cast<T>(hw2);
            mgy /= static_cast<T>(hw2);
            T inv = inv_std[nc];
            T* q = gx.data() + nc * hw2;
            for (int64_t i = 0; i < hw2; ++i) q[i] += inv * (gy[i] - mg - yv[i] * mgy);
          }
        tp.accum_grad(x, gx);
      });
}

template <typename T>
int ft_modulate(Tape<T>& t, int f, int gamma, int beta) {
  require_same_shape(t, f, gamma, "ft_modulate(gamma)");
  require_same_shape(t, f, beta, "ft_modulate(beta)");
  int normed = instance_norm(t, f);
  return op_add(t, op_mul(t, gamma, normed), beta);
}

template <typename T>
int op_mul_bcast(Tape<T>& t, int x, int s) {
  const Shape xs = t.value(x).shape();
  const Shape ss = t.value(s).shape();
  check(ss.n == xs.n && ss.c == xs.c && ss.h == 1 && ss.w == 1, Err::DimMismatch,
        "mul_bcast: scale dims " + ss.str() + " for input " + xs.str());
  const Tensor<T>& vx = t.value(x);
  const Tensor<T>& vs = t.value(s);
  const int64_t hw = xs.spatial();
  Tensor<T> out(xs);
  for (int64_t nc = 0; nc < xs.n * xs.c; ++nc) {
    const T* p = vx.data() + nc * hw;
    T* q = out.data() + nc * hw;
    T sv = vs[nc];
    for (int64_t i = 0; i < hw; ++i) q[i] = p[i] * sv;
  }
  return t.emit("mul_bcast", {x, s}, std::move(out), [x, s](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Shape sh = g.shape();
    const int64_t hw2 = sh.spatial();
    if (tp.needs_grad(x)) {
      const Tensor<T>& vs2 = tp.value(s);
      Tensor<T> gx(sh);
      for (int64_t nc = 0; nc < sh.n * sh.c; ++nc) {
        const T* gp = g.data() + nc * hw2;
        T* q = gx.data() + nc * hw2;
        T sv = vs2[nc];
        for (int64_t i = 0; i < hw2; ++i) q[i] = gp[i] * sv;
      }
      tp.accum_grad(x, gx);
    }
    if (tp.needs_grad(s)) {
      const Tensor<T>& vx2 = tp.value(x);
      Tensor<T> gs(Shape{sh.n, sh.c, 1, 1});
      for (int64_t nc = 0; nc < sh.n * sh.c; ++nc) {
        const T* gp = g.data() + nc * hw2;
        const T* p = vx2.data() + nc * hw2;
        T acc = 0;
        for (int64_t i = 0; i < hw2; ++i) acc += gp[i] * p[i];
        gs[nc] = acc;
      }
      tp.accum_grad(s, gs);
    }
  });
}

template <typename T>
int op_add_bcast(Tape<T>& t, int x, int s) {
  const Shape xs = t.value(x).shape();
  const Shape ss = t.value(s).shape();
  check(ss.n == xs.n && ss.c == xs.c && ss.h == 1 && ss.w == 1, Err::DimMismatch,
        "add_bcast: shift dims " + ss.str() + " for input " + xs.str());
  const Tensor<T>& vx = t.value(x);
  const Tensor<T>& vs = t.value(s);
  const int64_t hw = xs.spatial();
  Tensor<T> out(xs);
  for (int64_t nc = 0; nc < xs.n * xs.c; ++nc) {
    const T* p = vx.data() + nc * hw;
    T* q = out.data() + nc * hw;
    T sv = vs[nc];
    for (int64_t i = 0; i < hw; ++i) q[i] = p[i] + sv;
  }
  return t.emit("add_bcast", {x, s}, std::move(out), [x, s](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Shape sh = g.shape();
    const int64_t hw2 = sh.spatial();
    tp.accum_grad(x, g);
    if (tp.needs_grad(s)) {
      Tensor<T> gs(Shape{sh.n, sh.c, 1, 1});
      for (int64_t nc = 0; nc < sh.n * sh.c; ++nc) {
        const T* gp = g.data() + nc * hw2;
        T acc = 0;
        for (int64_t i = 0; i < hw2; ++i) acc += gp[i];
        gs[nc] = acc;
      }
      tp.accum_grad(s, gs);
    }
  });
}

template <typename T>
int op_relu(Tape<T>& t, int x) {
  const Tensor<T>& v = t.value(x);
  Tensor<T> out(v.shape());
  for (int64_t i = 0; i < v.count(); ++i) out[i] = v[i] > T(0) ? v[i] : T(0);
  return t.emit("relu", {x}, std::move(out), [x](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Tensor<T>& v2 = tp.value(x);
    Tensor<T> gx(g.shape());
    for (int64_t i = 0; i < g.count(); ++i) gx[i] = v2[i] > T(0) ? g[i] : T(0);
    tp.accum_grad(x, gx);
  });
}

template <typename T>
int op_leaky_relu(Tape<T>& t, int x, T slope) {
  const Tensor<T>& v = t.value(x);
  Tensor<T> out(v.shape());
  for (int64_t i = 0; i < v.count(); ++i) out[i] = v[i] > T(0) ? v[i] : slope * v[i];
  return t.emit("leaky_relu", {x}, std::move(out), [x, slope](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Tensor<T>& v2 = tp.value(x);
    Tensor<T> gx(g.shape());
    for (int64_t i = 0; i < g.count(); ++i) gx[i] = v2[i] > T(0) ? g[i] : slope * g[i];
    tp.accum_grad(x, gx);
  });
}

template <typename T>
int op_tanh(Tape<T>& t, int x) {
  const Tensor<T>& v = t.value(x);
  Tensor<T> out(v.shape());
  for (int64_t i = 0; i < v.count(); ++i) out[i] = std::tanh(v[i]);
  return t.emit("tanh", {x}, std::move(out), [x](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Tensor<T>& y = tp.value(self);
    Tensor<T> gx(g.shape());
    for (int64_t i = 0; i < g.count(); ++i) gx[i] = g[i] * (T(1) - y[i] * y[i]);
    tp.accum_grad(x, gx);
  });
}

template <typename T>
int op_sigmoid(Tape<T>& t, int x) {
  const Tensor<T>& v = t.value(x);
  Tensor<T> out(v.shape());
  for (int64_t i = 0; i < v.count(); ++i) out[i] = T(1) / (T(1) + std::exp(-v[i]));
  return t.emit("sigmoid", {x}, std::move(out), [x](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Tensor<T>& y = tp.value(self);
    Tensor<T> gx(g.shape());
    for (int64_t i = 0; i < g.count(); ++i) gx[i] = g[i] * y[i] * (T(1) - y[i]);
    tp.accum_grad(x, gx);
  });
}

template <typename T>
int op_concat_c(Tape<T>& t, int a, int b) {
  const Shape sa = t.value(a).shape();
  const Shape sb = t.value(b).shape();
  check(sa.n == sb.n && sa.h == sb.h && sa.w == sb.w, Err::DimMismatch,
        "concat_c: " + sa.str() + " vs " + sb.str());
  const Tensor<T>& va = t.value(a);
  const Tensor<T>& vb = t.value(b);
  Shape so{sa.n, sa.c + sb.c, sa.h, sa.w};
  Tensor<T> out(so);
  const int64_t hw = sa.spatial();
  for (int64_t n = 0; n < sa.n; ++n) {
    std::copy_n(va.data() + n * sa.c * hw, sa.c * hw, out.data() + n * so.c * hw);
    std::copy_n(vb.data() + n * sb.c * hw, sb.c * hw, out.data() + (n * so.c + sa.c) * hw);
  }
  return t.emit("concat_c", {a, b}, std::move(out), [a, b](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Shape sa2 = tp.value(a).shape();
    const Shape sb2 = tp.value(b).shape();
    const Shape so2 = g.shape();
    const int64_t hw2 = sa2.spatial();
    if (tp.needs_grad(a)) {
      Tensor<T> ga(sa2);
      for (int64_t n = 0; n < sa2.n; ++n)
        std::copy_n(g.data() + n * so2.c * hw2, sa2.c * hw2, ga.data() + n * sa2.c * hw2);
      tp.accum_grad(a, ga);
    }
    if (tp.needs_grad(b)) {
      Tensor<T> gb(sb2);
      for (int64_t n = 0; n < sb2.n; ++n)
        std::copy_n(g.data() + (n * so2.c + sa2.c) * hw2, sb2.c * hw2, gb.data() + n * sb2.c * hw2);
      tp.accum_grad(b, gb);
    }
  });
}

template <typename T>
int op_upsample_nearest(Tape<T>& t, int x, int factor) {
  check(factor >= 1, Err::InvalidArgument, "upsample_nearest: factor must be >= 1");
  const Tensor<T>& v = t.value(x);
  const Shape s = v.shape();
  Shape so{s.n, s.c, s.h * factor, s.w * factor};
  Tensor<T> out(so);
  for (int64_t nc = 0; nc < s.n * s.c; ++nc)
    for (int64_t h = 0; h < so.h; ++h) {
      const T* p = v.data() + (nc * s.h + h / factor) * s.w;
      T* q = out.data() + (nc * so.h + h) * so.w;
      for (int64_t w = 0; w < so.w; ++w) q[w] = p[w / factor];
    }
  return t.emit("upsample_nearest", {x}, std::move(out), [x, factor](Tape<T>& tp, int self) {
    const Tensor<T>& g = tp.grad(self);
    const Shape si = tp.value(x).shape();
    const Shape so2 = g.shape();
    Tensor<T> gx(si);
    for (int64_t nc = 0; nc < si.n * si.c; ++nc)
      for (int64_t h = 0; h < so2.h; ++h) {
        const T* gp = g.data() + (nc * so2.h + h) * so2.w;
        T* q = gx.data() + (nc * si.h + h / factor) * si.w;
        for (int64_t w = 0; w < so2.w; ++w) q[w / factor] += gp[w];
      }
    tp.accum_grad(x, gx);
  });
}

namespace {

// Catmull-Rom kernel, a = -0.5.
template <typename T>
T cubic_weight(T x) {
  constexpr T a = T(-0.5);
  x = std::abs(x);
  if (x <= T(1)) return ((a + T(2)) * x - (a + T(3))) * x * x + T(1);
  if (x < T(2)) return (((x - T(5)) * x + T(8)) * x - T(4)) * a;
  return T(0);
}

// Per-output-position source taps and weights for one axis, half-pixel
// centers, indices clamped to the valid range.
template <typename T>
struct TapTable {
  std::vector<int64_t> idx;  // 4 per position
  std::vector<T> w;
};

template <typename T>
TapTable<T> bicubic_taps(int64_t in_len, int64_t out_len) {
  TapTable<T> tt;
  tt.idx.resize(static_cast<size_t>(out_len) * 4);
  tt.w.resize(static_cast<size_t>(out_len) * 4);
  const double scale = static_cast<double>(in_len) / static_cast<double>(out_len);
  for (int64_t o = 0; o < out_len; ++o) {
    double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    int64_t base = static_cast<int64_t>(std::floor(src));
    for (int k = 0; k < 4; ++k) {
      int64_t i = base - 1 + k;
      tt.idx[static_cast<size_t>(o * 4 + k)] = std::clamp<int64_t>(i, 0, in_len - 1);
      tt.w[static_cast<size_t>(o * 4 + k)] = cubic_weight<T>(static_cast<T>(src - static_cast<double>(i)));
    }
  }
  return tt;
}

}  // namespace

template <typename T>
Tensor<T> resize_bicubic_value(const Tensor<T>& x, int64_t out_h, int64_t out_w) {
  const Shape s = x.shape();
  check(out_h >= 1 && out_w >= 1, Err::InvalidArgument,
        "resize_bicubic: non-positive output dims");
  check(s.h >= 1 && s.w >= 1, Err::InvalidArgument, "resize_bicubic: empty input");
  if (out_h == s.h && out_w == s.w) return x;
  TapTable<T> th = bicubic_taps<T>(s.h, out_h);
  TapTable<T> tw = bicubic_taps<T>(s.w, out_w);
  Tensor<T> out(Shape{s.n, s.c, out_h, out_w});
  for (int64_t nc = 0; nc < s.n * s.c; ++nc) {
    const T* p = x.data() + nc * s.spatial();
    T* q = out.data() + nc * out_h * out_w;
    for (int64_t oh = 0; oh < out_h; ++oh)
      for (int64_t ow = 0; ow < out_w; ++ow) {
        T acc = 0;
        for (int a = 0; a < 4; ++a) {
          const int64_t ih = th.idx[static_cast<size_t>(oh * 4 + a)];
          const T wv = th.w[static_cast<size_t>(oh * 4 + a)];
          const T* row = p + ih * s.w;
          T racc = 0;
          for (int b = 0; b < 4; ++b)
            racc += tw.w[static_cast<size_t>(ow * 4 + b)] * row[tw.idx[static_cast<size_t>(ow * 4 + b)]];
          acc += wv * racc;
        }
        q[oh * out_w + ow] = acc;
      }
  }
  return out;
}

template <typename T>
int op_resize_bicubic(Tape<T>& t, int x, int64_t out_h, int64_t out_w) {
  Tensor<T> out = resize_bicubic_value(t.value(x), out_h, out_w);
  return t.emit("resize_bicubic", {x}, std::move(out),
                [x, out_h, out_w](Tape<T>& tp, int self) {
                  const Tensor<T>& g = tp.grad(self);
                  const Shape si = tp.value(x).shape();
                  TapTable<T> th = bicubic_taps<T>(si.h, out_h);
                  TapTable<T> tw = bicubic_taps<T>(si.w, out_w);
                  Tensor<T> gx(si);
                  for (int64_t nc = 0; nc < si.n * si.c; ++nc) {
                    const T* gp = g.data() + nc * out_h * out_w;
                    T* q = gx.data() + nc * si.spatial();
                    for (int64_t oh = 0; oh < out_h; ++oh)
                      for (int64_t ow = 0; ow < out_w; ++ow) {
                        T gv = gp[oh * out_w + ow];
                        for (int a = 0; a < 4; ++a) {
                          const int64_t ih = th.idx[static_cast<size_t>(oh * 4 + a)];
                          const T wv = th.w[static_cast<size_t>(oh * 4 + a)] * gv;
                          T* row = q + ih * si.w;
                          for (int b = 0; b < 4; ++b)
                            row[tw.idx[static_cast<size_t>(ow * 4 + b)]] +=
                                wv * tw.w[static_cast<size_t>(ow * 4 + b)];
                        }
                      }
                  }
                  tp.accum_grad(x, gx);
                });
}

template <typename T>
int op_l1_loss(Tape<T>& t, int a, int b) {
  require_same_shape(t, a, b, "l1_loss");
  const Tensor<T>& va = t.value(a);
  const Tensor<T>& vb = t.value(b);
  const int64_t count = va.count();
  check(count > 0, Err::InvalidArgument, "l1_loss of empty tensors");
  T acc = 0;
  for (int64_t i = 0; i < count; ++i) acc += std::abs(va[i] - vb[i]);
  Tensor<T> out(Shape{1, 1, 1, 1});
  out[0] = acc / static_cast<T>(count);
  return t.emit("l1_loss", {a, b}, std::move(out), [a, b](Tape<T>& tp, int self) {
    const Tensor<T>& va2 = tp.value(a);
    const Tensor<T>& vb2 = tp.value(b);
    const int64_t n = va2.count();
    T gv = tp.grad(self)[0] / static_cast<T>(n);
    if (tp.needs_grad(a)) {
      Tensor<T> ga(va2.shape());
      for (int64_t i = 0; i < n; ++i) {
        T d = va2[i] - vb2[i];
        ga[i] = d > T(0) ? gv : (d < T(0) ? -gv : T(0));
      }
      tp.accum_grad(a, ga);
    }
    if (tp.needs_grad(b)) {
      Tensor<T> gb(vb2.shape());
      for (int64_t i = 0; i < n; ++i) {
        T d = va2[i] - vb2[i];
        gb[i] = d > T(0) ? -gv : (d < T(0) ? gv : T(0));
      }
      tp.accum_grad(b, gb);
    }
  });
}

template <typename T>
int op_bce_logits(Tape<T>& t, int logits, T label) {
  const Tensor<T>& v = t.value(logits);
  const int64_t count = v.count();
  check(count > 0, Err::InvalidArgument, "bce_logits of empty tensor");
  T acc = 0;
  for (int64_t i = 0; i < count; ++i) {
    T x = v[i];
    acc += std::max(x, T(0)) - x * label + std::log1p(std::exp(-std::abs(x)));
  }
  Tensor<T> out(Shape{1, 1, 1, 1});
  out[0] = acc / static_cast<T>(count);
  return t.emit("bce_logits", {logits}, std::move(out),
                [logits, label](Tape<T>& tp, int self) {
                  const Tensor<T>& v2 = tp.value(logits);
                  const int64_t n = v2.count();
                  T gv = tp.grad(self)[0] / static_cast<T>(n);
                  Tensor<T> gx(v2.shape());
                  for (int64_t i = 0; i < n; ++i) {
                    T sig = T(1) / (T(1) + std::exp(-v2[i]));
                    gx[i] = gv * (sig - label);
                  }
                  tp.accum_grad(logits, gx);
                });
}

#define BIFT_INSTANTIATE_OPS(T)                                        \
  template int op_add<T>(Tape<T>&, int, int);                          \
  template int op_sub<T>(Tape<T>&, int, int);                          \
  template int op_mul<T>(Tape<T>&, int, int);                          \
  template int op_scale<T>(Tape<T>&, int, T);                          \
  template int op_add_scalar<T>(Tape<T>&, int, T);                     \
  template int op_sum<T>(Tape<T>&, int);                               \
  template int op_mean<T>(Tape<T>&, int);                              \
  template std::pair<int, int> reduce_stats<T>(Tape<T>&, int);         \
  template int instance_norm<T>(Tape<T>&, int);                        \
  template int ft_modulate<T>(Tape<T>&, int, int, int);                \
  template int op_mul_bcast<T>(Tape<T>&, int, int);                    \
  template int op_add_bcast<T>(Tape<T>&, int, int);                    \
  template int op_relu<T>(Tape<T>&, int);                              \
  template int op_leaky_relu<T>(Tape<T>&, int, T);                     \
  template int op_tanh<T>(Tape<T>&, int);                              \
  template int op_sigmoid<T>(Tape<T>&, int);                           \
  template int op_concat_c<T>(Tape<T>&, int, int);                     \
  template int op_upsample_nearest<T>(Tape<T>&, int, int);             \
  template int op_resize_bicubic<T>(Tape<T>&, int, int64_t, int64_t);  \
  template int op_l1_loss<T>(Tape<T>&, int, int);                      \
  template int op_bce_logits<T>(Tape<T>&, int, T);                     \
  template Tensor<T> resize_bicubic_value<T>(const Tensor<T>&, int64_t, int64_t);

BIFT_INSTANTIATE_OPS(float)
BIFT_INSTANTIATE_OPS(double)
#undef BIFT_INSTANTIATE_OPS

}  // namespace bift
