#include "bift/conv.hpp"

#include <string>

namespace bift {

namespace {

// Row-major GEMM variants, single-threaded so f32 runs stay bit-exact.
// Loop orders keep the innermost index contiguous for auto-vectorization.

// C(M,N) += A(M,K) * B(K,N)
template <typename T>
void gemm_nn(int64_t M, int64_t N, int64_t K, const T* A, const T* B, T* C) {
  for (int64_t i = 0; i < M; ++i) {
    T* c = C + i * N;
    const T* a = A + i * K;
    for (int64_t k = 0; k < K; ++k) {
      const T av = a[k];
      const T* b = B + k * N;
      for (int64_t j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

// C(M,N) += A(M,K) * B(N,K)^T
template <typename T>
void gemm_nt(int64_t M, int64_t N, int64_t K, const T* A, const T* B, T* C) {
  for (int64_t i = 0; i < M; ++i) {
    const T* a = A + i * K;
    T* c = C + i * N;
    for (int64_t j = 0; j < N; ++j) {
      const T* b = B + j * K;
      T acc = 0;
      for (int64_t k = 0; k < K; ++k) acc += a[k] * b[k];
      c[j] += acc;
    }
  }
}

// C(M,N) += A(K,M)^T * B(K,N)
template <typename T>
void gemm_tn(int64_t M, int64_t N, int64_t K, const T* A, const T* B, T* C) {
  for (int64_t k = 0; k < K; ++k) {
    const T* a = A + k * M;
    const T* b = B + k * N;
    for (int64_t i = 0; i < M; ++i) {
      const T av = a[i];
      T* c = C + i * N;
      for (int64_t j = 0; j < N; ++j) c[j] += av * b[j];
    }
  }
}

// col (Cin*kH*kW, Ho*Wo) for one sample, zero padding.
template <typename T>
void im2col(const T* x, int64_t cin, int64_t h, int64_t w, int64_t kh, int64_t kw,
            int64_t stride, int64_t pad, int64_t ho, int64_t wo, T* col) {
  for (int64_t c = 0; c < cin; ++c) {
    const T* plane = x + c * h * w;
    for (int64_t a = 0; a < kh; ++a)
      for (int64_t b = 0; b < kw; ++b) {
        T* row = col + ((c * kh + a) * kw + b) * ho * wo;
        for (int64_t i = 0; i < ho; ++i) {
          const int64_t ih = i * stride - pad + a;
          if (ih < 0 || ih >= h) {
            for (int64_t j = 0; j < wo; ++j) row[i * wo + j] = T(0);
            continue;
          }
          const T* src = plane + ih * w;
          for (int64_t j = 0; j < wo; ++j) {
            const int64_t iw = j * stride - pad + b;
            row[i * wo + j] = (iw >= 0 && iw < w) ? src[iw] : T(0);
          }
        }
      }
  }
}

// Transpose of im2col: scatter-add col rows back into the image.
template <typename T>
void col2im(const T* col, int64_t cin, int64_t h, int64_t w, int64_t kh, int64_t kw,
            int64_t stride, int64_t pad, int64_t ho, int64_t wo, T* x) {
  for (int64_t c = 0; c < cin; ++c) {
    T* plane = x + c * h * w;
    for (int64_t a = 0; a < kh; ++a)
      for (int64_t b = 0; b < kw; ++b) {
        const T* row = col + ((c * kh + a) * kw + b) * ho * wo;
        for (int64_t i = 0; i < ho; ++i) {
          const int64_t ih = i * stride - pad + a;
          if (ih < 0 || ih >= h) continue;
          T* dst = plane + ih * w;
          for (int64_t j = 0; j < wo; ++j) {
            const int64_t iw = j * stride - pad + b;
            if (iw >= 0 && iw < w) dst[iw] += row[i * wo + j];
          }
        }
      }
  }
}

}  // namespace

int64_t conv_out_extent(int64_t in, int64_t k, int64_t stride, int64_t pad) {
  int64_t out = (in + 2 * pad - k) / stride + 1;
  check(out >= 1, Err::InvalidArgument,
        "conv: output extent " + std::to_string(out) + " < 1 (in=" + std::to_string(in) +
            ", k=" + std::to_string(k) + ", s=" + std::to_string(stride) +
            ", p=" + std::to_string(pad) + ")");
  return out;
}

template <typename T>
int op_conv2d(Tape<T>& t, int x, int w, int b, int stride, int pad) {
  const Tensor<T>& vx = t.value(x);
  const Tensor<T>& vw = t.value(w);
  const Tensor<T>& vb = t.value(b);
  const Shape xs = vx.shape();
  const Shape ws = vw.shape();
  check(ws.c == xs.c, Err::DimMismatch,
        "conv2d: weight expects " + std::to_string(ws.c) + " input channels, got " +
            std::to_string(xs.c));
  check(vb.shape() == Shape{1, ws.n, 1, 1}, Err::DimMismatch, "conv2d: bias dims");
  const int64_t cout = ws.n, cin = xs.c, kh = ws.h, kw = ws.w;
  const int64_t ho = conv_out_extent(xs.h, kh, stride, pad);
  const int64_t wo = conv_out_extent(xs.w, kw, stride, pad);
  const int64_t ck = cin * kh * kw;
  const int64_t hw = ho * wo;

  // col is saved for backward: dW and dX reuse it instead of re-deriving
  // the layout.
  Tensor<T> col(Shape{xs.n, 1, ck, hw});
  Tensor<T> out(Shape{xs.n, cout, ho, wo});
  for (int64_t n = 0; n < xs.n; ++n) {
    T* cn = col.data() + n * ck * hw;
    im2col(vx.data() + n * cin * xs.h * xs.w, cin, xs.h, xs.w, kh, kw, stride, pad, ho, wo, cn);
    T* on = out.data() + n * cout * hw;
    for (int64_t co = 0; co < cout; ++co)
      for (int64_t i = 0; i < hw; ++i) on[co * hw + i] = vb[co];
    gemm_nn(cout, hw, ck, vw.data(), cn, on);
  }

  return t.emit(
      "conv2d", {x, w, b}, std::move(out),
      [x, w, b, stride, pad, col = std::move(col)](Tape<T>& tp, int self) {
        const Tensor<T>& g = tp.grad(self);
        const Shape xs2 = tp.value(x).shape();
        const Shape ws2 = tp.value(w).shape();
        const Shape os = g.shape();
        const int64_t cout = ws2.n, cin = xs2.c, kh = ws2.h, kw = ws2.w;
        const int64_t ck = cin * kh * kw;
        const int64_t hw = os.h * os.w;

        if (tp.needs_grad(b)) {
          Tensor<T> gb(Shape{1, cout, 1, 1});
          for (int64_t n = 0; n < os.n; ++n) {
            const T* gn = g.data() + n * cout * hw;
            for (int64_t co = 0; co < cout; ++co) {
              T acc = 0;
              for (int64_t i = 0; i < hw; ++i) acc += gn[co * hw + i];
              gb[co] += acc;
            }
          }
          tp.accum_grad(b, gb);
        }
        if (tp.needs_grad(w)) {
          Tensor<T> gw(ws2);
          for (int64_t n = 0; n < os.n; ++n)
            gemm_nt(cout, ck, hw, g.data() + n * cout * hw, col.data() + n * ck * hw, gw.data());
          tp.accum_grad(w, gw);
        }
        if (tp.needs_grad(x)) {
          const Tensor<T>& vw2 = tp.value(w);
          Tensor<T> gx(xs2);
          std::vector<T> dcol(static_cast<size_t>(ck * hw));
          for (int64_t n = 0; n < os.n; ++n) {
            std::fill(dcol.begin(), dcol.end(), T(0));
            gemm_tn(ck, hw, cout, vw2.data(), g.data() + n * cout * hw, dcol.data());
            col2im(dcol.data(), cin, xs2.h, xs2.w, kh, kw, stride, pad, os.h, os.w,
                   gx.data() + n * cin * xs2.h * xs2.w);
          }
          tp.accum_grad(x, gx);
        }
      });
}

template <typename T>
int op_conv2d_transpose(Tape<T>& t, int x, int w, int b, int stride, int pad) {
  const Tensor<T>& vx = t.value(x);
  const Tensor<T>& vw = t.value(w);
  const Tensor<T>& vb = t.value(b);
  const Shape xs = vx.shape();
  const Shape ws = vw.shape();
  check(ws.n == xs.c, Err::DimMismatch,
        "conv2d_transpose: weight expects " + std::to_string(ws.n) + " input channels, got " +
            std::to_string(xs.c));
  const int64_t cin = xs.c, cout = ws.c, kh = ws.h, kw = ws.w;
  check(vb.shape() == Shape{1, cout, 1, 1}, Err::DimMismatch, "conv2d_transpose: bias dims");
  const int64_t ho = (xs.h - 1) * stride - 2 * pad + kh;
  const int64_t wo = (xs.w - 1) * stride - 2 * pad + kw;
  check(ho >= 1 && wo >= 1, Err::InvalidArgument, "conv2d_transpose: output extent < 1");

  Tensor<T> out(Shape{xs.n, cout, ho, wo});
  for (int64_t n = 0; n < xs.n; ++n) {
    T* on = out.data() + n * cout * ho * wo;
    for (int64_t co = 0; co < cout; ++co)
      for (int64_t i = 0; i < ho * wo; ++i) on[co * ho * wo + i] = vb[co];
    for (int64_t ci = 0; ci < cin; ++ci) {
      const T* plane = vx.data() + (n * cin + ci) * xs.h * xs.w;
      for (int64_t co = 0; co < cout; ++co) {
        const T* ker = vw.data() + (ci * cout + co) * kh * kw;
        T* oplane = on + co * ho * wo;
        for (int64_t ih = 0; ih < xs.h; ++ih)
          for (int64_t iw = 0; iw < xs.w; ++iw) {
            const T xv = plane[ih * xs.w + iw];
            if (xv == T(0)) continue;
            for (int64_t a = 0; a < kh; ++a) {
              const int64_t oh = ih * stride - pad + a;
              if (oh < 0 || oh >= ho) continue;
              for (int64_t c = 0; c < kw; ++c) {
                const int64_t ow = iw * stride - pad + c;
                if (ow < 0 || ow >= wo) continue;
                oplane[oh * wo + ow] += xv * ker[a * kw + c];
              }
            }
          }
      }
    }
  }

  return t.emit(
      "conv2d_transpose", {x, w, b}, std::move(out),
      [x, w, b, stride, pad](Tape<T>& tp, int self) {
        const Tensor<T>& g = tp.grad(self);
        const Shape xs2 = tp.value(x).shape();
        const Shape ws2 = tp.value(w).shape();
        const Shape os = g.shape();
        const int64_t cin = xs2.c, cout = ws2.c, kh = ws2.h, kw = ws2.w;

        if (tp.needs_grad(b)) {
          Tensor<T> gb(Shape{1, cout, 1, 1});
          for (int64_t n = 0; n < os.n; ++n) {
            const T* gn = g.data() + n * cout * os.h * os.w;
            for (int64_t co = 0; co < cout; ++co) {
              T acc = 0;
              for (int64_t i = 0; i < os.h * os.w; ++i) acc += gn[co * os.h * os.w + i];
              gb[co] += acc;
            }
          }
          tp.accum_grad(b, gb);
        }
        if (tp.needs_grad(w)) {
          const Tensor<T>& vx2 = tp.value(x);
          Tensor<T> gw(ws2);
          for (int64_t n = 0; n < os.n; ++n)
            for (int64_t ci = 0; ci < cin; ++ci) {
              const T* plane = vx2.data() + (n * cin + ci) * xs2.h * xs2.w;
              for (int64_t co = 0; co < cout; ++co) {
                const T* gplane = g.data() + (n * cout + co) * os.h * os.w;
                T* ker = gw.data() + (ci * cout + co) * kh * kw;
                for (int64_t ih = 0; ih < xs2.h; ++ih)
                  for (int64_t iw = 0; iw < xs2.w; ++iw) {
                    const T xv = plane[ih * xs2.w + iw];
                    if (xv == T(0)) continue;
                    for (int64_t a = 0; a < kh; ++a) {
                      const int64_t oh = ih * stride - pad + a;
                      if (oh < 0 || oh >= os.h) continue;
                      for (int64_t c = 0; c < kw; ++c) {
                        const int64_t ow = iw * stride - pad + c;
                        if (ow < 0 || ow >= os.w) continue;
                        ker[a * kw + c] += xv * gplane[oh * os.w + ow];
                      }
                    }
                  }
              }
            }
          tp.accum_grad(w, gw);
        }
        if (tp.needs_grad(x)) {
          const Tensor<T>& vw2 = tp.value(w);
          Tensor<T> gx(xs2);
          for (int64_t n = 0; n < os.n; ++n)
            for (int64_t ci = 0; ci < cin; ++ci) {
              T* plane = gx.data() + (n * cin + ci) * xs2.h * xs2.w;
              for (int64_t co = 0; co < cout; ++co) {
                const T* gplane = g.data() + (n * cout + co) * os.h * os.w;
                const T* ker = vw2.data() + (ci * cout + co) * kh * kw;
                for (int64_t ih = 0; ih < xs2.h; ++ih)
                  for (int64_t iw = 0; iw < xs2.w; ++iw) {
                    T acc = 0;
                    for (int64_t a = 0; a < kh; ++a) {
                      const int64_t oh = ih * stride - pad + a;
                      if (oh < 0 || oh >= os.h) continue;
                      for (int64_t c = 0; c < kw; ++c) {
                        const int64_t ow = iw * stride - pad + c;
                        if (ow < 0 || ow >= os.w) continue;
                        acc += ker[a * kw + c] * gplane[oh * os.w + ow];
                      }
                    }
                    plane[ih * xs2.w + iw] += acc;
                  }
              }
            }
          tp.accum_grad(x, gx);
        }
      });
}

template int op_conv2d<float>(Tape<float>&, int, int, int, int, int);
template int op_conv2d<double>(Tape<double>&, int, int, int, int, int);
template int op_conv2d_transpose<float>(Tape<float>&, int, int, int, int, int);
template int op_conv2d_transpose<double>(Tape<double>&, int, int, int, int, int);

}  // namespace bift
