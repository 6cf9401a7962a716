#pragma once

#include <utility>

#include "bift/tape.hpp"

namespace bift {

// Differentiable ops over tape node ids. Elementwise ops require identical
// dims unless noted. Every op here is covered by the finite-difference
// gradient suite.

template <typename T> int op_add(Tape<T>& t, int a, int b);
template <typename T> int op_sub(Tape<T>& t, int a, int b);
template <typename T> int op_mul(Tape<T>& t, int a, int b);
template <typename T> int op_scale(Tape<T>& t, int a, T s);
template <typename T> int op_add_scalar(Tape<T>& t, int a, T s);

// Reductions to (1,1,1,1).
template <typename T> int op_sum(Tape<T>& t, int a);
template <typename T> int op_mean(Tape<T>& t, int a);

// Per-(sample,channel) spatial statistics, dims (N,C,1,1). std is the
// population deviation with the stabilizer added under the square root:
// sqrt(var + eps).
inline constexpr double kStatsEps = 1e-5;
template <typename T> std::pair<int, int> reduce_stats(Tape<T>& t, int x);

// (x - mean) / sqrt(var + eps) per (sample, channel); no learned affine.
template <typename T> int instance_norm(Tape<T>& t, int x);

// gamma * instance_norm(f) + beta with gamma/beta dims equal to f
// (spatially varying modulation).
template <typename T> int ft_modulate(Tape<T>& t, int f, int gamma, int beta);

// x * s and x + s where s has dims (N,C,1,1), broadcast over H,W
// (channelwise modulation).
template <typename T> int op_mul_bcast(Tape<T>& t, int x, int s);
template <typename T> int op_add_bcast(Tape<T>& t, int x, int s);

template <typename T> int op_relu(Tape<T>& t, int x);
template <typename T> int op_leaky_relu(Tape<T>& t, int x, T slope);
template <typename T> int op_tanh(Tape<T>& t, int x);
template <typename T> int op_sigmoid(Tape<T>& t, int x);

template <typename T> int op_concat_c(Tape<T>& t, int a, int b);
template <typename T> int op_upsample_nearest(Tape<T>& t, int x, int factor);

// Catmull-Rom bicubic (a = -0.5), half-pixel centers, edge-clamped taps.
template <typename T> int op_resize_bicubic(Tape<T>& t, int x, int64_t out_h, int64_t out_w);

// mean |a - b| over all elements -> (1,1,1,1).
template <typename T> int op_l1_loss(Tape<T>& t, int a, int b);

// mean of binary cross-entropy with logits against a constant label,
// computed in the numerically stable max(x,0) - x*y + log1p(exp(-|x|)) form.
template <typename T> int op_bce_logits(Tape<T>& t, int logits, T label);

// Non-tape helpers shared with data generation and tests.
template <typename T>
Tensor<T> resize_bicubic_value(const Tensor<T>& x, int64_t out_h, int64_t out_w);

}  // namespace bift
