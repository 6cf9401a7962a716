#pragma once

#include "bift/tape.hpp"

namespace bift {

// Cross-correlation (no kernel flip) with bias.
//   x (N,Cin,H,W), w (Cout,Cin,kH,kW), b (1,Cout,1,1)
//   out (N,Cout, (H+2p-kH)/s+1, (W+2p-kW)/s+1)
// Differentiable w.r.t. x, w and b.
template <typename T>
int op_conv2d(Tape<T>& t, int x, int w, int b, int stride, int pad);

// Fractionally-strided (transposed) convolution.
//   x (N,Cin,H,W), w (Cin,Cout,kH,kW), b (1,Cout,1,1)
//   out (N,Cout, (H-1)s-2p+kH, (W-1)s-2p+kW)
template <typename T>
int op_conv2d_transpose(Tape<T>& t, int x, int w, int b, int stride, int pad);

// Output spatial extent of a strided correlation; errors if < 1.
int64_t conv_out_extent(int64_t in, int64_t k, int64_t stride, int64_t pad);

}  // namespace bift
