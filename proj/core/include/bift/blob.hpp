#pragma once

#include <iosfwd>
#include <string>

#include "bift/tensor.hpp"

namespace bift {

// TensorBlob binary format, little-endian throughout:
//   magic   4 bytes "GBFT"
//   version u32 (currently 1)
//   dtype   u8  (0 = f32, 1 = f64)
//   rank    u8  (always 4)
//   dims    4 x u32  (N, C, H, W)
//   payload row-major floats
// Round-trips are bit-exact.
inline constexpr char kBlobMagic[4] = {'G', 'B', 'F', 'T'};
inline constexpr uint32_t kBlobVersion = 1;
inline constexpr size_t kBlobHeaderBytes = 4 + 4 + 1 + 1 + 16;

template <typename T>
void blob_write(const Tensor<T>& t, std::ostream& sink);

template <typename T>
Tensor<T> blob_read(std::istream& source);

// Dtype code of the blob at the stream position; does not consume the header.
Dtype blob_peek_dtype(std::istream& source);

template <typename T>
void blob_save(const Tensor<T>& t, const std::string& path);

template <typename T>
Tensor<T> blob_load(const std::string& path);

}  // namespace bift
