#include "bift/blob.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace bift {

static_assert(std::endian::native == std::endian::little,
              "blob codec assumes a little-endian host");

namespace {

void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  check(is.good(), Err::Truncated, "blob: truncated header");
  return v;
}

uint8_t get_u8(std::istream& is) {
  char c = 0;
  is.read(&c, 1);
  check(is.good(), Err::Truncated, "blob: truncated header");
  return static_cast<uint8_t>(c);
}

}  // namespace

template <typename T>
void blob_write(const Tensor<T>& t, std::ostream& sink) {
  sink.write(kBlobMagic, 4);
  put_u32(sink, kBlobVersion);
  uint8_t dtype = static_cast<uint8_t>(dtype_of<T>());
  uint8_t rank = 4;
  sink.write(reinterpret_cast<const char*>(&dtype), 1);
  sink.write(reinterpret_cast<const char*>(&rank), 1);
  const Shape& s = t.shape();
  put_u32(sink, static_cast<uint32_t>(s.n));
  put_u32(sink, static_cast<uint32_t>(s.c));
  put_u32(sink, static_cast<uint32_t>(s.h));
  put_u32(sink, static_cast<uint32_t>(s.w));
  sink.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.count() * sizeof(T)));
  check(sink.good(), Err::Io, "blob: write failed");
}

template <typename T>
Tensor<T> blob_read(std::istream& source) {
  char magic[4] = {};
  source.read(magic, 4);
  check(source.good(), Err::Truncated, "blob: truncated header");
  check(std::memcmp(magic, kBlobMagic, 4) == 0, Err::BadMagic,
        std::string("blob: bad magic '") + std::string(magic, 4) + "'");
  uint32_t version = get_u32(source);
  check(version == kBlobVersion, Err::BadVersion,
        "blob: unsupported version " + std::to_string(version));
  uint8_t dtype = get_u8(source);
  check(dtype == static_cast<uint8_t>(dtype_of<T>()), Err::DtypeMismatch,
        "blob: dtype code " + std::to_string(dtype) + " does not match requested precision");
  uint8_t rank = get_u8(source);
  check(rank == 4, Err::BadRank, "blob: rank " + std::to_string(rank) + ", expected 4");
  Shape s;
  s.n = get_u32(source);
  s.c = get_u32(source);
  s.h = get_u32(source);
  s.w = get_u32(source);
  Tensor<T> t(s);
  source.read(reinterpret_cast<char*>(t.data()),
              static_cast<std::streamsize>(t.count() * sizeof(T)));
  check(source.gcount() == static_cast<std::streamsize>(t.count() * sizeof(T)), Err::Truncated,
        "blob: truncated payload for " + s.str());
  return t;
}

Dtype blob_peek_dtype(std::istream& source) {
  auto pos = source.tellg();
  char header[10] = {};
  source.read(header, 10);
  check(source.gcount() == 10, Err::Truncated, "blob: truncated header");
  check(std::memcmp(header, kBlobMagic, 4) == 0, Err::BadMagic, "blob: bad magic");
  source.seekg(pos);
  return static_cast<Dtype>(static_cast<uint8_t>(header[8]));
}

template <typename T>
void blob_save(const Tensor<T>& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  check(f.is_open(), Err::Io, "blob: cannot open " + path);
  blob_write(t, f);
}

template <typename T>
Tensor<T> blob_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.is_open(), Err::Io, "blob: cannot open " + path);
  return blob_read<T>(f);
}

template void blob_write<float>(const Tensor<float>&, std::ostream&);
template void blob_write<double>(const Tensor<double>&, std::ostream&);
template Tensor<float> blob_read<float>(std::istream&);
template Tensor<double> blob_read<double>(std::istream&);
template void blob_save<float>(const Tensor<float>&, const std::string&);
template void blob_save<double>(const Tensor<double>&, const std::string&);
template Tensor<float> blob_load<float>(const std::string&);
template Tensor<double> blob_load<double>(const std::string&);

}  // namespace bift
