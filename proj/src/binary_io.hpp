#pragma once

// Little-endian record packing shared by the dataset and checkpoint formats.

#include "pgvarmion/common.hpp"
#include "pgvarmion/quadrature.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>

namespace pgvarmion::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class writer {
public:
  template <class T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void bytes(const void* data, std::size_t n) { buf_.append(static_cast<const char*>(data), n); }
  void doubles(const double* data, std::size_t n) { bytes(data, n * sizeof(double)); }
  void string(const std::string& s) {
    put<std::uint64_t>(s.size());
    bytes(s.data(), s.size());
  }
  void rule(const rule_spec& r) {
    put<std::uint8_t>(static_cast<std::uint8_t>(r.kind));
    put<std::int32_t>(r.nx);
    put<std::int32_t>(r.ny);
    put<std::int32_t>(r.domain.dim);
    put(r.domain.x0);
    put(r.domain.x1);
    put(r.domain.y0);
    put(r.domain.y1);
  }
  const std::string& data() const { return buf_; }

private:
  std::string buf_;
};

class reader {
public:
  explicit reader(const std::string& buf) : buf_(buf) {}

  template <class T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  void doubles(double* out, std::size_t n) { bytes(out, n * sizeof(double)); }
  std::string string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  rule_spec rule() {
    rule_spec r;
    r.kind = static_cast<rule_kind>(get<std::uint8_t>());
    r.nx = get<std::int32_t>();
    r.ny = get<std::int32_t>();
    r.domain.dim = get<std::int32_t>();
    r.domain.x0 = get<double>();
    r.domain.x1 = get<double>();
    r.domain.y0 = get<double>();
    r.domain.y1 = get<double>();
    return r;
  }
  bool done() const { return pos_ == buf_.size(); }

private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw data_error("truncated file");
  }
  const std::string& buf_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

} // namespace pgvarmion::io
