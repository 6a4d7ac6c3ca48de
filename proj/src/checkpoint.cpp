// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"

namespace patchrnn {

namespace {

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(std::string("truncated checkpoint while reading ") +
                            what);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors) {
  std::string out(kCheckpointMagic);
  for (const NamedTensor& t : tensors) {
    if (nn::element_count(t.shape) != t.values.size()) {
      throw CheckpointError("tensor '" + t.name + "' shape/value mismatch");
    }
    put(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) put(out, static_cast<std::uint64_t>(d));
    for (double v : t.values) put(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<NamedTensor> decode_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw CheckpointError("not a PRNN1 checkpoint (bad magic or version)");
  }
  Reader in(bytes.substr(kCheckpointMagic.size()));
  std::vector<NamedTensor> tensors;
  while (!in.done()) {
    NamedTensor t;
    const auto name_len = in.get<std::uint32_t>("name length");
    t.name = std::string(in.take(name_len, "name"));
    const auto rank = in.get<std::uint32_t>("rank");
    if (rank > 8) throw CheckpointError("implausible rank for '" + t.name + "'");
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      const auto d = in.get<std::uint64_t>("dims");
      if (d != 0 && count > (std::uint64_t{1} << 40) / d) {
        throw CheckpointError("implausible size for '" + t.name + "'");
      }
      count *= d;
      t.shape.push_back(static_cast<std::size_t>(d));
    }
    t.values.resize(static_cast<std::size_t>(count));
    for (double& v : t.values) {
      v = std::bit_cast<double>(in.get<std::uint64_t>("values"));
    }
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<NamedTensor>& tensors) {
  write_file(path, encode_checkpoint(tensors));
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

NamedTensor text_tensor(std::string name, std::string_view text) {
  NamedTensor t;
  t.name = std::move(name);
  t.shape = {text.size()};
  t.values.reserve(text.size());
  for (char c : text) t.values.push_back(static_cast<unsigned char>(c));
  return t;
}

std::string tensor_text(const NamedTensor& tensor) {
  std::string out;
  out.reserve(tensor.values.size());
  for (double v : tensor.values) {
    if (!(v >= 0.0 && v <= 255.0) || v != static_cast<int>(v)) {
      throw CheckpointError("tensor '" + tensor.name + "' is not text");
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

}  // namespace patchrnn
