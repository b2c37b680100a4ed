// Copyright 2026 The hrtfkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "FDCKPT01 serialization assumes a little-endian host");

namespace hrtf {

namespace {

constexpr char kMagic[8] = {'F', 'D', 'C', 'K', 'P', 'T', '0', '1'};

class Writer {
 public:
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  std::vector<unsigned char> take() { return std::move(buf_); }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& buf) : buf_(buf) {}

  void raw(void* p, size_t n, const char* what) {
    if (pos_ + n > buf_.size()) {
      throw_format(std::string("FDCKPT01: truncated while reading ") + what);
    }
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  uint32_t u32(const char* what) {
    uint32_t v;
    raw(&v, 4, what);
    return v;
  }
  uint64_t u64(const char* what) {
    uint64_t v;
    raw(&v, 8, what);
    return v;
  }
  double f64(const char* what) {
    double v;
    raw(&v, 8, what);
    return v;
  }
  size_t remaining() const { return buf_.size() - pos_; }

 private:
  const std::vector<unsigned char>& buf_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, 8);
  w.u32(static_cast<uint32_t>(ckpt.config_text.size()));
  w.raw(ckpt.config_text.data(), ckpt.config_text.size());
  w.u32(ckpt.epoch);
  w.f64(ckpt.val_lsd);
  w.u64(ckpt.adam_step);
  w.f64(ckpt.learning_rate);
  w.u32(static_cast<uint32_t>(ckpt.records.size()));
  for (const CheckpointRecord& rec : ckpt.records) {
    size_t numel = 1;
    for (int d : rec.shape) {
      if (d <= 0) throw_invalid("checkpoint: non-positive dimension in " + rec.name);
      numel *= static_cast<size_t>(d);
    }
    if (rec.values.size() != numel || rec.adam_m.size() != numel ||
        rec.adam_v.size() != numel) {
      throw_invalid("checkpoint: payload size mismatch in " + rec.name);
    }
    w.u32(static_cast<uint32_t>(rec.name.size()));
    w.raw(rec.name.data(), rec.name.size());
    w.u32(static_cast<uint32_t>(rec.shape.size()));
    for (int d : rec.shape) w.u32(static_cast<uint32_t>(d));
    w.raw(rec.values.data(), numel * sizeof(float));
    w.raw(rec.adam_m.data(), numel * sizeof(float));
    w.raw(rec.adam_v.data(), numel * sizeof(float));
  }
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw_format("FDCKPT01: bad magic \"" + std::string(magic, magic + 8) + "\"");
  }
  Checkpoint ckpt;
  const uint32_t cfg_len = r.u32("config length");
  if (cfg_len > (1u << 24)) throw_format("FDCKPT01: unreasonable config length");
  ckpt.config_text.resize(cfg_len);
  if (cfg_len) r.raw(ckpt.config_text.data(), cfg_len, "config");
  ckpt.epoch = r.u32("epoch");
  ckpt.val_lsd = r.f64("validation LSD");
  ckpt.adam_step = r.u64("optimizer step count");
  ckpt.learning_rate = r.f64("learning rate");
  const uint32_t n_records = r.u32("record count");
  ckpt.records.resize(n_records);
  for (uint32_t i = 0; i < n_records; ++i) {
    CheckpointRecord& rec = ckpt.records[i];
    const uint32_t name_len = r.u32("record name length");
    if (name_len > (1u << 20)) throw_format("FDCKPT01: unreasonable name length");
    rec.name.resize(name_len);
    if (name_len) r.raw(rec.name.data(), name_len, "record name");
    const uint32_t rank = r.u32("record rank");
    if (rank > 8) throw_format("FDCKPT01: unreasonable rank in " + rec.name);
    size_t numel = 1;
    rec.shape.resize(rank);
    for (uint32_t k = 0; k < rank; ++k) {
      const uint32_t d = r.u32("record dims");
      if (d == 0 || numel > (1u << 28) / std::max(d, 1u)) {
        throw_format("FDCKPT01: bad dimensions in " + rec.name);
      }
      rec.shape[k] = static_cast<int>(d);
      numel *= d;
    }
    rec.values.resize(numel);
    rec.adam_m.resize(numel);
    rec.adam_v.resize(numel);
    r.raw(rec.values.data(), numel * sizeof(float), "record values");
    r.raw(rec.adam_m.data(), numel * sizeof(float), "record Adam m");
    r.raw(rec.adam_v.data(), numel * sizeof(float), "record Adam v");
  }
  if (r.remaining() != 0) {
    throw_format("FDCKPT01: " + std::to_string(r.remaining()) +
                 " trailing bytes after records");
  }
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::vector<unsigned char> bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_io("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw_io("cannot open: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> bytes(static_cast<size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw_io("read failed: " + path);
  return decode_checkpoint(bytes);
}

}  // namespace hrtf
