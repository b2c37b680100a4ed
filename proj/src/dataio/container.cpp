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

#include "dataio/container.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "HRTFSET1 serialization assumes a little-endian host");

namespace hrtf {

namespace {

constexpr char kMagic[8] = {'H', 'R', 'T', 'F', 'S', 'E', 'T', '1'};

class Writer {
 public:
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u32(uint32_t v) { raw(&v, 4); }
  void f32(float v) { raw(&v, 4); }
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
      throw_format(std::string("HRTFSET1: truncated while reading ") + what);
    }
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  uint32_t u32(const char* what) {
    uint32_t v;
    raw(&v, 4, what);
    return v;
  }
  float f32(const char* what) {
    float v;
    raw(&v, 4, what);
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

std::vector<unsigned char> encode_set(const HrtfSet& set) {
  Writer w;
  w.raw(kMagic, 8);
  w.u32(static_cast<uint32_t>(set.subject_id().size()));
  w.raw(set.subject_id().data(), set.subject_id().size());
  w.u32(static_cast<uint32_t>(set.num_directions()));
  w.u32(static_cast<uint32_t>(set.num_freqs()));
  w.f64(set.sample_rate_hz());
  for (double f : set.freq_grid().frequencies_hz()) w.f64(f);
  for (const Direction& d : set.directions()) {
    w.f64(d.azimuth_deg());
    w.f64(d.elevation_deg());
  }
  w.raw(set.logmag_db().data(), set.logmag_db().size() * sizeof(float));
  return w.take();
}

HrtfSet decode_set(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw_format("HRTFSET1: bad magic \"" + std::string(magic, magic + 8) + "\"");
  }
  const uint32_t id_len = r.u32("subject_id length");
  if (id_len > (1u << 20)) {
    throw_format("HRTFSET1: unreasonable subject_id length");
  }
  std::string subject_id(id_len, '\0');
  if (id_len) r.raw(subject_id.data(), id_len, "subject_id");
  const uint32_t d_count = r.u32("direction count");
  const uint32_t f_count = r.u32("frequency count");
  if (d_count == 0 || f_count == 0) {
    throw_format("HRTFSET1: zero direction or frequency count");
  }
  const double sample_rate = r.f64("sample rate");

  std::vector<double> freqs(f_count);
  for (uint32_t i = 0; i < f_count; ++i) freqs[i] = r.f64("frequency grid");

  std::vector<Direction> dirs;
  dirs.reserve(d_count);
  for (uint32_t i = 0; i < d_count; ++i) {
    const double az = r.f64("directions");
    const double el = r.f64("directions");
    dirs.emplace_back(az, el);
  }

  const size_t n_values = static_cast<size_t>(d_count) * kNumEars * f_count;
  std::vector<float> payload(n_values);
  r.raw(payload.data(), n_values * sizeof(float), "payload");
  if (r.remaining() != 0) {
    throw_format("HRTFSET1: " + std::to_string(r.remaining()) +
                 " trailing bytes after payload");
  }
  for (float v : payload) {
    if (!std::isfinite(v)) throw_format("HRTFSET1: non-finite payload value");
  }
  return HrtfSet(std::move(subject_id), std::move(dirs),
                 FrequencyGrid(std::move(freqs)), sample_rate,
                 std::move(payload));
}

void write_set(const HrtfSet& set, const std::string& path) {
  const std::vector<unsigned char> bytes = encode_set(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_io("write failed: " + path);
}

HrtfSet read_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw_io("cannot open: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> bytes(static_cast<size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw_io("read failed: " + path);
  return decode_set(bytes);
}

std::vector<std::string> list_dataset_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw_io("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".hrtfset") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace hrtf
