// Copyright 2026 The hrtfkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HRTFKIT_TOOLS_RUN_CONFIG_HPP_
#define HRTFKIT_TOOLS_RUN_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace hrtfcli {

// Carried to main() and mapped onto the process exit code: 2 usage/config,
// 3 data, 4 numeric.
struct CliError {
  int exit_code;
  std::string message;
};

// One flat "key = value" document driving a whole run. Flag overrides are
// applied after parsing; the resolved struct is re-serialized next to the
// run's outputs.
struct RunConfig {
  std::string data_dir;
  std::uint64_t synth_seed = 1;
  int synth_subjects = 0;
  int synth_dirs = 64;
  int synth_freqs = 32;
  int synth_sh_order = 3;
  int synth_notches = 2;
  int split_train = 0;
  int split_val = 0;
  int split_test = 0;
  int sparse_m = 0;
  std::string sparse_file;
  std::string model_variant = "conformer";
  int latent_dim = 128;
  int num_blocks = 4;
  int heads = 8;
  int ffn_dim = 256;
  int conv_kernel = 7;
  int head_hidden = 256;
  double dropout = 0.1;
  bool use_conv = true;
  bool use_posenc = true;
  std::string dilations = "1,2,4,8";
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 800;
  double beta = 1.0;
  std::uint64_t train_seed = 0;
  double grad_clip = 5.0;
  std::string out_dir;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] inline void fail(int line_no, const std::string& what) {
  throw CliError{2, "line " + std::to_string(line_no) + ": " + what};
}

inline long long parse_ll(const std::string& value, int line_no,
                          const std::string& key) {
  long long v = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    fail(line_no, "invalid integer '" + value + "' for key '" + key + "'");
  }
  return v;
}

inline int parse_int(const std::string& value, int line_no,
                     const std::string& key) {
  return static_cast<int>(parse_ll(value, line_no, key));
}

inline std::uint64_t parse_u64(const std::string& value, int line_no,
                               const std::string& key) {
  long long v = parse_ll(value, line_no, key);
  if (v < 0) fail(line_no, "key '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

inline double parse_double(const std::string& value, int line_no,
                           const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(line_no, "invalid number '" + value + "' for key '" + key + "'");
  }
}

inline bool parse_bool(const std::string& value, int line_no,
                       const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line_no, "key '" + key + "' expects true or false, got '" + value + "'");
}

inline void parse_dilations(const std::string& value, int line_no) {
  std::stringstream ss(value);
  std::string item;
  int count = 0;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (parse_ll(item, line_no, "model.dilations") < 1) {
      fail(line_no, "model.dilations entries must be positive");
    }
    ++count;
  }
  if (count == 0) fail(line_no, "model.dilations must not be empty");
}

// Shortest round-trip decimal form, so a resolved config re-parses to the
// exact same doubles.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace config_detail

inline RunConfig parse_run_config(const std::string& text) {
  using namespace config_detail;
  RunConfig rc;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key before '='");
    if (key == "data.dir") {
      rc.data_dir = value;
    } else if (key == "data.synth.seed") {
      rc.synth_seed = parse_u64(value, line_no, key);
    } else if (key == "data.synth.subjects") {
      rc.synth_subjects = parse_int(value, line_no, key);
    } else if (key == "data.synth.dirs") {
      rc.synth_dirs = parse_int(value, line_no, key);
    } else if (key == "data.synth.freqs") {
      rc.synth_freqs = parse_int(value, line_no, key);
    } else if (key == "data.synth.sh_order") {
      rc.synth_sh_order = parse_int(value, line_no, key);
    } else if (key == "data.synth.notches") {
      rc.synth_notches = parse_int(value, line_no, key);
    } else if (key == "split.train") {
      rc.split_train = parse_int(value, line_no, key);
    } else if (key == "split.val") {
      rc.split_val = parse_int(value, line_no, key);
    } else if (key == "split.test") {
      rc.split_test = parse_int(value, line_no, key);
    } else if (key == "sparse.m") {
      rc.sparse_m = parse_int(value, line_no, key);
    } else if (key == "sparse.file") {
      rc.sparse_file = value;
    } else if (key == "model.variant") {
      rc.model_variant = value;
    } else if (key == "model.latent_dim") {
      rc.latent_dim = parse_int(value, line_no, key);
    } else if (key == "model.num_blocks") {
      rc.num_blocks = parse_int(value, line_no, key);
    } else if (key == "model.heads") {
      rc.heads = parse_int(value, line_no, key);
    } else if (key == "model.ffn_dim") {
      rc.ffn_dim = parse_int(value, line_no, key);
    } else if (key == "model.conv_kernel") {
      rc.conv_kernel = parse_int(value, line_no, key);
    } else if (key == "model.head_hidden") {
      rc.head_hidden = parse_int(value, line_no, key);
    } else if (key == "model.dropout") {
      rc.dropout = parse_double(value, line_no, key);
    } else if (key == "model.use_conv") {
      rc.use_conv = parse_bool(value, line_no, key);
    } else if (key == "model.use_posenc") {
      rc.use_posenc = parse_bool(value, line_no, key);
    } else if (key == "model.dilations") {
      parse_dilations(value, line_no);
      rc.dilations = value;
    } else if (key == "train.learning_rate") {
      rc.learning_rate = parse_double(value, line_no, key);
    } else if (key == "train.batch_size") {
      rc.batch_size = parse_int(value, line_no, key);
    } else if (key == "train.max_epochs") {
      rc.max_epochs = parse_int(value, line_no, key);
    } else if (key == "train.beta") {
      rc.beta = parse_double(value, line_no, key);
    } else if (key == "train.seed") {
      rc.train_seed = parse_u64(value, line_no, key);
    } else if (key == "train.grad_clip") {
      rc.grad_clip = parse_double(value, line_no, key);
    } else if (key == "out.dir") {
      rc.out_dir = value;
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  return rc;
}

inline RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{2, "cannot read config file " + path};
  std::string text(std::istreambuf_iterator<char>(in), {});
  try {
    return parse_run_config(text);
  } catch (const CliError& err) {
    throw CliError{err.exit_code, path + ": " + err.message};
  }
}

inline std::string resolved_text(const RunConfig& rc) {
  using config_detail::format_double;
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  if (!rc.data_dir.empty()) put("data.dir", rc.data_dir);
  put("data.synth.seed", std::to_string(rc.synth_seed));
  put("data.synth.subjects", std::to_string(rc.synth_subjects));
  put("data.synth.dirs", std::to_string(rc.synth_dirs));
  put("data.synth.freqs", std::to_string(rc.synth_freqs));
  put("data.synth.sh_order", std::to_string(rc.synth_sh_order));
  put("data.synth.notches", std::to_string(rc.synth_notches));
  put("split.train", std::to_string(rc.split_train));
  put("split.val", std::to_string(rc.split_val));
  put("split.test", std::to_string(rc.split_test));
  put("sparse.m", std::to_string(rc.sparse_m));
  if (!rc.sparse_file.empty()) put("sparse.file", rc.sparse_file);
  put("model.variant", rc.model_variant);
  put("model.latent_dim", std::to_string(rc.latent_dim));
  put("model.num_blocks", std::to_string(rc.num_blocks));
  put("model.heads", std::to_string(rc.heads));
  put("model.ffn_dim", std::to_string(rc.ffn_dim));
  put("model.conv_kernel", std::to_string(rc.conv_kernel));
  put("model.head_hidden", std::to_string(rc.head_hidden));
  put("model.dropout", format_double(rc.dropout));
  put("model.use_conv", rc.use_conv ? "true" : "false");
  put("model.use_posenc", rc.use_posenc ? "true" : "false");
  put("model.dilations", rc.dilations);
  put("train.learning_rate", format_double(rc.learning_rate));
  put("train.batch_size", std::to_string(rc.batch_size));
  put("train.max_epochs", std::to_string(rc.max_epochs));
  put("train.beta", format_double(rc.beta));
  put("train.seed", std::to_string(rc.train_seed));
  put("train.grad_clip", format_double(rc.grad_clip));
  if (!rc.out_dir.empty()) put("out.dir", rc.out_dir);
  return out;
}

}  // namespace hrtfcli

#endif  // HRTFKIT_TOOLS_RUN_CONFIG_HPP_
