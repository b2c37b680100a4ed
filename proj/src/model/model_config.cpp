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

#include "model/model_config.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace hrtf {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kSpatialOnly: return "spatial_only";
    case Variant::kPerFreqMlp: return "per_freq_mlp";
    case Variant::kVanillaConv: return "vanilla_conv";
    case Variant::kDilatedConv: return "dilated_conv";
    case Variant::kConformer: return "conformer";
  }
  throw_internal("unreachable variant");
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : all_variants()) {
    if (variant_name(v) == name) return v;
  }
  throw_invalid("unknown variant \"" + name + "\"");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> kAll = {
      Variant::kSpatialOnly, Variant::kPerFreqMlp, Variant::kVanillaConv,
      Variant::kDilatedConv, Variant::kConformer};
  return kAll;
}

void ModelConfig::validate() const {
  if (num_measured < 1) throw_invalid("model config: num_measured must be >= 1");
  if (num_directions < 1) throw_invalid("model config: num_directions must be >= 1");
  if (num_freqs < 1) throw_invalid("model config: num_freqs must be >= 1");
  if (latent_dim < 1) throw_invalid("model config: latent_dim must be >= 1");
  if (num_blocks < 1) throw_invalid("model config: num_blocks must be >= 1");
  if (heads < 1 || latent_dim % heads != 0) {
    throw_invalid("model config: latent_dim must be divisible by heads");
  }
  if (ffn_dim < 1) throw_invalid("model config: ffn_dim must be >= 1");
  if (conv_kernel < 1 || conv_kernel % 2 == 0) {
    throw_invalid("model config: conv_kernel must be odd and >= 1");
  }
  if (head_hidden < 1) throw_invalid("model config: head_hidden must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw_invalid("model config: dropout must be in [0, 1)");
  }
  if (dilations.empty()) throw_invalid("model config: dilations must be nonempty");
  for (int d : dilations) {
    if (d < 1) throw_invalid("model config: dilations must be >= 1");
  }
  if (variant != Variant::kConformer && (!use_conv || !use_posenc)) {
    throw_invalid("model config: use_conv/use_posenc apply to the conformer variant only");
  }
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int parse_int(const std::string& value, int line_no) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw_invalid("model config line " + std::to_string(line_no) +
                  ": expected an integer, got \"" + value + "\"");
  }
}

double parse_double(const std::string& value, int line_no) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw_invalid("model config line " + std::to_string(line_no) +
                  ": expected a number, got \"" + value + "\"");
  }
}

bool parse_bool(const std::string& value, int line_no) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw_invalid("model config line " + std::to_string(line_no) +
                ": expected true or false, got \"" + value + "\"");
}

std::vector<int> parse_int_list(const std::string& value, int line_no) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_int(trim(item), line_no));
  }
  if (out.empty()) {
    throw_invalid("model config line " + std::to_string(line_no) +
                  ": expected a comma-separated integer list");
  }
  return out;
}

}  // namespace

std::string ModelConfig::to_text() const {
  std::string out;
  out += "variant = " + variant_name(variant) + "\n";
  out += "num_measured = " + std::to_string(num_measured) + "\n";
  out += "num_directions = " + std::to_string(num_directions) + "\n";
  out += "num_freqs = " + std::to_string(num_freqs) + "\n";
  out += "latent_dim = " + std::to_string(latent_dim) + "\n";
  out += "num_blocks = " + std::to_string(num_blocks) + "\n";
  out += "heads = " + std::to_string(heads) + "\n";
  out += "ffn_dim = " + std::to_string(ffn_dim) + "\n";
  out += "conv_kernel = " + std::to_string(conv_kernel) + "\n";
  out += "head_hidden = " + std::to_string(head_hidden) + "\n";
  out += "dropout = " + format_double(dropout) + "\n";
  out += "use_conv = " + std::string(use_conv ? "true" : "false") + "\n";
  out += "use_posenc = " + std::string(use_posenc ? "true" : "false") + "\n";
  out += "dilations = ";
  for (size_t i = 0; i < dilations.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dilations[i]);
  }
  out += "\n";
  return out;
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  ModelConfig cfg;
  std::map<std::string, bool> seen;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw_invalid("model config line " + std::to_string(line_no) +
                    ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key)) {
      throw_invalid("model config line " + std::to_string(line_no) +
                    ": duplicate key \"" + key + "\"");
    }
    seen[key] = true;

    if (key == "variant") {
      cfg.variant = variant_from_name(value);
    } else if (key == "num_measured") {
      cfg.num_measured = parse_int(value, line_no);
    } else if (key == "num_directions") {
      cfg.num_directions = parse_int(value, line_no);
    } else if (key == "num_freqs") {
      cfg.num_freqs = parse_int(value, line_no);
    } else if (key == "latent_dim") {
      cfg.latent_dim = parse_int(value, line_no);
    } else if (key == "num_blocks") {
      cfg.num_blocks = parse_int(value, line_no);
    } else if (key == "heads") {
      cfg.heads = parse_int(value, line_no);
    } else if (key == "ffn_dim") {
      cfg.ffn_dim = parse_int(value, line_no);
    } else if (key == "conv_kernel") {
      cfg.conv_kernel = parse_int(value, line_no);
    } else if (key == "head_hidden") {
      cfg.head_hidden = parse_int(value, line_no);
    } else if (key == "dropout") {
      cfg.dropout = parse_double(value, line_no);
    } else if (key == "use_conv") {
      cfg.use_conv = parse_bool(value, line_no);
    } else if (key == "use_posenc") {
      cfg.use_posenc = parse_bool(value, line_no);
    } else if (key == "dilations") {
      cfg.dilations = parse_int_list(value, line_no);
    } else {
      throw_invalid("model config line " + std::to_string(line_no) +
                    ": unknown key \"" + key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace hrtf
