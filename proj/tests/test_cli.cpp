// Copyright 2026 The hrtfkit Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end coverage of the hrtf binary: every case spawns the real
// executable and inspects exit codes and artifacts. The C API is linked
// only to fabricate fixture datasets.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hrtf/hrtf.h"

#ifndef HRTF_CLI_PATH
#error "HRTF_CLI_PATH must name the hrtf executable"
#endif

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("hrtfcli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch,
                  const std::string& env = "") {
  fs::create_directories(scratch);
  fs::path out_file = scratch / "stdout.txt";
  fs::path err_file = scratch / "stderr.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + HRTF_CLI_PATH + " " +
                    args + " >" + out_file.string() + " 2>" +
                    err_file.string();
  int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  REQUIRE(WIFEXITED(raw));
  return {WEXITSTATUS(raw), slurp(out_file), slurp(err_file)};
}

double stdout_value(const std::string& out, const std::string& key) {
  auto pos = out.find(key + " ");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size() + 1));
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

std::string drop_wall_column(const std::string& history) {
  std::string out;
  for (const std::string& line : split_lines(history)) {
    auto fields = split_fields(line);
    REQUIRE(fields.size() == 4);
    out += fields[0] + "," + fields[1] + "," + fields[2] + "\n";
  }
  return out;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[entry.path().filename().string()] = slurp(entry.path());
    }
  }
  return files;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  fs::path dir = temp_dir("usage");
  CHECK(run_cli("", dir).exit_code == 2);
  CHECK(run_cli("upsample", dir).exit_code == 2);
  CHECK(run_cli("synth --subjects 0 --out " + (dir / "d").string(), dir)
            .exit_code == 2);
  CHECK(run_cli("synth --subjects 2", dir).exit_code == 2);
  auto conflict = run_cli("eval --variant table --ckpt missing.ckpt --out " +
                              (dir / "e").string(),
                          dir);
  CHECK(conflict.exit_code == 2);
  auto no_sparse = run_cli(
      "corr --out " + (dir / "c").string(), dir);
  CHECK(no_sparse.exit_code == 2);
  CHECK(no_sparse.err.find("HRTF_DATA_DIR") != std::string::npos);
}

TEST_CASE("config errors are line precise") {
  fs::path dir = temp_dir("config");
  spit(dir / "bad_key.cfg",
       "data.synth.subjects = 2\n\nbogus.key = 1\n");
  auto unknown = run_cli(
      "corr --config " + (dir / "bad_key.cfg").string() + " --out " +
          (dir / "o").string(),
      dir);
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("line 3: unknown key 'bogus.key'") !=
        std::string::npos);

  spit(dir / "bad_int.cfg", "sparse.m = four\n");
  auto bad_int = run_cli(
      "corr --config " + (dir / "bad_int.cfg").string() + " --out " +
          (dir / "o").string(),
      dir);
  CHECK(bad_int.exit_code == 2);
  CHECK(bad_int.err.find("line 1") != std::string::npos);

  spit(dir / "bad_line.cfg", "data.synth.subjects\n");
  auto bad_line = run_cli(
      "corr --config " + (dir / "bad_line.cfg").string() + " --out " +
          (dir / "o").string(),
      dir);
  CHECK(bad_line.exit_code == 2);
  CHECK(bad_line.err.find("expected key = value") != std::string::npos);
}

TEST_CASE("data errors exit 3") {
  fs::path dir = temp_dir("data_errors");
  spit(dir / "missing.cfg", "data.dir = " + (dir / "nowhere").string() + "\n");
  CHECK(run_cli("corr --config " + (dir / "missing.cfg").string() +
                    " --out " + (dir / "o").string(),
                dir)
            .exit_code == 3);

  spit(dir / "synth.cfg",
       "data.synth.subjects = 2\ndata.synth.dirs = 16\ndata.synth.freqs = "
       "8\nsparse.m = 4\nmodel.latent_dim = 8\nmodel.heads = 2\n");
  CHECK(run_cli("eval --config " + (dir / "synth.cfg").string() + " --ckpt " +
                    (dir / "absent.ckpt").string() + " --out " +
                    (dir / "o").string(),
                dir)
            .exit_code == 3);
}

TEST_CASE("synth writes one file per subject plus manifest, reruns bit-identical") {
  fs::path dir = temp_dir("synth");
  fs::path data = dir / "data";
  std::string cmd = "synth --seed 4 --subjects 3 --dirs 32 --freqs 16 --out " +
                    data.string();
  REQUIRE(run_cli(cmd, dir).exit_code == 0);
  auto first = dir_contents(data);
  CHECK(first.size() == 5);  // 3 subjects + manifest + resolved config
  CHECK(first.count("manifest.txt") == 1);
  CHECK(first.count("resolved.cfg") == 1);
  CHECK(first.at("manifest.txt").find("seed = 4") != std::string::npos);
  CHECK(first.at("manifest.txt").find(".hrtfset") != std::string::npos);
  CHECK(first.at("resolved.cfg").find("data.synth.subjects = 3") !=
        std::string::npos);

  REQUIRE(run_cli(cmd, dir).exit_code == 0);
  CHECK(dir_contents(data) == first);
}

TEST_CASE("subset selects reusable measured indices via HRTF_DATA_DIR") {
  fs::path dir = temp_dir("subset");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 2 --subjects 1 --dirs 24 --freqs 8 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  auto sel = run_cli("subset --m 6 --out " + (dir / "sub").string(), dir,
                     "HRTF_DATA_DIR=" + data.string());
  REQUIRE(sel.exit_code == 0);
  CHECK(sel.out.find("selected 6 of 24") != std::string::npos);

  auto lines = split_lines(slurp(dir / "sub" / "sparse.txt"));
  REQUIRE(lines.size() == 6);
  int prev = -1;
  for (const std::string& line : lines) {
    int idx = std::stoi(line);
    CHECK(idx > prev);  // sorted and unique
    CHECK(idx < 24);
    prev = idx;
  }

  // The emitted file round-trips as an explicit sparse source.
  auto reused = run_cli(
      "baseline --method nearest --sparse-file " +
          (dir / "sub" / "sparse.txt").string() + " --out " +
          (dir / "base").string(),
      dir, "HRTF_DATA_DIR=" + data.string());
  REQUIRE(reused.exit_code == 0);
  CHECK(slurp(dir / "base" / "metrics.csv").find("nearest") !=
        std::string::npos);
}

TEST_CASE("sh baseline recovers a band-limited field through the pipeline") {
  fs::path dir = temp_dir("sh_exact");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 6 --subjects 2 --dirs 64 --freqs 8 "
                  "--sh-order 3 --notches 0 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  spit(dir / "run.cfg", "data.dir = " + data.string() + "\nsparse.m = 48\n");
  auto res = run_cli("baseline --method sh --lmax 3 --lambda 0 --config " +
                         (dir / "run.cfg").string() + " --out " +
                         (dir / "out").string(),
                     dir);
  REQUIRE(res.exit_code == 0);
  CHECK(stdout_value(res.out, "mean_lsd_db") < 1e-6);
}

TEST_CASE("barycentric report carries the extrapolation fallback count") {
  fs::path dir = temp_dir("bary");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 8 --subjects 1 --dirs 32 --freqs 8 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  spit(dir / "run.cfg", "data.dir = " + data.string() + "\n");
  auto res = run_cli("baseline --method barycentric --m 3 --config " +
                         (dir / "run.cfg").string() + " --out " +
                         (dir / "out").string(),
                     dir);
  REQUIRE(res.exit_code == 0);

  auto lines = split_lines(slurp(dir / "out" / "metrics.csv"));
  REQUIRE(lines.size() == 2);
  auto header = split_fields(lines[0]);
  auto row = split_fields(lines[1]);
  REQUIRE(header.size() == row.size());
  int fallback = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "extrapolated_targets") fallback = std::stoi(row[i]);
  }
  // Three measured points triangulate a sliver of the sphere, so most
  // targets fall outside every triangle.
  CHECK(fallback >= 1);
  CHECK(slurp(dir / "out" / "metrics.md").find("barycentric") !=
        std::string::npos);
}

TEST_CASE("correlation of a constant-plus-offset dataset is all ones") {
  fs::path dir = temp_dir("corr_ones");
  fs::path data = dir / "data";

  // Base geometry from the generator, values replaced with profile[f]
  // plus a per-(direction, ear) offset; every pairwise correlation of
  // frequency bins is then exactly one.
  hrtf_dataset* base = nullptr;
  REQUIRE(hrtf_dataset_synth(1, 1, 16, 8, 3, 0, &base) == HRTF_OK);
  int d = hrtf_dataset_num_directions(base);
  int f = hrtf_dataset_num_freqs(base);
  std::vector<double> values(static_cast<std::size_t>(d) * 2 * f);
  std::size_t i = 0;
  for (int dd = 0; dd < d; ++dd) {
    for (int e = 0; e < 2; ++e) {
      double offset = (dd * 2 + e) / 4.0 - 3.0;
      for (int ff = 0; ff < f; ++ff) {
        values[i++] = offset + ff * (ff % 3 + 1) / 8.0;
      }
    }
  }
  hrtf_dataset* shifted = nullptr;
  REQUIRE(hrtf_dataset_with_values(base, 0, values.data(), values.size(),
                                   &shifted) == HRTF_OK);
  REQUIRE(hrtf_dataset_save(shifted, data.string().c_str()) == HRTF_OK);
  hrtf_dataset_free(shifted);
  hrtf_dataset_free(base);

  spit(dir / "run.cfg", "data.dir = " + data.string() + "\n");
  auto res = run_cli("corr --config " + (dir / "run.cfg").string() +
                         " --out " + (dir / "out").string(),
                     dir);
  REQUIRE(res.exit_code == 0);

  auto lines = split_lines(slurp(dir / "out" / "correlation.csv"));
  REQUIRE(lines.size() == static_cast<std::size_t>(f) + 1);  // header + F rows
  for (std::size_t r = 1; r < lines.size(); ++r) {
    for (const std::string& field : split_fields(lines[r])) {
      CHECK(std::stod(field) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("train reruns are checksum-identical and the checkpoint reloads") {
  fs::path dir = temp_dir("train_repro");
  spit(dir / "run.cfg",
       "data.synth.seed = 3\n"
       "data.synth.subjects = 4\n"
       "data.synth.dirs = 16\n"
       "data.synth.freqs = 8\n"
       "sparse.m = 4\n"
       "model.variant = spatial_only\n"
       "model.latent_dim = 8\n"
       "model.heads = 2\n"
       "train.learning_rate = 0.02\n"
       "train.batch_size = 2\n"
       "train.max_epochs = 20\n");
  std::string base =
      "train --config " + (dir / "run.cfg").string() + " --out ";
  REQUIRE(run_cli(base + (dir / "t1").string(), dir / "s1").exit_code == 0);
  REQUIRE(run_cli(base + (dir / "t2").string(), dir / "s2").exit_code == 0);

  CHECK(slurp(dir / "t1" / "best.ckpt") == slurp(dir / "t2" / "best.ckpt"));
  // The resolved configs differ only in the out.dir the runs were given.
  auto strip_out_dir = [](const std::string& text) {
    std::string kept;
    for (const std::string& line : split_lines(text)) {
      if (line.rfind("out.dir", 0) != 0) kept += line + "\n";
    }
    return kept;
  };
  CHECK(strip_out_dir(slurp(dir / "t1" / "resolved.cfg")) ==
        strip_out_dir(slurp(dir / "t2" / "resolved.cfg")));
  // Wall-clock seconds are the one nondeterministic history column.
  CHECK(drop_wall_column(slurp(dir / "t1" / "history.csv")) ==
        drop_wall_column(slurp(dir / "t2" / "history.csv")));

  hrtf_model* model = nullptr;
  REQUIRE(hrtf_model_load((dir / "t1" / "best.ckpt").string().c_str(),
                          &model) == HRTF_OK);
  CHECK(hrtf_model_parameter_count(model) > 0);
  hrtf_model_free(model);
}

TEST_CASE("tiny pipeline trains a conformer and beats fresh weights") {
  auto start = std::chrono::steady_clock::now();
  fs::path dir = temp_dir("pipeline");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 12 --subjects 5 --dirs 32 --freqs 16 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  spit(dir / "run.cfg",
       "data.dir = " + data.string() +
           "\n"
           "split.train = 3\n"
           "split.val = 1\n"
           "split.test = 1\n"
           "sparse.m = 4\n"
           "model.variant = conformer\n"
           "model.latent_dim = 16\n"
           "model.num_blocks = 1\n"
           "model.heads = 2\n"
           "model.ffn_dim = 32\n"
           "model.head_hidden = 16\n"
           "model.dropout = 0\n"
           "train.learning_rate = 0.01\n"
           "train.batch_size = 2\n"
           "train.max_epochs = 50\n"
           "train.seed = 9\n");
  std::string cfg = " --config " + (dir / "run.cfg").string();

  REQUIRE(run_cli("train" + cfg + " --out " + (dir / "run").string(), dir)
              .exit_code == 0);
  auto trained = run_cli("eval" + cfg + " --ckpt " +
                             (dir / "run" / "best.ckpt").string() + " --out " +
                             (dir / "ev_trained").string(),
                         dir);
  REQUIRE(trained.exit_code == 0);
  auto fresh = run_cli("eval" + cfg + " --out " + (dir / "ev_fresh").string(),
                       dir);
  REQUIRE(fresh.exit_code == 0);

  double trained_lsd = stdout_value(trained.out, "mean_lsd_db");
  double fresh_lsd = stdout_value(fresh.out, "mean_lsd_db");
  CHECK(std::isfinite(trained_lsd));
  CHECK(trained_lsd < fresh_lsd);

  auto metrics = split_lines(slurp(dir / "ev_trained" / "metrics.csv"));
  REQUIRE(metrics.size() == 2);  // header + the held-out subject
  CHECK(metrics[1].find("synth_004") != std::string::npos);
  CHECK(fs::exists(dir / "ev_trained" / "per_frequency.csv"));

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  CHECK(elapsed < 300);
}

TEST_CASE("eval table mode trains every variant into one combined table") {
  fs::path dir = temp_dir("table");
  spit(dir / "run.cfg",
       "data.synth.seed = 3\n"
       "data.synth.subjects = 5\n"
       "data.synth.dirs = 16\n"
       "data.synth.freqs = 8\n"
       "split.train = 3\n"
       "split.val = 1\n"
       "split.test = 1\n"
       "sparse.m = 4\n"
       "model.latent_dim = 8\n"
       "model.num_blocks = 1\n"
       "model.heads = 2\n"
       "model.ffn_dim = 16\n"
       "model.head_hidden = 8\n"
       "model.conv_kernel = 3\n"
       "model.dropout = 0\n"
       "model.dilations = 1,2\n"
       "train.learning_rate = 0.01\n"
       "train.batch_size = 2\n"
       "train.max_epochs = 3\n");
  auto res = run_cli("eval --variant table --config " +
                         (dir / "run.cfg").string() + " --out " +
                         (dir / "out").string(),
                     dir);
  REQUIRE(res.exit_code == 0);

  const char* labels[] = {"spatial_only",        "per_freq_mlp",
                          "vanilla_conv",        "dilated_conv",
                          "conformer",           "conformer_no_posenc",
                          "conformer_no_conv",   "conformer_beta0"};
  auto lines = split_lines(slurp(dir / "out" / "table.csv"));
  REQUIRE(lines.size() == 9);  // header + one row per variant
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(split_fields(lines[i + 1])[1] == labels[i]);
    CHECK(fs::exists(dir / "out" / labels[i] / "best.ckpt"));
    CHECK(fs::exists(dir / "out" / labels[i] / "history.csv"));
  }
  CHECK(slurp(dir / "out" / "table.md").find("conformer_no_conv") !=
        std::string::npos);
}

TEST_CASE("report merges metric documents into csv and markdown") {
  fs::path dir = temp_dir("report");
  fs::path data = dir / "data";
  REQUIRE(run_cli("synth --seed 2 --subjects 2 --dirs 24 --freqs 8 --out " +
                      data.string(),
                  dir)
              .exit_code == 0);
  spit(dir / "run.cfg", "data.dir = " + data.string() + "\nsparse.m = 6\n");
  std::string cfg = " --config " + (dir / "run.cfg").string();
  REQUIRE(run_cli("baseline --method nearest" + cfg + " --out " +
                      (dir / "near").string(),
                  dir)
              .exit_code == 0);
  REQUIRE(run_cli("baseline --method distw" + cfg + " --out " +
                      (dir / "dist").string(),
                  dir)
              .exit_code == 0);

  auto res = run_cli("report " + (dir / "near" / "metrics.csv").string() +
                         " " + (dir / "dist" / "metrics.csv").string() +
                         " --out " + (dir / "rep").string(),
                     dir);
  REQUIRE(res.exit_code == 0);
  std::string merged = slurp(dir / "rep" / "report.csv");
  CHECK(split_lines(merged).size() == 5);  // header + 2 subjects x 2 methods
  CHECK(merged.find("nearest") != std::string::npos);
  CHECK(merged.find("distw") != std::string::npos);
  CHECK(slurp(dir / "rep" / "report.md").find("LSD") != std::string::npos);

  // Per-subject prediction exports accompany every baseline run.
  CHECK(fs::exists(dir / "near" / "predictions" / "synth_000.hrtfset"));
  CHECK(fs::exists(dir / "near" / "predictions" / "synth_001.hrtfset"));
}
