// Copyright 2026 The hrtfkit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the shared C API. Every run is driven by a
// RunConfig (key = value file) with flag overrides; the resolved config is
// written next to the run's outputs so artifacts are self-describing.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrtf/hrtf.h"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;
using hrtfcli::CliError;
using hrtfcli::RunConfig;

int exit_code_of(hrtf_status st) {
  switch (st) {
    case HRTF_OK:
      return 0;
    case HRTF_ERR_INVALID_ARGUMENT:
      return 2;
    case HRTF_ERR_IO:
    case HRTF_ERR_FORMAT:
      return 3;
    case HRTF_ERR_NUMERIC:
      return 4;
    default:
      return 1;
  }
}

void check(hrtf_status st) {
  if (st != HRTF_OK) throw CliError{exit_code_of(st), hrtf_last_error()};
}

std::string take_string(char* s) {
  if (s == nullptr) return {};
  std::string out(s);
  hrtf_string_free(s);
  return out;
}

using DatasetPtr = std::unique_ptr<hrtf_dataset, void (*)(hrtf_dataset*)>;
using SparsePtr = std::unique_ptr<hrtf_sparse, void (*)(hrtf_sparse*)>;
using ModelPtr = std::unique_ptr<hrtf_model, void (*)(hrtf_model*)>;
using EvalPtr = std::unique_ptr<hrtf_eval, void (*)(hrtf_eval*)>;

DatasetPtr wrap(hrtf_dataset* p) { return {p, &hrtf_dataset_free}; }
SparsePtr wrap(hrtf_sparse* p) { return {p, &hrtf_sparse_free}; }
ModelPtr wrap(hrtf_model* p) { return {p, &hrtf_model_free}; }
EvalPtr wrap(hrtf_eval* p) { return {p, &hrtf_eval_free}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{3, "cannot read " + path};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw CliError{3, "cannot write " + path.string()};
}

fs::path out_root(const RunConfig& rc) {
  if (rc.out_dir.empty()) {
    throw CliError{2, "no output directory: pass --out or set out.dir"};
  }
  return fs::path(rc.out_dir);
}

void write_resolved(const RunConfig& rc) {
  write_file(out_root(rc) / "resolved.cfg", hrtfcli::resolved_text(rc));
}

// data.dir wins over a synthetic spec; HRTF_DATA_DIR fills in when neither
// is configured.
DatasetPtr open_dataset(RunConfig& rc) {
  if (rc.data_dir.empty() && rc.synth_subjects <= 0) {
    const char* env = std::getenv("HRTF_DATA_DIR");
    if (env != nullptr && env[0] != '\0') rc.data_dir = env;
  }
  hrtf_dataset* ds = nullptr;
  if (!rc.data_dir.empty()) {
    check(hrtf_dataset_load(rc.data_dir.c_str(), &ds));
  } else if (rc.synth_subjects > 0) {
    check(hrtf_dataset_synth(rc.synth_seed, rc.synth_subjects, rc.synth_dirs,
                             rc.synth_freqs, rc.synth_sh_order,
                             rc.synth_notches, &ds));
  } else {
    throw CliError{
        2, "no dataset: set data.dir, data.synth.subjects, or HRTF_DATA_DIR"};
  }
  return wrap(ds);
}

SparsePtr open_sparse(const RunConfig& rc, const hrtf_dataset* ds) {
  hrtf_sparse* sp = nullptr;
  if (!rc.sparse_file.empty()) {
    std::istringstream in(read_file(rc.sparse_file));
    std::vector<int> indices;
    int v = 0;
    while (in >> v) indices.push_back(v);
    if (!in.eof()) {
      throw CliError{3, rc.sparse_file + ": non-integer content"};
    }
    if (indices.empty()) throw CliError{3, rc.sparse_file + ": no indices"};
    check(hrtf_sparse_explicit(indices.data(),
                               static_cast<int>(indices.size()),
                               hrtf_dataset_num_directions(ds), &sp));
  } else if (rc.sparse_m > 0) {
    check(hrtf_sparse_farthest(ds, rc.sparse_m, &sp));
  } else {
    throw CliError{2, "no measured subset: set sparse.m or sparse.file"};
  }
  return wrap(sp);
}

struct SplitCounts {
  int train;
  int val;
  int test;
};

// Subjects are consumed front to back: [0, train) train, [train, train+val)
// validation, and the final `test` subjects held out. Unset counts resolve
// to "the rest", with validation defaulting to the last tenth of the
// training subjects.
SplitCounts resolve_split(const RunConfig& rc, int total) {
  SplitCounts c{rc.split_train, rc.split_val, rc.split_test};
  if (c.test < 0 || c.test >= total) {
    throw CliError{2, "split.test must lie in [0, " +
                          std::to_string(total) + ")"};
  }
  int pool = total - c.test;
  if (c.train <= 0) c.train = pool - std::max(c.val, 0);
  if (c.val <= 0) {
    c.val = std::max(1, c.train / 10);
    c.train -= c.val;
  }
  if (c.train < 1 || c.val < 1 || c.train + c.val > pool) {
    throw CliError{2, "split (" + std::to_string(c.train) + " train, " +
                          std::to_string(c.val) + " val, " +
                          std::to_string(c.test) +
                          " test) does not fit " + std::to_string(total) +
                          " subjects"};
  }
  return c;
}

DatasetPtr slice(const hrtf_dataset* ds, int begin, int count) {
  hrtf_dataset* out = nullptr;
  check(hrtf_dataset_slice(ds, begin, count, &out));
  return wrap(out);
}

// Held-out subjects when split.test is set, the whole dataset otherwise.
DatasetPtr eval_slice(const RunConfig& rc, const hrtf_dataset* ds) {
  int total = hrtf_dataset_size(ds);
  if (rc.split_test <= 0) return slice(ds, 0, total);
  if (rc.split_test >= total) {
    throw CliError{2, "split.test must lie in [0, " +
                          std::to_string(total) + ")"};
  }
  return slice(ds, total - rc.split_test, rc.split_test);
}

std::string model_config_text(const RunConfig& rc, const hrtf_dataset* ds,
                              const hrtf_sparse* sp) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  put("variant", rc.model_variant);
  put("num_measured", std::to_string(hrtf_sparse_num_measured(sp)));
  put("num_directions", std::to_string(hrtf_dataset_num_directions(ds)));
  put("num_freqs", std::to_string(hrtf_dataset_num_freqs(ds)));
  put("latent_dim", std::to_string(rc.latent_dim));
  put("num_blocks", std::to_string(rc.num_blocks));
  put("heads", std::to_string(rc.heads));
  put("ffn_dim", std::to_string(rc.ffn_dim));
  put("conv_kernel", std::to_string(rc.conv_kernel));
  put("head_hidden", std::to_string(rc.head_hidden));
  put("dropout", hrtfcli::config_detail::format_double(rc.dropout));
  put("use_conv", rc.use_conv ? "true" : "false");
  put("use_posenc", rc.use_posenc ? "true" : "false");
  put("dilations", rc.dilations);
  return out;
}

void print_epoch(void*, int epoch, double train_loss, double val_lsd,
                 double wall_seconds) {
  std::fprintf(stderr, "epoch %d train_loss %.6f val_lsd %.6f wall %.3f\n",
               epoch, train_loss, val_lsd, wall_seconds);
}

ModelPtr train_model(const RunConfig& rc, const hrtf_dataset* ds,
                     const hrtf_sparse* sp, const std::string& config_text,
                     double beta_override, const fs::path& run_dir) {
  int total = hrtf_dataset_size(ds);
  SplitCounts counts = resolve_split(rc, total);
  DatasetPtr train_set = slice(ds, 0, counts.train);
  DatasetPtr val_set = slice(ds, counts.train, counts.val);

  hrtf_train_options opts;
  hrtf_train_options_default(&opts);
  opts.learning_rate = rc.learning_rate;
  opts.batch_size = rc.batch_size;
  opts.max_epochs = rc.max_epochs;
  opts.beta = beta_override >= 0.0 ? beta_override : rc.beta;
  opts.seed = rc.train_seed;
  opts.grad_clip = rc.grad_clip;
  fs::create_directories(run_dir);
  std::string ckpt_path = (run_dir / "best.ckpt").string();
  opts.checkpoint_path = ckpt_path.c_str();

  hrtf_model* model = nullptr;
  char* history = nullptr;
  check(hrtf_train(train_set.get(), val_set.get(), sp, config_text.c_str(),
                   &opts, &print_epoch, nullptr, &model, &history));
  auto out = wrap(model);
  write_file(run_dir / "history.csv", take_string(history));
  return out;
}

void write_eval_reports(const hrtf_eval* ev, const fs::path& dir) {
  char* text = nullptr;
  check(hrtf_eval_csv(ev, &text));
  write_file(dir / "metrics.csv", take_string(text));
  check(hrtf_eval_markdown(ev, &text));
  write_file(dir / "metrics.md", take_string(text));
  check(hrtf_eval_per_frequency_csv(ev, &text));
  write_file(dir / "per_frequency.csv", take_string(text));
}

// Rewrites the method column so ablation rows stay distinguishable in a
// merged table (the embedded variant name is "conformer" for all three).
std::string relabel_method(const std::string& csv, const std::string& label) {
  std::istringstream in(csv);
  std::string line;
  std::string out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out += line + "\n";
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto first = line.find(',');
    auto second = line.find(',', first + 1);
    out += line.substr(0, first + 1) + label + line.substr(second) + "\n";
  }
  return out;
}

int cmd_synth(RunConfig rc) {
  if (rc.synth_subjects <= 0) {
    throw CliError{2, "data.synth.subjects must be positive"};
  }
  fs::path out = out_root(rc);
  hrtf_dataset* raw = nullptr;
  check(hrtf_dataset_synth(rc.synth_seed, rc.synth_subjects, rc.synth_dirs,
                           rc.synth_freqs, rc.synth_sh_order, rc.synth_notches,
                           &raw));
  auto ds = wrap(raw);
  check(hrtf_dataset_save(ds.get(), out.string().c_str()));

  std::string manifest;
  manifest += "seed = " + std::to_string(rc.synth_seed) + "\n";
  manifest += "subjects = " + std::to_string(rc.synth_subjects) + "\n";
  manifest += "dirs = " + std::to_string(rc.synth_dirs) + "\n";
  manifest += "freqs = " + std::to_string(rc.synth_freqs) + "\n";
  manifest += "sh_order = " + std::to_string(rc.synth_sh_order) + "\n";
  manifest += "notches = " + std::to_string(rc.synth_notches) + "\n";
  int n = hrtf_dataset_size(ds.get());
  for (int s = 0; s < n; ++s) {
    char* id = nullptr;
    check(hrtf_dataset_subject_id(ds.get(), s, &id));
    manifest += "file = " +
                (out / (take_string(id) + ".hrtfset")).string() + "\n";
  }
  write_file(out / "manifest.txt", manifest);
  write_resolved(rc);
  std::printf("wrote %d subjects to %s\n", n, out.string().c_str());
  return 0;
}

int cmd_subset(RunConfig rc) {
  fs::path out = out_root(rc);
  auto ds = open_dataset(rc);
  auto sp = open_sparse(rc, ds.get());
  int m = hrtf_sparse_num_measured(sp.get());
  std::vector<int> indices(static_cast<std::size_t>(m));
  check(hrtf_sparse_indices(sp.get(), indices.data(), indices.size()));
  std::string text;
  for (int idx : indices) text += std::to_string(idx) + "\n";
  write_file(out / "sparse.txt", text);
  write_resolved(rc);
  std::printf("selected %d of %d directions\n", m,
              hrtf_sparse_num_directions(sp.get()));
  return 0;
}

int cmd_baseline(RunConfig rc, const std::string& method, int l_max,
                 double lambda) {
  fs::path out = out_root(rc);
  auto ds = open_dataset(rc);
  auto sp = open_sparse(rc, ds.get());
  auto subjects = eval_slice(rc, ds.get());

  int n = hrtf_dataset_size(subjects.get());
  std::size_t values_len =
      static_cast<std::size_t>(hrtf_dataset_num_directions(subjects.get())) *
      2 * static_cast<std::size_t>(hrtf_dataset_num_freqs(subjects.get()));
  std::vector<double> values(values_len);
  for (int s = 0; s < n; ++s) {
    check(hrtf_baseline_dense(subjects.get(), s, sp.get(), method.c_str(),
                              l_max, lambda, values.data(), values.size()));
    hrtf_dataset* pred = nullptr;
    check(hrtf_dataset_with_values(subjects.get(), s, values.data(),
                                   values.size(), &pred));
    auto holder = wrap(pred);
    check(hrtf_dataset_save(holder.get(),
                            (out / "predictions").string().c_str()));
  }

  hrtf_eval* raw = nullptr;
  check(hrtf_eval_baseline(subjects.get(), sp.get(), method.c_str(), l_max,
                           lambda, &raw));
  auto ev = wrap(raw);
  write_eval_reports(ev.get(), out);
  write_resolved(rc);
  std::printf("method %s mean_lsd_db %.9g ild_error_db %.9g\n", method.c_str(),
              hrtf_eval_mean_lsd(ev.get()), hrtf_eval_mean_ild(ev.get()));
  return 0;
}

int cmd_train(RunConfig rc) {
  fs::path out = out_root(rc);
  auto ds = open_dataset(rc);
  auto sp = open_sparse(rc, ds.get());
  std::string config_text = model_config_text(rc, ds.get(), sp.get());
  auto model = train_model(rc, ds.get(), sp.get(), config_text, -1.0, out);
  write_resolved(rc);
  std::printf("trained %s (%zu parameters); checkpoint %s\n",
              rc.model_variant.c_str(),
              hrtf_model_parameter_count(model.get()),
              (out / "best.ckpt").string().c_str());
  return 0;
}

struct TableRow {
  const char* label;
  const char* variant;
  bool use_posenc;
  bool use_conv;
  double beta;  // < 0 keeps the configured value
};

constexpr TableRow kTableRows[] = {
    {"spatial_only", "spatial_only", true, true, -1.0},
    {"per_freq_mlp", "per_freq_mlp", true, true, -1.0},
    {"vanilla_conv", "vanilla_conv", true, true, -1.0},
    {"dilated_conv", "dilated_conv", true, true, -1.0},
    {"conformer", "conformer", true, true, -1.0},
    {"conformer_no_posenc", "conformer", false, true, -1.0},
    {"conformer_no_conv", "conformer", true, false, -1.0},
    {"conformer_beta0", "conformer", true, true, 0.0},
};

int cmd_eval_table(const RunConfig& rc) {
  fs::path out = out_root(rc);
  RunConfig base = rc;
  auto ds = open_dataset(base);
  auto sp = open_sparse(base, ds.get());
  auto subjects = eval_slice(base, ds.get());

  std::vector<std::string> docs;
  for (const TableRow& row : kTableRows) {
    RunConfig variant_rc = base;
    variant_rc.model_variant = row.variant;
    variant_rc.use_posenc = row.use_posenc;
    variant_rc.use_conv = row.use_conv;
    std::string config_text =
        model_config_text(variant_rc, ds.get(), sp.get());
    auto model = train_model(variant_rc, ds.get(), sp.get(), config_text,
                             row.beta, out / row.label);
    hrtf_eval* raw = nullptr;
    check(hrtf_eval_model(model.get(), subjects.get(), sp.get(), &raw));
    auto ev = wrap(raw);
    char* csv = nullptr;
    check(hrtf_eval_csv(ev.get(), &csv));
    docs.push_back(relabel_method(take_string(csv), row.label));
    std::printf("%s mean_lsd_db %.9g ild_error_db %.9g\n", row.label,
                hrtf_eval_mean_lsd(ev.get()), hrtf_eval_mean_ild(ev.get()));
  }

  std::vector<const char*> texts;
  texts.reserve(docs.size());
  for (const std::string& doc : docs) texts.push_back(doc.c_str());
  char* csv = nullptr;
  char* md = nullptr;
  check(hrtf_report_merge(texts.data(), static_cast<int>(texts.size()), &csv,
                          &md));
  write_file(out / "table.csv", take_string(csv));
  write_file(out / "table.md", take_string(md));
  write_resolved(base);
  return 0;
}

int cmd_eval(RunConfig rc, const std::string& ckpt) {
  if (rc.model_variant == "table") {
    if (!ckpt.empty()) {
      throw CliError{2, "--ckpt does not combine with --variant table"};
    }
    return cmd_eval_table(rc);
  }
  fs::path out = out_root(rc);
  auto ds = open_dataset(rc);
  auto sp = open_sparse(rc, ds.get());
  auto subjects = eval_slice(rc, ds.get());

  ModelPtr model = wrap(static_cast<hrtf_model*>(nullptr));
  if (!ckpt.empty()) {
    hrtf_model* raw = nullptr;
    check(hrtf_model_load(ckpt.c_str(), &raw));
    model = wrap(raw);
  } else {
    // Freshly initialized weights; the paired untrained-versus-trained run
    // only differs by --ckpt.
    std::string config_text = model_config_text(rc, ds.get(), sp.get());
    hrtf_model* raw = nullptr;
    check(hrtf_model_create(config_text.c_str(), rc.train_seed, &raw));
    model = wrap(raw);
  }

  hrtf_eval* raw_ev = nullptr;
  check(hrtf_eval_model(model.get(), subjects.get(), sp.get(), &raw_ev));
  auto ev = wrap(raw_ev);
  write_eval_reports(ev.get(), out);
  write_resolved(rc);
  std::printf("mean_lsd_db %.9g ild_error_db %.9g\n",
              hrtf_eval_mean_lsd(ev.get()), hrtf_eval_mean_ild(ev.get()));
  return 0;
}

int cmd_corr(RunConfig rc) {
  fs::path out = out_root(rc);
  auto ds = open_dataset(rc);
  char* csv = nullptr;
  check(hrtf_correlation_csv(ds.get(), &csv));
  write_file(out / "correlation.csv", take_string(csv));
  write_resolved(rc);
  std::printf("wrote %s\n", (out / "correlation.csv").string().c_str());
  return 0;
}

int cmd_report(RunConfig rc, const std::vector<std::string>& inputs) {
  fs::path out = out_root(rc);
  std::vector<std::string> docs;
  docs.reserve(inputs.size());
  for (const std::string& path : inputs) docs.push_back(read_file(path));
  std::vector<const char*> texts;
  texts.reserve(docs.size());
  for (const std::string& doc : docs) texts.push_back(doc.c_str());
  char* csv = nullptr;
  char* md = nullptr;
  check(hrtf_report_merge(texts.data(), static_cast<int>(texts.size()), &csv,
                          &md));
  write_file(out / "report.csv", take_string(csv));
  write_file(out / "report.md", take_string(md));
  std::printf("merged %zu reports into %s\n", inputs.size(),
              out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HRTF log-magnitude upsampling toolkit"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir;
  app.add_option("--config", config_path, "run config file (key = value)");
  auto* seed_opt =
      app.add_option("--seed", seed, "seed for synthesis or training");
  app.add_option("--threads", threads,
                 "worker cap; 1 guarantees bitwise determinism");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  int subjects = 0, dirs = 0, freqs = 0, sh_order = 0, notches = -1;
  auto* subjects_opt = synth->add_option("--subjects", subjects);
  auto* dirs_opt = synth->add_option("--dirs", dirs);
  auto* freqs_opt = synth->add_option("--freqs", freqs);
  auto* sh_order_opt = synth->add_option("--sh-order", sh_order);
  auto* notches_opt = synth->add_option("--notches", notches);

  auto* subset = app.add_subcommand("subset", "select measured directions");
  int m = 0;
  auto* subset_m_opt = subset->add_option("--m", m, "farthest-point count");

  auto* baseline =
      app.add_subcommand("baseline", "evaluate an interpolation baseline");
  std::string method;
  int l_max = -1;
  double lambda = -1.0;
  baseline->add_option("--method", method, "nearest|distw|barycentric|sh")
      ->required();
  auto* baseline_m_opt = baseline->add_option("--m", m);
  std::string sparse_file;
  auto* baseline_sparse_opt =
      baseline->add_option("--sparse-file", sparse_file);
  baseline->add_option("--lmax", l_max, "sh order; < 0 picks from M");
  baseline->add_option("--lambda", lambda, "sh ridge weight; < 0 picks 1e-3");

  auto* train = app.add_subcommand("train", "fit a model on a dataset");
  std::string variant;
  int epochs = 0, batch = 0;
  double lr = -1.0, beta = -1.0;
  auto* train_m_opt = train->add_option("--m", m);
  auto* train_sparse_opt = train->add_option("--sparse-file", sparse_file);
  auto* variant_opt = train->add_option("--variant", variant);
  auto* epochs_opt = train->add_option("--epochs", epochs);
  auto* batch_opt = train->add_option("--batch", batch);
  auto* lr_opt = train->add_option("--lr", lr);
  auto* beta_opt = train->add_option("--beta", beta);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or variant");
  std::string ckpt;
  eval->add_option("--ckpt", ckpt, "checkpoint; omitted = fresh weights");
  auto* eval_variant_opt =
      eval->add_option("--variant", variant, "model variant, or 'table'");
  auto* eval_m_opt = eval->add_option("--m", m);
  auto* eval_sparse_opt = eval->add_option("--sparse-file", sparse_file);

  auto* corr =
      app.add_subcommand("corr", "frequency-frequency correlation matrix");

  auto* report = app.add_subcommand("report", "merge metric CSV reports");
  std::vector<std::string> report_inputs;
  report->add_option("inputs", report_inputs, "metric CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    hrtf_set_threads(threads);
    RunConfig rc = config_path.empty()
                       ? RunConfig{}
                       : hrtfcli::parse_run_config_file(config_path);
    if (seed_opt->count() > 0) {
      rc.synth_seed = seed;
      rc.train_seed = seed;
    }
    if (out_opt->count() > 0) rc.out_dir = out_dir;
    if (subset_m_opt->count() > 0 || baseline_m_opt->count() > 0 ||
        train_m_opt->count() > 0 || eval_m_opt->count() > 0) {
      rc.sparse_m = m;
    }
    if (baseline_sparse_opt->count() > 0 || train_sparse_opt->count() > 0 ||
        eval_sparse_opt->count() > 0) {
      rc.sparse_file = sparse_file;
    }
    if (variant_opt->count() > 0 || eval_variant_opt->count() > 0) {
      rc.model_variant = variant;
    }
    if (epochs_opt->count() > 0) rc.max_epochs = epochs;
    if (batch_opt->count() > 0) rc.batch_size = batch;
    if (lr_opt->count() > 0) rc.learning_rate = lr;
    if (beta_opt->count() > 0) rc.beta = beta;
    if (subjects_opt->count() > 0) rc.synth_subjects = subjects;
    if (dirs_opt->count() > 0) rc.synth_dirs = dirs;
    if (freqs_opt->count() > 0) rc.synth_freqs = freqs;
    if (sh_order_opt->count() > 0) rc.synth_sh_order = sh_order;
    if (notches_opt->count() > 0) rc.synth_notches = notches;

    if (synth->parsed()) return cmd_synth(std::move(rc));
    if (subset->parsed()) return cmd_subset(std::move(rc));
    if (baseline->parsed()) {
      return cmd_baseline(std::move(rc), method, l_max, lambda);
    }
    if (train->parsed()) return cmd_train(std::move(rc));
    if (eval->parsed()) return cmd_eval(std::move(rc), ckpt);
    if (corr->parsed()) return cmd_corr(std::move(rc));
    if (report->parsed()) return cmd_report(std::move(rc), report_inputs);
    return 2;
  } catch (const CliError& err) {
    std::fprintf(stderr, "hrtf: %s\n", err.message.c_str());
    return err.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hrtf: %s\n", e.what());
    return 1;
  }
}
