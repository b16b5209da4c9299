// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Batch front end: expand a corpus manifest with pseudo-speaker plans,
// render the perturbed audio, mix speaker-preserving noise, and compute
// deviation curves. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spkaug/corpus.hpp"
#include "spkaug/deviation.hpp"
#include "spkaug/error.hpp"
#include "spkaug/util.hpp"
#include "spkaug/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : spkaug::Error {
  using spkaug::Error::Error;
};

std::vector<double> parse_alpha_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& tok : spkaug::split(csv, ',')) {
    const std::string t = spkaug::trim(tok);
    if (t.empty()) throw UsageError("empty alpha in list '" + csv + "'");
    try {
      out.push_back(std::stod(t));
    } catch (const std::exception&) {
      throw UsageError("bad alpha '" + t + "'");
    }
  }
  if (out.empty()) throw UsageError("empty alpha list");
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = spkaug::split(spec, ':');
  if (parts.size() != 3)
    throw UsageError("grid must be lo:hi:step, got '" + spec + "'");
  double lo, hi, step;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    step = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("bad grid '" + spec + "'");
  }
  if (!(step > 0.0) || hi < lo - 1e-12)
    throw UsageError("bad grid '" + spec + "'");
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(lo + i * step);
  return grid;
}

void write_run_config(const std::string& out_dir, const json& config) {
  const fs::path path = fs::path(out_dir) / "run_config.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw spkaug::Error("cannot write run config to " + path.string());
  out << config.dump(2) << '\n';
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw spkaug::Error("cannot create output directory " + out_dir);
}

// ---------------------------------------------------------------------------

struct ExpandArgs {
  std::string manifest, format = "csv", method, alphas, out;
  bool no_keep_original = false;
  bool no_strict_range = false;
};

int run_expand(const ExpandArgs& args) {
  spkaug::AugmentationPlan plan;
  try {
    plan.method = spkaug::parse_method(args.method);
    plan.alphas = parse_alpha_list(args.alphas);
    plan.keep_original = !args.no_keep_original;
    plan.validate(!args.no_strict_range);
  } catch (const std::exception& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return 2;
  }

  const auto m = spkaug::load_manifest(
      args.manifest, spkaug::parse_manifest_format(args.format));
  const auto expanded =
      spkaug::expand_manifest(m, plan, !args.no_strict_range);

  ensure_out_dir(args.out);
  spkaug::write_augmented_csv(
      expanded, (fs::path(args.out) / "expanded.csv").string());

  json config;
  config["subcommand"] = "expand";
  config["manifest"] = args.manifest;
  config["format"] = args.format;
  config["method"] = spkaug::method_name(plan.method);
  json alphas = json::array();
  for (double a : plan.alphas) alphas.push_back(spkaug::format_alpha2(a));
  config["alphas"] = alphas;
  config["keep_original"] = plan.keep_original;
  config["strict_range"] = !args.no_strict_range;
  write_run_config(args.out, config);

  std::cout << "speakers: " << m.num_speakers() << " -> "
            << expanded.num_speakers() << '\n';
  std::cout << "utterances: " << m.entries.size() << " -> "
            << expanded.entries.size() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct AugmentArgs {
  std::string expanded, manifest, format = "csv", out;
  unsigned workers = 0;
  double f0 = 4800.0, fmax = 8000.0;
  bool no_strict_range = false;
  bool allow_partial = false;
};

int run_augment(const AugmentArgs& args) {
  const auto expanded = spkaug::load_augmented_csv(args.expanded);

  spkaug::Manifest sources;
  spkaug::AugmentOptions options;
  options.workers = args.workers;
  options.strict_range = !args.no_strict_range;
  options.f0_hz = args.f0;
  options.fmax_hz = args.fmax;
  if (!args.manifest.empty()) {
    sources = spkaug::load_manifest(
        args.manifest, spkaug::parse_manifest_format(args.format));
    options.sources = &sources;
  }

  ensure_out_dir(args.out);
  const auto report = spkaug::run_augmentation(expanded, args.out, options);
  spkaug::write_report(report, (fs::path(args.out) / "report.tsv").string());
  {
    // timing is diagnostics only; kept out of report.tsv so outputs stay
    // byte-comparable across runs and worker counts
    std::ofstream timing(fs::path(args.out) / "report_timing.txt",
                         std::ios::trunc);
    timing << "wall_ms=" << report.wall_ms << '\n';
  }

  json config;
  config["subcommand"] = "augment";
  config["expanded"] = args.expanded;
  config["manifest"] = args.manifest;
  config["f0_hz"] = args.f0;
  config["fmax_hz"] = args.fmax;
  config["strict_range"] = !args.no_strict_range;
  config["allow_partial"] = args.allow_partial;
  write_run_config(args.out, config);

  std::cout << "written: " << report.written << " skipped: " << report.skipped
            << " failed: " << report.failed << " originals: "
            << report.originals << '\n';
  if (report.failed > 0 && !args.allow_partial) return 1;
  return 0;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  std::string manifest, format = "csv", method, alphas, grid = "0.8:1.2:0.05";
  std::string embeddings, agg = "mean", out;
  double bin_width = 0.01;
  double f0 = 4800.0, fmax = 8000.0;
  unsigned workers = 0;
};

int run_curves(const CurvesArgs& args) {
  spkaug::Method method;
  std::vector<double> dist_alphas, grid;
  spkaug::DeviationMode mode;
  try {
    method = spkaug::parse_method(args.method);
    if (method == spkaug::Method::kNone)
      throw UsageError("curves needs --method sp or vtlp");
    if (!args.alphas.empty()) dist_alphas = parse_alpha_list(args.alphas);
    grid = parse_grid(args.grid);
    mode = spkaug::parse_deviation_mode(args.agg);
  } catch (const std::exception& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return 2;
  }

  const auto m = spkaug::load_manifest(
      args.manifest, spkaug::parse_manifest_format(args.format));
  const auto source = args.embeddings.empty()
                          ? spkaug::EmbeddingSource::builtin_source()
                          : spkaug::EmbeddingSource::from_file(args.embeddings);

  spkaug::CurveOptions options;
  options.mode = mode;
  options.f0_hz = args.f0;
  options.fmax_hz = args.fmax;
  options.workers = args.workers;

  ensure_out_dir(args.out);

  for (double alpha : dist_alphas) {
    const auto devs = spkaug::speaker_deviations_for_alpha(m, method, alpha,
                                                           source, options);
    auto curve = spkaug::deviation_distribution(devs, args.bin_width);
    curve.alpha = alpha;
    curve.method = method;
    const std::string name = std::string("distribution_") +
                             (method == spkaug::Method::kSP ? "sp" : "vtlp") +
                             "_" + spkaug::format_alpha2(alpha) + ".csv";
    spkaug::write_distribution_csv(curve, mode, args.bin_width,
                                   (fs::path(args.out) / name).string());
  }

  const auto points =
      spkaug::deviation_perturbation_curve(m, method, grid, source, options);
  spkaug::write_curve_csv(
      points, method, args.embeddings.empty() ? "builtin" : args.embeddings,
      (fs::path(args.out) / "perturbation_curve.csv").string());

  json config;
  config["subcommand"] = "curves";
  config["manifest"] = args.manifest;
  config["format"] = args.format;
  config["method"] = spkaug::method_name(method);
  json ja = json::array();
  for (double a : dist_alphas) ja.push_back(spkaug::format_alpha2(a));
  config["alphas"] = ja;
  config["grid"] = args.grid;
  config["bin_width"] = args.bin_width;
  config["agg"] = args.agg;
  config["embeddings"] = args.embeddings.empty() ? "builtin" : args.embeddings;
  config["f0_hz"] = args.f0;
  config["fmax_hz"] = args.fmax;
  write_run_config(args.out, config);

  std::cout << "distribution curves: " << dist_alphas.size()
            << ", curve points: " << points.size() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct MixArgs {
  std::string manifest, format = "csv", noise, out;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

int run_mix(const MixArgs& args) {
  const auto m = spkaug::load_manifest(
      args.manifest, spkaug::parse_manifest_format(args.format));
  const auto noise = spkaug::read_wav(args.noise, 16000);
  ensure_out_dir(args.out);

  const unsigned workers =
      args.workers == 0 ? spkaug::default_workers() : args.workers;
  spkaug::Manifest mixed = m;
  spkaug::parallel_for(m.entries.size(), workers, [&](std::size_t i) {
    const auto& e = m.entries[i];
    const auto buf = spkaug::read_wav(e.path, 16000);
    // per-utterance seed keeps runs reproducible without a global ordering
    const std::uint64_t seed = spkaug::fnv1a64(e.utt_id) ^ args.seed;
    const auto out = spkaug::mix_noise(buf, noise, args.snr_db, seed);
    const fs::path path = fs::path(args.out) / (e.utt_id + ".wav");
    spkaug::write_wav(out, path.string(), spkaug::WavEncoding::kPcm16);
    mixed.entries[i].path = e.utt_id + ".wav";
  });
  spkaug::write_manifest_csv(mixed, (fs::path(args.out) / "mixed.csv").string());

  json config;
  config["subcommand"] = "mix";
  config["manifest"] = args.manifest;
  config["format"] = args.format;
  config["noise"] = args.noise;
  config["snr_db"] = args.snr_db;
  config["seed"] = args.seed;
  write_run_config(args.out, config);

  std::cout << "mixed: " << mixed.entries.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speaker augmentation toolkit: speed perturbation, vocal "
               "tract length perturbation, pseudo-speaker manifests and "
               "deviation analysis"};
  app.require_subcommand(1);

  ExpandArgs expand_args;
  auto* expand = app.add_subcommand(
      "expand", "expand a manifest with a pseudo-speaker plan");
  expand->add_option("--manifest", expand_args.manifest, "corpus manifest")
      ->required();
  expand->add_option("--format", expand_args.format,
                     "manifest format: csv, jsonl, kaldi");
  expand->add_option("--method", expand_args.method, "sp or vtlp")->required();
  expand->add_option("--alphas", expand_args.alphas,
                     "comma-separated perturbation factors, e.g. 0.90,1.10")
      ->required();
  expand->add_flag("--no-keep-original", expand_args.no_keep_original,
                   "emit only pseudo entries");
  expand->add_flag("--no-strict-range", expand_args.no_strict_range,
                   "allow alphas outside [0.8, 1.2]");
  expand->add_option("--out", expand_args.out, "output directory")->required();

  AugmentArgs augment_args;
  auto* augment = app.add_subcommand(
      "augment", "render an expanded manifest to WAV files");
  augment->add_option("--expanded", augment_args.expanded,
                      "expanded manifest csv")
      ->required();
  augment->add_option("--manifest", augment_args.manifest,
                      "original manifest for source lookup (needed after "
                      "--no-keep-original)");
  augment->add_option("--format", augment_args.format,
                      "manifest format: csv, jsonl, kaldi");
  augment->add_option("--out", augment_args.out, "output directory")
      ->required();
  augment->add_option("--workers", augment_args.workers,
                      "concurrent tasks (default: processors)");
  augment->add_option("--f0", augment_args.f0, "warp boundary frequency (Hz)");
  augment->add_option("--fmax", augment_args.fmax, "warp maximum frequency (Hz)");
  augment->add_flag("--no-strict-range", augment_args.no_strict_range,
                    "allow alphas outside [0.8, 1.2]");
  augment->add_flag("--allow-partial", augment_args.allow_partial,
                    "exit 0 even when some entries fail");

  CurvesArgs curves_args;
  auto* curves = app.add_subcommand(
      "curves", "deviation distribution and deviation-perturbation curves");
  curves->add_option("--manifest", curves_args.manifest, "corpus manifest")
      ->required();
  curves->add_option("--format", curves_args.format,
                     "manifest format: csv, jsonl, kaldi");
  curves->add_option("--method", curves_args.method, "sp or vtlp")->required();
  curves->add_option("--alphas", curves_args.alphas,
                     "alphas for per-alpha distribution curves");
  curves->add_option("--grid", curves_args.grid,
                     "perturbation-curve grid lo:hi:step");
  curves->add_option("--bin-width", curves_args.bin_width,
                     "distribution histogram bin width");
  curves->add_option("--agg", curves_args.agg,
                     "speaker aggregation: mean or sum");
  curves->add_option("--embeddings", curves_args.embeddings,
                     "imported embedding file (default: built-in)");
  curves->add_option("--f0", curves_args.f0, "warp boundary frequency (Hz)");
  curves->add_option("--fmax", curves_args.fmax, "warp maximum frequency (Hz)");
  curves->add_option("--workers", curves_args.workers,
                     "concurrent tasks (default: processors)");
  curves->add_option("--out", curves_args.out, "output directory")->required();

  MixArgs mix_args;
  auto* mix = app.add_subcommand(
      "mix", "speaker-preserving additive noise at a target SNR");
  mix->add_option("--manifest", mix_args.manifest, "corpus manifest")
      ->required();
  mix->add_option("--format", mix_args.format,
                  "manifest format: csv, jsonl, kaldi");
  mix->add_option("--noise", mix_args.noise, "noise WAV file")->required();
  mix->add_option("--snr", mix_args.snr_db, "signal-to-noise ratio in dB")
      ->required();
  mix->add_option("--seed", mix_args.seed, "random seed for noise offsets");
  mix->add_option("--workers", mix_args.workers,
                  "concurrent tasks (default: processors)");
  mix->add_option("--out", mix_args.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (expand->parsed()) return run_expand(expand_args);
    if (augment->parsed()) return run_augment(augment_args);
    if (curves->parsed()) return run_curves(curves_args);
    if (mix->parsed()) return run_mix(mix_args);
  } catch (const UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
