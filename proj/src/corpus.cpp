// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spkaug/error.hpp"
#include "spkaug/speed_perturb.hpp"
#include "spkaug/util.hpp"
#include "spkaug/vtlp.hpp"
#include "spkaug/wav.hpp"

namespace fs = std::filesystem;

namespace spkaug {

std::string method_name(Method m) {
  switch (m) {
    case Method::kNone: return "none";
    case Method::kSP: return "SP";
    case Method::kVTLP: return "VTLP";
  }
  return "none";
}

Method parse_method(const std::string& s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "sp") return Method::kSP;
  if (lower == "vtlp") return Method::kVTLP;
  if (lower == "none") return Method::kNone;
  throw Error("unknown method '" + s + "' (expected sp or vtlp)");
}

std::size_t Manifest::num_speakers() const {
  std::set<std::string> spks;
  for (const auto& e : entries) spks.insert(e.spk_id);
  return spks.size();
}

void Manifest::validate() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.utt_id.empty() || e.spk_id.empty())
      throw Error("manifest: empty utt_id or spk_id");
    if (!seen.insert(e.utt_id).second)
      throw Error("manifest: duplicate utt_id '" + e.utt_id + "'");
  }
}

ManifestFormat parse_manifest_format(const std::string& s) {
  if (s == "csv") return ManifestFormat::kCsv;
  if (s == "jsonl") return ManifestFormat::kJsonl;
  if (s == "kaldi") return ManifestFormat::kKaldiPair;
  throw Error("unknown manifest format '" + s + "' (csv, jsonl, kaldi)");
}

namespace {

Manifest load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_manifest: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error("load_manifest: " + path + ": empty file");
  const std::string header = trim(line);
  bool with_duration;
  if (header == "utt_id,spk_id,path")
    with_duration = false;
  else if (header == "utt_id,spk_id,path,duration_s")
    with_duration = true;
  else
    throw Error("load_manifest: " + path + ": line 1: unexpected header '" +
                header + "'");
  Manifest m;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto cols = split(row, ',');
    const std::size_t want = with_duration ? 4 : 3;
    if (cols.size() != want)
      throw Error("load_manifest: " + path + ": line " +
                  std::to_string(lineno) + ": expected " +
                  std::to_string(want) + " columns, got " +
                  std::to_string(cols.size()));
    ManifestEntry e;
    e.utt_id = cols[0];
    e.spk_id = cols[1];
    e.path = cols[2];
    if (with_duration && !cols[3].empty()) {
      try {
        e.duration_s = std::stod(cols[3]);
      } catch (const std::exception&) {
        throw Error("load_manifest: " + path + ": line " +
                    std::to_string(lineno) + ": bad duration '" + cols[3] +
                    "'");
      }
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_manifest: cannot open " + path);
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(row);
    } catch (const nlohmann::json::exception& ex) {
      throw Error("load_manifest: " + path + ": line " +
                  std::to_string(lineno) + ": " + ex.what());
    }
    ManifestEntry e;
    try {
      e.utt_id = obj.at("utt_id").get<std::string>();
      e.spk_id = obj.at("spk_id").get<std::string>();
      e.path = obj.at("path").get<std::string>();
      if (obj.contains("duration_s") && !obj["duration_s"].is_null())
        e.duration_s = obj["duration_s"].get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error("load_manifest: " + path + ": line " +
                  std::to_string(lineno) + ": " + ex.what());
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::map<std::string, std::string> load_kv(const std::string& path,
                                           const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(std::string("load_manifest: cannot open ") + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const std::size_t pos = row.find_first_of(" \t");
    if (pos == std::string::npos)
      throw Error("load_manifest: " + path + ": line " +
                  std::to_string(lineno) + ": expected '<key> <value>'");
    const std::string key = row.substr(0, pos);
    const std::string value = trim(row.substr(pos + 1));
    if (value.empty())
      throw Error("load_manifest: " + path + ": line " +
                  std::to_string(lineno) + ": empty value");
    if (!out.emplace(key, value).second)
      throw Error("load_manifest: " + path + ": duplicate " + what + " key '" +
                  key + "'");
  }
  return out;
}

Manifest load_kaldi_pair(const std::string& dir) {
  const fs::path base(dir);
  const auto scp = load_kv((base / "wav.scp").string(), "wav.scp");
  const auto u2s = load_kv((base / "utt2spk").string(), "utt2spk");

  std::vector<std::string> missing_in_scp, missing_in_u2s;
  for (const auto& [k, _] : u2s)
    if (!scp.count(k)) missing_in_scp.push_back(k);
  for (const auto& [k, _] : scp)
    if (!u2s.count(k)) missing_in_u2s.push_back(k);
  if (!missing_in_scp.empty() || !missing_in_u2s.empty()) {
    std::ostringstream os;
    os << "load_manifest: utt2spk/wav.scp key mismatch:";
    if (!missing_in_scp.empty()) {
      os << " absent from wav.scp:";
      for (const auto& k : missing_in_scp) os << " " << k;
      os << ";";
    }
    if (!missing_in_u2s.empty()) {
      os << " absent from utt2spk:";
      for (const auto& k : missing_in_u2s) os << " " << k;
    }
    throw Error(os.str());
  }

  Manifest m;
  for (const auto& [utt, path] : scp) {
    ManifestEntry e;
    e.utt_id = utt;
    e.spk_id = u2s.at(utt);
    e.path = path;
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace

Manifest load_manifest(const std::string& path, ManifestFormat format) {
  Manifest m;
  switch (format) {
    case ManifestFormat::kCsv: m = load_csv(path); break;
    case ManifestFormat::kJsonl: m = load_jsonl(path); break;
    case ManifestFormat::kKaldiPair: m = load_kaldi_pair(path); break;
  }
  m.validate();
  return m;
}

void write_manifest_csv(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_manifest_csv: cannot open " + path);
  out << "utt_id,spk_id,path,duration_s\n";
  for (const auto& e : m.entries) {
    out << e.utt_id << ',' << e.spk_id << ',' << e.path << ',';
    if (e.duration_s) out << format_double(*e.duration_s);
    out << '\n';
  }
  if (!out) throw Error("write_manifest_csv: short write to " + path);
}

void AugmentationPlan::validate(bool strict) const {
  if (alphas.empty()) throw Error("AugmentationPlan: empty alpha list");
  if (method == Method::kNone)
    throw Error("AugmentationPlan: method must be SP or VTLP");
  std::set<std::string> formatted;
  for (double a : alphas) {
    if (!(a > 0.0))
      throw Error("AugmentationPlan: alpha must be positive");
    if (std::abs(a - 1.0) < 1e-9)
      throw Error("AugmentationPlan: alpha = 1.0 would alias the original "
                  "speaker");
    if (strict && (a < 0.8 - 1e-9 || a > 1.2 + 1e-9))
      throw Error("AugmentationPlan: alpha " + std::to_string(a) +
                  " outside the no-distortion range [0.8, 1.2]");
    if (!formatted.insert(format_alpha2(a)).second)
      throw Error("AugmentationPlan: alphas collide at 2-decimal precision (" +
                  format_alpha2(a) + ")");
  }
}

std::size_t AugmentedManifest::num_speakers() const {
  std::set<std::string> spks;
  for (const auto& e : entries) spks.insert(e.spk_id);
  return spks.size();
}

std::size_t AugmentedManifest::num_originals() const {
  std::size_t n = 0;
  for (const auto& e : entries)
    if (e.method == Method::kNone) ++n;
  return n;
}

std::string pseudo_id(const std::string& base, Method method, double alpha) {
  return base + "#" + method_name(method) + format_alpha2(alpha);
}

namespace {

void append_plan_entries(const Manifest& m, const AugmentationPlan& plan,
                         const std::set<std::string>& original_spks,
                         const std::set<std::string>& original_utts,
                         AugmentedManifest* out) {
  std::vector<double> alphas = plan.alphas;
  std::sort(alphas.begin(), alphas.end());
  for (double a : alphas) {
    for (const auto& src : m.entries) {
      AugmentedEntry e;
      e.utt_id = pseudo_id(src.utt_id, plan.method, a);
      e.spk_id = pseudo_id(src.spk_id, plan.method, a);
      e.path = e.utt_id + ".wav";
      e.source_utt_id = src.utt_id;
      e.method = plan.method;
      e.alpha = a;
      if (original_spks.count(e.spk_id))
        throw Error("expand_manifest: pseudo speaker id '" + e.spk_id +
                    "' collides with an existing spk_id");
      if (original_utts.count(e.utt_id))
        throw Error("expand_manifest: pseudo utt id '" + e.utt_id +
                    "' collides with an existing utt_id");
      out->entries.push_back(std::move(e));
    }
  }
}

}  // namespace

AugmentedManifest expand_manifest_multi(const Manifest& m,
                                        const std::vector<AugmentationPlan>& plans,
                                        bool keep_original, bool strict_range) {
  m.validate();
  if (plans.empty()) throw Error("expand_manifest: no plans given");
  for (const auto& p : plans) p.validate(strict_range);

  std::set<std::string> original_spks, original_utts;
  for (const auto& e : m.entries) {
    original_spks.insert(e.spk_id);
    original_utts.insert(e.utt_id);
  }

  AugmentedManifest out;
  if (keep_original) {
    for (const auto& src : m.entries) {
      AugmentedEntry e;
      e.utt_id = src.utt_id;
      e.spk_id = src.spk_id;
      e.path = src.path;
      e.source_utt_id = src.utt_id;
      e.method = Method::kNone;
      e.alpha = 1.0;
      out.entries.push_back(std::move(e));
    }
  }
  for (const auto& plan : plans)
    append_plan_entries(m, plan, original_spks, original_utts, &out);

  // pseudo ids from distinct (method, alpha) pairs must never collide
  std::set<std::string> utts;
  for (const auto& e : out.entries)
    if (!utts.insert(e.utt_id).second)
      throw Error("expand_manifest: duplicate expanded utt_id '" + e.utt_id +
                  "' (plans overlap)");
  return out;
}

AugmentedManifest expand_manifest(const Manifest& m,
                                  const AugmentationPlan& plan,
                                  bool strict_range) {
  return expand_manifest_multi(m, {plan}, plan.keep_original, strict_range);
}

void write_augmented_csv(const AugmentedManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_augmented_csv: cannot open " + path);
  out << "utt_id,spk_id,path,source_utt_id,method,alpha\n";
  for (const auto& e : m.entries)
    out << e.utt_id << ',' << e.spk_id << ',' << e.path << ','
        << e.source_utt_id << ',' << method_name(e.method) << ','
        << format_alpha2(e.alpha) << '\n';
  if (!out) throw Error("write_augmented_csv: short write to " + path);
}

AugmentedManifest load_augmented_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_augmented_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "utt_id,spk_id,path,source_utt_id,method,alpha")
    throw Error("load_augmented_csv: " + path + ": unexpected header");
  AugmentedManifest m;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto cols = split(row, ',');
    if (cols.size() != 6)
      throw Error("load_augmented_csv: " + path + ": line " +
                  std::to_string(lineno) + ": expected 6 columns");
    AugmentedEntry e;
    e.utt_id = cols[0];
    e.spk_id = cols[1];
    e.path = cols[2];
    e.source_utt_id = cols[3];
    e.method = parse_method(cols[4]);
    try {
      e.alpha = std::stod(cols[5]);
    } catch (const std::exception&) {
      throw Error("load_augmented_csv: " + path + ": line " +
                  std::to_string(lineno) + ": bad alpha '" + cols[5] + "'");
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

namespace {

const char* status_name(RenderStatus s) {
  switch (s) {
    case RenderStatus::kOriginal: return "original";
    case RenderStatus::kWritten: return "written";
    case RenderStatus::kSkipped: return "skipped";
    case RenderStatus::kFailed: return "failed";
  }
  return "?";
}

}  // namespace

AugmentationReport run_augmentation(const AugmentedManifest& expanded,
                                    const std::string& out_dir,
                                    const AugmentOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw Error("run_augmentation: cannot create output directory " + out_dir);
  {
    // fail fast on an unwritable destination
    const fs::path probe = fs::path(out_dir) / ".spkaug_write_probe";
    std::ofstream p(probe);
    if (!p) throw Error("run_augmentation: output directory not writable: " +
                        out_dir);
    p.close();
    fs::remove(probe, ec);
  }

  // source paths: originals in the expansion, optionally overlaid by an
  // explicit source manifest (needed when keep_original was false)
  std::map<std::string, std::string> source_paths;
  for (const auto& e : expanded.entries)
    if (e.method == Method::kNone) source_paths[e.utt_id] = e.path;
  if (options.sources)
    for (const auto& e : options.sources->entries)
      source_paths[e.utt_id] = e.path;

  const unsigned workers =
      options.workers == 0 ? default_workers() : options.workers;

  AugmentationReport report;
  report.records.resize(expanded.entries.size());

  parallel_for(expanded.entries.size(), workers, [&](std::size_t i) {
    const AugmentedEntry& e = expanded.entries[i];
    RenderRecord& rec = report.records[i];
    rec.utt_id = e.utt_id;
    rec.method = e.method;
    rec.alpha = e.alpha;
    rec.realized_ratio = "-";
    if (e.method == Method::kNone) {
      rec.status = RenderStatus::kOriginal;
      return;
    }
    try {
      const auto src_it = source_paths.find(e.source_utt_id);
      if (src_it == source_paths.end())
        throw Error("source utt '" + e.source_utt_id +
                    "' not found (pass the original manifest when "
                    "keep_original was false)");
      if (e.method == Method::kSP)
        rec.realized_ratio = realized_ratio(e.alpha).str();

      const fs::path out_path = fs::path(out_dir) / (e.utt_id + ".wav");
      const WavInfo src_info = read_wav_info(src_it->second);
      std::uint64_t src_len = src_info.num_samples;
      if (static_cast<int>(src_info.sample_rate_hz) != options.sample_rate_hz) {
        const double r = static_cast<double>(options.sample_rate_hz) /
                         src_info.sample_rate_hz;
        src_len = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(src_len) * r));
      }
      const std::uint64_t expect_len =
          e.method == Method::kSP
              ? static_cast<std::uint64_t>(
                    std::llround(static_cast<double>(src_len) / e.alpha))
              : src_len;

      if (fs::exists(out_path)) {
        const WavInfo existing = read_wav_info(out_path.string());
        if (existing.num_samples == expect_len &&
            static_cast<int>(existing.sample_rate_hz) ==
                options.sample_rate_hz) {
          rec.status = RenderStatus::kSkipped;
          return;
        }
      }

      const AudioBuffer src = read_wav(src_it->second, options.sample_rate_hz);
      AudioBuffer rendered;
      if (e.method == Method::kSP) {
        SpeedSpec spec{e.alpha, options.strict_range};
        rendered = speed_perturb(src, spec);
      } else {
        WarpParams params;
        params.alpha = e.alpha;
        params.f0_hz = options.f0_hz;
        params.fmax_hz = options.fmax_hz;
        rendered = vtlp_perturb(src, params);
      }
      write_wav(rendered, out_path.string(), WavEncoding::kPcm16);
      rec.status = RenderStatus::kWritten;
    } catch (const std::exception& ex) {
      rec.status = RenderStatus::kFailed;
      rec.message = ex.what();
    }
  });

  std::sort(report.records.begin(), report.records.end(),
            [](const RenderRecord& a, const RenderRecord& b) {
              return a.utt_id < b.utt_id;
            });
  for (const auto& r : report.records) {
    switch (r.status) {
      case RenderStatus::kOriginal: ++report.originals; break;
      case RenderStatus::kWritten: ++report.written; break;
      case RenderStatus::kSkipped: ++report.skipped; break;
      case RenderStatus::kFailed: ++report.failed; break;
    }
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

void write_report(const AugmentationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_report: cannot open " + path);
  out << "utt_id\tmethod\talpha\tstatus\trealized_ratio\tmessage\n";
  for (const auto& r : report.records)
    out << r.utt_id << '\t' << method_name(r.method) << '\t'
        << format_alpha2(r.alpha) << '\t' << status_name(r.status) << '\t'
        << r.realized_ratio << '\t' << r.message << '\n';
  if (!out) throw Error("write_report: short write to " + path);
}

AudioBuffer mix_noise(const AudioBuffer& signal, const AudioBuffer& noise,
                      double snr_db, std::uint64_t seed) {
  if (signal.empty()) throw Error("mix_noise: empty signal");
  if (noise.empty()) throw Error("mix_noise: empty noise");
  if (signal.sample_rate_hz != noise.sample_rate_hz)
    throw Error("mix_noise: sample rate mismatch (" +
                std::to_string(signal.sample_rate_hz) + " vs " +
                std::to_string(noise.sample_rate_hz) + ")");
  if (rms(noise) <= 1e-8) throw Error("mix_noise: noise is silent");

  // raw engine output keeps the draw identical across standard libraries
  std::mt19937_64 rng(seed);
  const std::size_t offset = rng() % noise.size();

  // loop or crop the noise to the signal length, starting at the offset
  std::vector<double> segment(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i)
    segment[i] = noise.samples[(offset + i) % noise.size()];

  double seg_energy = 0.0, sig_energy = 0.0;
  for (double v : segment) seg_energy += v * v;
  for (double v : signal.samples) sig_energy += v * v;
  const double seg_rms = std::sqrt(seg_energy / signal.size());
  const double sig_rms = std::sqrt(sig_energy / signal.size());
  if (seg_rms <= 1e-12)
    throw Error("mix_noise: sampled noise segment is silent");

  // 10*log10(sig_rms^2 / (g*seg_rms)^2) = snr_db
  const double gain = sig_rms / (seg_rms * std::pow(10.0, snr_db / 20.0));

  AudioBuffer out = signal;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.samples[i] += gain * segment[i];
  return out;
}

}  // namespace spkaug
