// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spkaug/audio.hpp"

namespace spkaug {

enum class Method {
  kNone,
  kSP,
  kVTLP,
};

std::string method_name(Method m);          // "none" / "SP" / "VTLP"
Method parse_method(const std::string& s);  // case-insensitive

// ---------------------------------------------------------------------------
// Manifests.
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string utt_id;
  std::string spk_id;
  std::string path;
  std::optional<double> duration_s;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::size_t num_speakers() const;
  /// Throws on duplicate utt_ids or empty ids.
  void validate() const;
};

enum class ManifestFormat {
  kCsv,        // header utt_id,spk_id,path[,duration_s]
  kJsonl,      // one object per line, same keys
  kKaldiPair,  // directory holding wav.scp + utt2spk
};

ManifestFormat parse_manifest_format(const std::string& s);

Manifest load_manifest(const std::string& path, ManifestFormat format);
void write_manifest_csv(const Manifest& m, const std::string& path);

// ---------------------------------------------------------------------------
// Pseudo-speaker expansion.
// ---------------------------------------------------------------------------

struct AugmentationPlan {
  Method method = Method::kSP;
  std::vector<double> alphas;  // distinct, none equal to 1.0
  bool keep_original = true;

  /// strict=false relaxes the [0.8, 1.2] range check (research use); the
  /// distinctness and alpha != 1.0 invariants always hold.
  void validate(bool strict = true) const;
  std::size_t multiplication_factor() const {
    return alphas.size() + (keep_original ? 1 : 0);
  }
};

struct AugmentedEntry {
  std::string utt_id;
  std::string spk_id;  // pseudo or original
  std::string path;    // originals: source path; pseudo: "<utt_id>.wav"
  std::string source_utt_id;
  Method method = Method::kNone;
  double alpha = 1.0;
};

struct AugmentedManifest {
  std::vector<AugmentedEntry> entries;

  std::size_t num_speakers() const;
  std::size_t num_originals() const;
};

/// Pseudo id for one (spk|utt, method, alpha), e.g. "id10001#SP0.90".
std::string pseudo_id(const std::string& base, Method method, double alpha);

/// Expands every utterance with every plan alpha, assigning pseudo-speaker
/// labels that are a pure function of (spk_id, method, alpha). Ordering is
/// deterministic: originals first, then ascending alpha, then source order.
AugmentedManifest expand_manifest(const Manifest& m,
                                  const AugmentationPlan& plan,
                                  bool strict_range = true);

/// Fusion expansion: originals are kept exactly once, then each plan's
/// pseudo entries are appended in plan order.
AugmentedManifest expand_manifest_multi(
    const Manifest& m, const std::vector<AugmentationPlan>& plans,
    bool keep_original = true, bool strict_range = true);

void write_augmented_csv(const AugmentedManifest& m, const std::string& path);
AugmentedManifest load_augmented_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Batch rendering.
// ---------------------------------------------------------------------------

struct AugmentOptions {
  unsigned workers = 0;  // 0 -> number of processors
  bool strict_range = true;
  double f0_hz = 4800.0;
  double fmax_hz = 8000.0;
  int sample_rate_hz = 16000;
  /// Extra source-path lookup for expansions created with keep_original
  /// false; entries here take precedence over originals in the expansion.
  const Manifest* sources = nullptr;
};

enum class RenderStatus { kOriginal, kWritten, kSkipped, kFailed };

struct RenderRecord {
  std::string utt_id;
  Method method = Method::kNone;
  double alpha = 1.0;
  RenderStatus status = RenderStatus::kOriginal;
  std::string realized_ratio;  // SP: "p/q"; otherwise "-"
  std::string message;         // failure cause, empty otherwise
};

struct AugmentationReport {
  std::vector<RenderRecord> records;  // sorted by utt_id
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::size_t originals = 0;
  double wall_ms = 0.0;

  std::size_t success() const { return written + skipped; }
};

/// Renders every non-original entry to out_dir/<utt_id>.wav (pcm16).
/// Existing outputs with the expected sample count and rate are skipped, so
/// re-runs are idempotent. Per-entry failures are collected, not fatal.
AugmentationReport run_augmentation(const AugmentedManifest& expanded,
                                    const std::string& out_dir,
                                    const AugmentOptions& options = {});

/// Deterministic per-entry report (no timing); one record per entry.
void write_report(const AugmentationReport& report, const std::string& path);

// ---------------------------------------------------------------------------
// Speaker-preserving additive noise.
// ---------------------------------------------------------------------------

/// Adds noise looped/cropped at a seeded random offset and scaled to the
/// requested signal-to-noise ratio. The sum is returned un-normalized and the
/// speaker label is untouched by construction.
AudioBuffer mix_noise(const AudioBuffer& signal, const AudioBuffer& noise,
                      double snr_db, std::uint64_t seed);

}  // namespace spkaug
