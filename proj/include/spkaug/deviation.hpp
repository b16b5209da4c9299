// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <string>
#include <vector>

#include "spkaug/audio.hpp"
#include "spkaug/corpus.hpp"

namespace spkaug {

// ---------------------------------------------------------------------------
// Embeddings.
// ---------------------------------------------------------------------------

struct EmbeddingVector {
  std::vector<double> values;
  bool normalized = false;

  std::size_t dim() const { return values.size(); }
};

/// Deterministic 40-dimensional proxy embedding: 20 mel-cepstral
/// coefficients (24-filter bank over 0-8000 Hz, 25 ms / 10 ms frames,
/// DCT-II coefficients 1-20) summarized by per-coefficient mean and standard
/// deviation over frames, L2-normalized. A stand-in for a trained speaker
/// model; comparisons through it are qualitative. Requires >= 0.5 s @ 16 kHz.
EmbeddingVector baseline_embedding(const AudioBuffer& buffer);

/// Loads the exchange format: one line per utterance, `utt_id` followed by
/// whitespace-separated floats; '#' starts a comment line. Vectors are
/// L2-normalized on load; inconsistent dims, duplicates and zero vectors are
/// rejected.
std::map<std::string, EmbeddingVector> import_embeddings(
    const std::string& path);

/// 1 - cos(e, ep), in [0, 2].
double cosine_deviation(const EmbeddingVector& e, const EmbeddingVector& ep);

// ---------------------------------------------------------------------------
// Aggregation and curves.
// ---------------------------------------------------------------------------

enum class DeviationMode { kMean, kSum };

DeviationMode parse_deviation_mode(const std::string& s);  // "mean" / "sum"

struct SpeakerDeviation {
  std::string spk_id;
  std::vector<double> utterance_deviations;
  double aggregate = 0.0;
  DeviationMode mode = DeviationMode::kMean;
};

SpeakerDeviation speaker_deviation(const std::string& spk_id,
                                   const std::vector<double>& pair_deviations,
                                   DeviationMode mode = DeviationMode::kMean);

struct DistributionCurve {
  std::vector<double> bin_edges;    // ascending, size = proportions.size()+1
  std::vector<double> proportions;  // sums to 1
  double alpha = 1.0;
  Method method = Method::kSP;
};

/// Histogram of speaker aggregates over [0, max rounded up to bin_width];
/// bins are left-closed right-open, last bin closed.
DistributionCurve deviation_distribution(
    const std::vector<SpeakerDeviation>& devs, double bin_width = 0.01);

struct PerturbationCurvePoint {
  double alpha = 1.0;
  double mean_deviation = 0.0;
};

/// Embedding source for curve computation: the built-in proxy, or vectors
/// imported from file (keyed by utt_id; perturbed utterances under their
/// pseudo id, e.g. "utt1#SP0.90").
struct EmbeddingSource {
  bool builtin = true;
  std::map<std::string, EmbeddingVector> imported;

  static EmbeddingSource builtin_source() { return {}; }
  static EmbeddingSource from_file(const std::string& path);
};

struct CurveOptions {
  DeviationMode mode = DeviationMode::kMean;
  double f0_hz = 4800.0;
  double fmax_hz = 8000.0;
  int sample_rate_hz = 16000;
  unsigned workers = 0;  // 0 -> number of processors
};

/// 0.80 to 1.20 in steps of 0.05 (9 points).
std::vector<double> default_alpha_grid();

/// Per-speaker deviations for one (method, alpha) over a manifest.
std::vector<SpeakerDeviation> speaker_deviations_for_alpha(
    const Manifest& m, Method method, double alpha,
    const EmbeddingSource& source, const CurveOptions& options = {});

/// Mean speaker-level deviation per grid alpha, in grid order.
std::vector<PerturbationCurvePoint> deviation_perturbation_curve(
    const Manifest& m, Method method, const std::vector<double>& alpha_grid,
    const EmbeddingSource& source, const CurveOptions& options = {});

// ---------------------------------------------------------------------------
// CSV output.
// ---------------------------------------------------------------------------

void write_distribution_csv(const DistributionCurve& curve,
                            DeviationMode mode, double bin_width,
                            const std::string& path);

void write_curve_csv(const std::vector<PerturbationCurvePoint>& points,
                     Method method, const std::string& embedding_desc,
                     const std::string& path);

}  // namespace spkaug
