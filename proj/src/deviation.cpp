// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spkaug/error.hpp"
#include "spkaug/features.hpp"
#include "spkaug/speed_perturb.hpp"
#include "spkaug/util.hpp"
#include "spkaug/vtlp.hpp"
#include "spkaug/wav.hpp"

namespace spkaug {

namespace {

constexpr std::size_t kNumFilters = 24;
constexpr std::size_t kFirstCoeff = 1;
constexpr std::size_t kNumCoeffs = 20;

void l2_normalize(EmbeddingVector* e, const std::string& what) {
  double norm2 = 0.0;
  for (double v : e->values) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  if (norm < 1e-12)
    throw Error(what + ": zero vector is not normalizable");
  for (double& v : e->values) v /= norm;
  e->normalized = true;
}

}  // namespace

EmbeddingVector baseline_embedding(const AudioBuffer& buffer) {
  if (buffer.sample_rate_hz != 16000)
    throw Error("baseline_embedding: expected 16 kHz input, got " +
                std::to_string(buffer.sample_rate_hz));
  if (buffer.size() < 8000)
    throw Error("baseline_embedding: buffer too short (need >= 0.5 s)");

  const StftParams params{400, 160, 512, Window::kHannPeriodic};
  const auto coeffs = mfcc_frames(buffer, params, kNumFilters, kFirstCoeff,
                                  kNumCoeffs, 0.0, 8000.0);
  const std::size_t frames = coeffs.size();

  EmbeddingVector e;
  e.values.assign(2 * kNumCoeffs, 0.0);
  for (std::size_t c = 0; c < kNumCoeffs; ++c) {
    double mean = 0.0;
    for (std::size_t m = 0; m < frames; ++m) mean += coeffs[m][c];
    mean /= static_cast<double>(frames);
    double var = 0.0;
    for (std::size_t m = 0; m < frames; ++m) {
      const double d = coeffs[m][c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(frames);
    e.values[c] = mean;
    e.values[kNumCoeffs + c] = std::sqrt(var);
  }
  l2_normalize(&e, "baseline_embedding");
  return e;
}

std::map<std::string, EmbeddingVector> import_embeddings(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("import_embeddings: cannot open " + path);
  std::map<std::string, EmbeddingVector> out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    std::istringstream is(row);
    std::string utt;
    is >> utt;
    EmbeddingVector e;
    double v;
    while (is >> v) e.values.push_back(v);
    if (!is.eof())
      throw Error("import_embeddings: " + path + ": line " +
                  std::to_string(lineno) + ": malformed float");
    if (e.values.empty())
      throw Error("import_embeddings: " + path + ": line " +
                  std::to_string(lineno) + ": no values for '" + utt + "'");
    if (dim == 0) dim = e.dim();
    if (e.dim() != dim)
      throw Error("import_embeddings: " + path + ": utt '" + utt +
                  "' has dim " + std::to_string(e.dim()) +
                  ", expected " + std::to_string(dim));
    l2_normalize(&e, "import_embeddings: utt '" + utt + "'");
    if (!out.emplace(utt, std::move(e)).second)
      throw Error("import_embeddings: " + path + ": duplicate utt_id '" +
                  utt + "'");
  }
  return out;
}

double cosine_deviation(const EmbeddingVector& e, const EmbeddingVector& ep) {
  if (e.dim() != ep.dim())
    throw Error("cosine_deviation: dim mismatch (" + std::to_string(e.dim()) +
                " vs " + std::to_string(ep.dim()) + ")");
  if (e.dim() == 0) throw Error("cosine_deviation: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < e.dim(); ++i) {
    dot += e.values[i] * ep.values[i];
    na += e.values[i] * e.values[i];
    nb += ep.values[i] * ep.values[i];
  }
  if (na < 1e-24 || nb < 1e-24)
    throw Error("cosine_deviation: zero vector");
  return 1.0 - dot / std::sqrt(na * nb);
}

DeviationMode parse_deviation_mode(const std::string& s) {
  if (s == "mean") return DeviationMode::kMean;
  if (s == "sum") return DeviationMode::kSum;
  throw Error("unknown aggregation mode '" + s + "' (mean, sum)");
}

SpeakerDeviation speaker_deviation(const std::string& spk_id,
                                   const std::vector<double>& pair_deviations,
                                   DeviationMode mode) {
  if (pair_deviations.empty())
    throw Error("speaker_deviation: empty deviation list for '" + spk_id +
                "'");
  for (double d : pair_deviations)
    if (!(d >= -1e-12 && d <= 2.0 + 1e-12))
      throw Error("speaker_deviation: deviation " + std::to_string(d) +
                  " outside [0, 2]");
  SpeakerDeviation out;
  out.spk_id = spk_id;
  out.utterance_deviations = pair_deviations;
  out.mode = mode;
  const double sum =
      std::accumulate(pair_deviations.begin(), pair_deviations.end(), 0.0);
  out.aggregate = mode == DeviationMode::kSum
                      ? sum
                      : sum / static_cast<double>(pair_deviations.size());
  return out;
}

DistributionCurve deviation_distribution(
    const std::vector<SpeakerDeviation>& devs, double bin_width) {
  if (devs.empty()) throw Error("deviation_distribution: no speakers");
  if (!(bin_width > 0.0))
    throw Error("deviation_distribution: bin_width must be positive");
  double max_dev = 0.0;
  for (const auto& d : devs) max_dev = std::max(max_dev, d.aggregate);
  const auto num_bins = static_cast<std::size_t>(
      std::max<double>(1.0, std::ceil(max_dev / bin_width - 1e-12)));

  DistributionCurve curve;
  curve.bin_edges.resize(num_bins + 1);
  for (std::size_t i = 0; i <= num_bins; ++i)
    curve.bin_edges[i] = static_cast<double>(i) * bin_width;
  curve.proportions.assign(num_bins, 0.0);
  for (const auto& d : devs) {
    auto bin = static_cast<std::size_t>(d.aggregate / bin_width);
    if (bin >= num_bins) bin = num_bins - 1;  // last bin is closed
    curve.proportions[bin] += 1.0;
  }
  for (double& p : curve.proportions) p /= static_cast<double>(devs.size());
  return curve;
}

EmbeddingSource EmbeddingSource::from_file(const std::string& path) {
  EmbeddingSource s;
  s.builtin = false;
  s.imported = import_embeddings(path);
  return s;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 80; i <= 120; i += 5)
    grid.push_back(static_cast<double>(i) / 100.0);
  return grid;
}

namespace {

AudioBuffer perturb(const AudioBuffer& src, Method method, double alpha,
                    const CurveOptions& options) {
  if (method == Method::kSP) {
    return speed_perturb(src, SpeedSpec{alpha, true});
  }
  WarpParams params;
  params.alpha = alpha;
  params.f0_hz = options.f0_hz;
  params.fmax_hz = options.fmax_hz;
  return vtlp_perturb(src, params);
}

const EmbeddingVector& lookup_imported(
    const std::map<std::string, EmbeddingVector>& table,
    const std::string& key) {
  const auto it = table.find(key);
  if (it == table.end())
    throw Error("embedding for '" + key + "' not found in imported file");
  return it->second;
}

}  // namespace

std::vector<SpeakerDeviation> speaker_deviations_for_alpha(
    const Manifest& m, Method method, double alpha,
    const EmbeddingSource& source, const CurveOptions& options) {
  m.validate();
  if (m.entries.empty())
    throw Error("speaker_deviations_for_alpha: empty manifest");
  if (!(alpha >= 0.8 - 1e-9 && alpha <= 1.2 + 1e-9))
    throw Error("speaker_deviations_for_alpha: alpha " +
                std::to_string(alpha) +
                " outside the no-distortion range [0.8, 1.2]");

  // deterministic processing order: sort by (spk_id, utt_id)
  std::vector<const ManifestEntry*> order;
  order.reserve(m.entries.size());
  for (const auto& e : m.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const ManifestEntry* a, const ManifestEntry* b) {
              return std::tie(a->spk_id, a->utt_id) <
                     std::tie(b->spk_id, b->utt_id);
            });

  std::vector<double> utt_dev(order.size(), 0.0);
  const unsigned workers =
      options.workers == 0 ? default_workers() : options.workers;
  const bool identity = std::abs(alpha - 1.0) < 1e-12;

  parallel_for(order.size(), workers, [&](std::size_t i) {
    const ManifestEntry& e = *order[i];
    try {
      if (source.builtin) {
        const AudioBuffer src = read_wav(e.path, options.sample_rate_hz);
        const EmbeddingVector before = baseline_embedding(src);
        const AudioBuffer after_buf = perturb(src, method, alpha, options);
        const EmbeddingVector after = baseline_embedding(after_buf);
        utt_dev[i] = cosine_deviation(before, after);
      } else {
        const EmbeddingVector& before =
            lookup_imported(source.imported, e.utt_id);
        const std::string key =
            identity ? e.utt_id : pseudo_id(e.utt_id, method, alpha);
        const EmbeddingVector& after = lookup_imported(source.imported, key);
        utt_dev[i] = cosine_deviation(before, after);
      }
    } catch (const std::exception& ex) {
      throw Error("utterance '" + e.utt_id + "': " + ex.what());
    }
  });

  std::vector<SpeakerDeviation> out;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::vector<double> devs;
    while (j < order.size() && order[j]->spk_id == order[i]->spk_id)
      devs.push_back(utt_dev[j++]);
    out.push_back(speaker_deviation(order[i]->spk_id, devs, options.mode));
    i = j;
  }
  return out;
}

std::vector<PerturbationCurvePoint> deviation_perturbation_curve(
    const Manifest& m, Method method, const std::vector<double>& alpha_grid,
    const EmbeddingSource& source, const CurveOptions& options) {
  if (alpha_grid.empty())
    throw Error("deviation_perturbation_curve: empty alpha grid");
  std::vector<PerturbationCurvePoint> points;
  points.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    const auto devs =
        speaker_deviations_for_alpha(m, method, alpha, source, options);
    double mean = 0.0;
    for (const auto& d : devs) mean += d.aggregate;
    mean /= static_cast<double>(devs.size());
    points.push_back({alpha, mean});
  }
  return points;
}

void write_distribution_csv(const DistributionCurve& curve,
                            DeviationMode mode, double bin_width,
                            const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_distribution_csv: cannot open " + path);
  out << "# method=" << method_name(curve.method)
      << " alpha=" << format_alpha2(curve.alpha)
      << " agg=" << (mode == DeviationMode::kMean ? "mean" : "sum")
      << " bin_width=" << format_double(bin_width) << '\n';
  out << "bin_left,bin_right,proportion\n";
  for (std::size_t i = 0; i < curve.proportions.size(); ++i)
    out << format_double(curve.bin_edges[i]) << ','
        << format_double(curve.bin_edges[i + 1]) << ','
        << format_double(curve.proportions[i]) << '\n';
  if (!out) throw Error("write_distribution_csv: short write to " + path);
}

void write_curve_csv(const std::vector<PerturbationCurvePoint>& points,
                     Method method, const std::string& embedding_desc,
                     const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_curve_csv: cannot open " + path);
  out << "# method=" << method_name(method) << " embedding=" << embedding_desc
      << " grid=";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out << ';';
    out << format_double(points[i].alpha);
  }
  out << '\n';
  out << "alpha,mean_deviation\n";
  for (const auto& p : points)
    out << format_double(p.alpha) << ',' << format_double(p.mean_deviation)
        << '\n';
  if (!out) throw Error("write_curve_csv: short write to " + path);
}

}  // namespace spkaug
