// Copyright 2026 The abusekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "abusekit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "abusekit/error.hpp"

namespace abusekit::dsp {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kTopDb = 80.0;
constexpr double kContrastQuantilePercent = 2.0;
constexpr double kContrastFloorHz = 200.0;
constexpr int kContrastOctaves = 6;
constexpr double kChromaMinHz = 27.5;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// numpy-style "reflect" padding index: mirror without repeating the edge
// sample, iterated for pads longer than the signal.
std::size_t reflect_index(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  std::int64_t m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<std::size_t>(m);
}

// Slaney mel scale: linear below 1 kHz, logarithmic above.
constexpr double kMelLinearStep = 200.0 / 3.0;
constexpr double kMelLogStartHz = 1000.0;
constexpr double kMelLogStartMel = kMelLogStartHz / kMelLinearStep;
const double kMelLogStep = std::log(6.4) / 27.0;

double hz_to_mel(double hz) {
  if (hz >= kMelLogStartHz) return kMelLogStartMel + std::log(hz / kMelLogStartHz) / kMelLogStep;
  return hz / kMelLinearStep;
}

double mel_to_hz(double mel) {
  if (mel >= kMelLogStartMel) return kMelLogStartHz * std::exp(kMelLogStep * (mel - kMelLogStartMel));
  return mel * kMelLinearStep;
}

std::vector<double> mel_edges(int sample_rate, int n_mels) {
  const double lo = hz_to_mel(0.0);
  const double hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  const int last = n_mels + 1;
  for (int i = 0; i <= last; ++i) edges[static_cast<std::size_t>(i)] = mel_to_hz(lo + (hi - lo) * i / last);
  return edges;
}

void check_spectrogram(const Spectrogram& spec) {
  if (spec.bins() != spec.n_fft / 2 + 1) throw InvalidArgument("spectrogram bins do not match n_fft/2+1");
  if (spec.sample_rate <= 0) throw InvalidArgument("spectrogram sample rate must be positive");
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc:
      return "mfcc";
    case FeatureKind::kChroma:
      return "chroma";
    case FeatureKind::kMel:
      return "mel";
    case FeatureKind::kContrast:
      return "contrast";
    case FeatureKind::kTonnetz:
      return "tonnetz";
  }
  return "?";
}

Eigen::Index expected_rows(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc:
      return 40;
    case FeatureKind::kChroma:
      return 12;
    case FeatureKind::kMel:
      return 128;
    case FeatureKind::kContrast:
      return 7;
    case FeatureKind::kTonnetz:
      return 6;
  }
  return 0;
}

Eigen::VectorXd FeatureMatrix::mean_pool() const {
  if (values.cols() == 0) throw InvalidArgument("cannot pool a feature matrix with zero frames");
  return values.rowwise().mean();
}

Spectrogram stft(const Waveform& wave, const StftConfig& config) {
  if (!is_power_of_two(config.n_fft)) {
    throw InvalidArgument("n_fft must be a power of two, got " + std::to_string(config.n_fft));
  }
  if (config.hop <= 0) throw InvalidArgument("hop must be positive");
  if (wave.samples.empty()) throw InvalidArgument("stft needs at least one sample");

  const auto n = static_cast<std::int64_t>(wave.samples.size());
  const int n_fft = config.n_fft;
  const std::int64_t pad = n_fft / 2;
  const std::int64_t frames = 1 + n / config.hop;
  const int bins = n_fft / 2 + 1;

  std::vector<double> window(static_cast<std::size_t>(n_fft));
  for (int i = 0; i < n_fft; ++i) {
    window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n_fft);
  }

  Spectrogram spec;
  spec.n_fft = n_fft;
  spec.hop = config.hop;
  spec.sample_rate = wave.sample_rate;
  spec.magnitudes.resize(frames, bins);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> out;
  for (std::int64_t f = 0; f < frames; ++f) {
    const std::int64_t start = f * config.hop - pad;
    for (int i = 0; i < n_fft; ++i) {
      frame[static_cast<std::size_t>(i)] =
          wave.samples[reflect_index(start + i, n)] * window[static_cast<std::size_t>(i)];
    }
    fft.fwd(out, frame);
    for (int k = 0; k < bins; ++k) spec.magnitudes(f, k) = std::abs(out[static_cast<std::size_t>(k)]);
  }
  return spec;
}

Eigen::MatrixXd mel_filterbank(int sample_rate, int n_fft, int n_mels) {
  if (n_mels <= 0) throw InvalidArgument("n_mels must be positive");
  const int bins = n_fft / 2 + 1;
  if (n_mels > bins) {
    throw InvalidArgument("n_mels (" + std::to_string(n_mels) + ") exceeds spectrogram bins (" +
                          std::to_string(bins) + ")");
  }
  const auto edges = mel_edges(sample_rate, n_mels);
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double centre = edges[static_cast<std::size_t>(m) + 1];
    const double right = edges[static_cast<std::size_t>(m) + 2];
    const double norm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double rising = (f - left) / (centre - left);
      const double falling = (right - f) / (right - centre);
      weights(m, k) = std::max(0.0, std::min(rising, falling)) * norm;
    }
  }
  return weights;
}

Eigen::VectorXd mel_filter_norms(int sample_rate, int n_mels) {
  const auto edges = mel_edges(sample_rate, n_mels);
  Eigen::VectorXd norms(n_mels);
  for (int m = 0; m < n_mels; ++m) {
    norms(m) = 2.0 / (edges[static_cast<std::size_t>(m) + 2] - edges[static_cast<std::size_t>(m)]);
  }
  return norms;
}

FeatureMatrix mel_spectrogram(const Spectrogram& spec, int n_mels) {
  check_spectrogram(spec);
  const Eigen::MatrixXd basis = mel_filterbank(spec.sample_rate, spec.n_fft, n_mels);
  return {FeatureKind::kMel, basis * spec.magnitudes.array().square().matrix().transpose()};
}

Eigen::MatrixXd power_to_db(const Eigen::MatrixXd& power) {
  Eigen::MatrixXd db = power.unaryExpr([](double p) { return 10.0 * std::log10(std::max(p, kLogFloor)); });
  if (db.size() == 0) return db;
  const double floor = db.maxCoeff() - kTopDb;
  return db.cwiseMax(floor);
}

Eigen::MatrixXd dct_basis(int n_out, int n_in) {
  Eigen::MatrixXd basis(n_out, n_in);
  for (int k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n_in) : std::sqrt(2.0 / n_in);
    for (int i = 0; i < n_in; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n_in));
    }
  }
  return basis;
}

FeatureMatrix mfcc(const FeatureMatrix& mel, int n_mfcc) {
  if (mel.kind != FeatureKind::kMel) throw InvalidArgument("mfcc expects a mel feature matrix");
  if (n_mfcc <= 0 || n_mfcc > mel.rows()) throw InvalidArgument("n_mfcc must be in [1, n_mels]");
  return {FeatureKind::kMfcc, dct_basis(n_mfcc, static_cast<int>(mel.rows())) * power_to_db(mel.values)};
}

int pitch_class(double hz) {
  if (!(hz >= kChromaMinHz)) return -1;
  const double midi = 69.0 + 12.0 * std::log2(hz / 440.0);
  const auto nearest = static_cast<long>(std::floor(midi + 0.5));
  return static_cast<int>(((nearest % 12) + 12) % 12);
}

FeatureMatrix chroma(const Spectrogram& spec) {
  check_spectrogram(spec);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(12, spec.frames());
  for (Eigen::Index k = 0; k < spec.bins(); ++k) {
    const int pc = pitch_class(spec.bin_frequency(k));
    if (pc < 0) continue;
    out.row(pc) += spec.magnitudes.col(k).array().square().matrix().transpose();
  }
  for (Eigen::Index f = 0; f < out.cols(); ++f) {
    const double peak = out.col(f).maxCoeff();
    if (peak > 0.0) out.col(f) /= peak;
  }
  return {FeatureKind::kChroma, std::move(out)};
}

FeatureMatrix spectral_contrast(const Spectrogram& spec) {
  check_spectrogram(spec);
  const Eigen::Index n_bands = kContrastOctaves + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_bands, spec.frames());

  // Band b spans [edge(b), edge(b+1)); the top band is open-ended.
  auto edge = [](Eigen::Index b) { return b == 0 ? 0.0 : kContrastFloorHz * std::pow(2.0, b - 1); };
  std::vector<double> power;
  for (Eigen::Index b = 0; b < n_bands; ++b) {
    const double lo = edge(b);
    const double hi = b + 1 < n_bands ? edge(b + 1) : INFINITY;
    Eigen::Index first = -1, count = 0;
    for (Eigen::Index k = 0; k < spec.bins(); ++k) {
      const double f = spec.bin_frequency(k);
      if (f >= lo && f < hi) {
        if (first < 0) first = k;
        ++count;
      }
    }
    if (count == 0) continue;
    // ceil(0.02 * K) without floating-point rounding.
    const Eigen::Index q = (static_cast<Eigen::Index>(kContrastQuantilePercent) * count + 99) / 100;
    power.resize(static_cast<std::size_t>(count));
    for (Eigen::Index f = 0; f < spec.frames(); ++f) {
      for (Eigen::Index i = 0; i < count; ++i) {
        const double m = spec.magnitudes(f, first + i);
        power[static_cast<std::size_t>(i)] = m * m;
      }
      std::sort(power.begin(), power.end());
      double valley = 0.0, peak = 0.0;
      for (Eigen::Index i = 0; i < q; ++i) {
        valley += power[static_cast<std::size_t>(i)];
        peak += power[static_cast<std::size_t>(count - 1 - i)];
      }
      valley /= static_cast<double>(q);
      peak /= static_cast<double>(q);
      out(b, f) = 10.0 * std::log10((peak + kLogFloor) / (valley + kLogFloor));
    }
  }
  return {FeatureKind::kContrast, std::move(out)};
}

Eigen::MatrixXd tonnetz_basis() {
  Eigen::MatrixXd basis(6, 12);
  const double pi = std::numbers::pi;
  for (int l = 0; l < 12; ++l) {
    basis(0, l) = std::sin(l * 7.0 * pi / 6.0);
    basis(1, l) = std::cos(l * 7.0 * pi / 6.0);
    basis(2, l) = std::sin(l * 3.0 * pi / 2.0);
    basis(3, l) = std::cos(l * 3.0 * pi / 2.0);
    basis(4, l) = 0.5 * std::sin(l * 2.0 * pi / 3.0);
    basis(5, l) = 0.5 * std::cos(l * 2.0 * pi / 3.0);
  }
  return basis;
}

FeatureMatrix tonnetz(const FeatureMatrix& chroma_matrix) {
  if (chroma_matrix.kind != FeatureKind::kChroma || chroma_matrix.rows() != 12) {
    throw InvalidArgument("tonnetz expects a 12-row chroma matrix");
  }
  Eigen::MatrixXd normalized = chroma_matrix.values;
  for (Eigen::Index f = 0; f < normalized.cols(); ++f) {
    const double mass = normalized.col(f).cwiseAbs().sum();
    if (mass > 0.0) normalized.col(f) /= mass;
  }
  return {FeatureKind::kTonnetz, tonnetz_basis() * normalized};
}

EmotionEncoder::EmotionEncoder(int sample_rate, StftConfig config)
    : sample_rate_(sample_rate),
      config_(config),
      mel_basis_(mel_filterbank(sample_rate, config.n_fft, 128)),
      dct_(dct_basis(40, 128)) {}

EmotionFeatures EmotionEncoder::features(const Waveform& wave) const {
  if (wave.sample_rate != sample_rate_) {
    throw InvalidArgument("waveform rate " + std::to_string(wave.sample_rate) + " != encoder rate " +
                          std::to_string(sample_rate_));
  }
  const Spectrogram spec = stft(wave, config_);
  EmotionFeatures out;
  out.mel = {FeatureKind::kMel, mel_basis_ * spec.magnitudes.array().square().matrix().transpose()};
  out.mfcc = {FeatureKind::kMfcc, dct_ * power_to_db(out.mel.values)};
  out.chroma = chroma(spec);
  out.contrast = spectral_contrast(spec);
  out.tonnetz = tonnetz(out.chroma);
  return out;
}

EmotionVector EmotionEncoder::encode(const Waveform& wave) const {
  const EmotionFeatures f =
      features(wave.sample_rate == sample_rate_ ? wave : resample(wave, sample_rate_));
  EmotionVector v;
  v.values.resize(kEmotionDim);
  Eigen::Index offset = 0;
  for (const FeatureMatrix* m : {&f.mfcc, &f.chroma, &f.mel, &f.contrast, &f.tonnetz}) {
    const Eigen::VectorXd pooled = m->mean_pool();
    v.values.segment(offset, pooled.size()) = pooled;
    offset += pooled.size();
  }
  if (!v.values.allFinite()) throw Error("emotion vector contains non-finite values");
  return v;
}

EmotionVector emotion_vector(const Waveform& wave) { return EmotionEncoder().encode(wave); }

}  // namespace abusekit::dsp
