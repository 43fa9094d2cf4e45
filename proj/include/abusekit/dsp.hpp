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


#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "abusekit/dataset.hpp"

namespace abusekit::dsp {

struct StftConfig {
  int n_fft = 2048;
  int hop = 512;
};

/// Magnitude STFT, one row per frame. bins = n_fft / 2 + 1.
struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // frames x bins
  int n_fft = 2048;
  int hop = 512;
  int sample_rate = kAnalysisSampleRate;

  Eigen::Index frames() const { return magnitudes.rows(); }
  Eigen::Index bins() const { return magnitudes.cols(); }
  /// Centre frequency in Hz of FFT bin `k`.
  double bin_frequency(Eigen::Index k) const { return static_cast<double>(k) * sample_rate / n_fft; }
};

enum class FeatureKind { kMfcc, kChroma, kMel, kContrast, kTonnetz };

std::string_view to_string(FeatureKind kind);
/// Row count each feature kind must have: 40, 12, 128, 7, 6.
Eigen::Index expected_rows(FeatureKind kind);

/// Per-frame feature columns: coeffs x frames.
struct FeatureMatrix {
  FeatureKind kind = FeatureKind::kMel;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
  /// Temporal mean over frames.
  Eigen::VectorXd mean_pool() const;
};

inline constexpr int kEmotionDim = 193;

/// [mfcc(40) | chroma(12) | mel(128) | contrast(7) | tonnetz(6)], each mean-pooled.
struct EmotionVector {
  Eigen::VectorXd values;
};

/// Centred frames with reflect padding of n_fft/2 on both ends, periodic
/// Hann window. frames = 1 + len / hop. Throws when n_fft is not a power of two.
Spectrogram stft(const Waveform& wave, const StftConfig& config = {});

/// Slaney-scale triangular filters (fmin 0, fmax sr/2), area-normalized.
/// Shape n_mels x (n_fft/2 + 1).
Eigen::MatrixXd mel_filterbank(int sample_rate, int n_fft, int n_mels = 128);
/// Normalization weight 2 / (f[i+2] - f[i]) applied to filter i.
Eigen::VectorXd mel_filter_norms(int sample_rate, int n_mels = 128);

FeatureMatrix mel_spectrogram(const Spectrogram& spec, int n_mels = 128);
FeatureMatrix mfcc(const FeatureMatrix& mel, int n_mfcc = 40);
FeatureMatrix chroma(const Spectrogram& spec);
FeatureMatrix spectral_contrast(const Spectrogram& spec);
FeatureMatrix tonnetz(const FeatureMatrix& chroma);

/// Power in dB with a 1e-10 floor, clipped to 80 dB below the global max.
Eigen::MatrixXd power_to_db(const Eigen::MatrixXd& power);
/// Orthonormal DCT-II basis, n_out x n_in.
Eigen::MatrixXd dct_basis(int n_out, int n_in);
/// 6 x 12 tonal centroid basis (fifths, minor thirds, major thirds).
Eigen::MatrixXd tonnetz_basis();
/// Nearest pitch class (C = 0) of a frequency; -1 below 27.5 Hz.
int pitch_class(double hz);

struct EmotionFeatures {
  FeatureMatrix mfcc;
  FeatureMatrix chroma;
  FeatureMatrix mel;
  FeatureMatrix contrast;
  FeatureMatrix tonnetz;
};

/// Precomputes the mel filterbank and DCT basis once; const methods are safe
/// to call concurrently.
class EmotionEncoder {
 public:
  explicit EmotionEncoder(int sample_rate = kAnalysisSampleRate, StftConfig config = {});

  /// Input must already be at the encoder's sample rate.
  EmotionFeatures features(const Waveform& wave) const;
  /// Resamples to the encoder's rate when needed, then pools and concatenates.
  EmotionVector encode(const Waveform& wave) const;

  int sample_rate() const { return sample_rate_; }

 private:
  int sample_rate_;
  StftConfig config_;
  Eigen::MatrixXd mel_basis_;
  Eigen::MatrixXd dct_;
};

EmotionVector emotion_vector(const Waveform& wave);

}  // namespace abusekit::dsp
