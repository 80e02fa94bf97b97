// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radtag/codes.hpp"
#include "radtag/iq_frame.hpp"
#include "radtag/radar.hpp"
#include "radtag/tag.hpp"

namespace radtag {

struct ClutterObject {
    double range_m = 10.0;
    double angle_deg = 0.0;
    double velocity = 0.0;
    double rcs_dbsm = 10.0;
    std::optional<double> snr_db;

    void validate() const;
};

// real: A m(t) cos(theta), both spectral copies present.
// analytic: (A/2) m(t) e^{+j theta}. image: (A/2) m(t) e^{-j theta}.
enum class ToneModel { real, analytic, image };
std::string to_string(ToneModel t);
ToneModel tone_from_string(const std::string& s);

struct Scene {
    std::vector<TagSpec> tags;
    std::vector<ClutterObject> clutter;
    bool noise_enabled = true;
    std::uint64_t rng_seed = 0;
    TagWaveform waveform = TagWaveform::physical;
    ToneModel tone = ToneModel::real;
    // tag RCS is flat inside +-fov_half_deg and tapers linearly in dB beyond
    double fov_half_deg = 65.0;
    double fov_taper_db_per_deg = 1.0;
};

struct SimTruth {
    std::vector<double> code_phase;  // chips, per tag
};

double thermal_noise_power(const RadarConfig& cfg);

// Per-sample SNR in dB of a monostatic return, noise bandwidth fs.
double snr_at_range(double range_m, double rcs_dbsm, const RadarConfig& cfg);

double tag_rcs_at_angle(const TagSpec& tag, const Scene& scene);

double scatterer_snr_db(const TagSpec& tag, const Scene& scene, const RadarConfig& cfg);
double scatterer_snr_db(const ClutterObject& obj, const RadarConfig& cfg);

const GoldCodebook& default_codebook();

// Samples are scaled so complex noise has unit power per sample.
IQFrameD simulate_frame(const Scene& scene, const RadarConfig& cfg, int n_chirps, std::uint64_t seed,
                        const GoldCodebook& book = default_codebook(), SimTruth* truth = nullptr);

}  // namespace radtag
