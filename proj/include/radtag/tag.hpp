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

#include <optional>
#include <string>
#include <vector>

#include "radtag/codes.hpp"
#include "radtag/radar.hpp"
#include "radtag/types.hpp"

namespace radtag {

enum class Scheme { spread_spectrum, in_chirp_square, inter_chirp_fm };

// physical: true ON/OFF with all harmonics. fundamental: 0.5 + (2/pi) c(t) sin(2 pi f_m t).
enum class TagWaveform { physical, fundamental };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(TagWaveform w);
TagWaveform waveform_from_string(const std::string& s);

struct TagSpec {
    int tag_id = 0;
    Scheme scheme = Scheme::spread_spectrum;
    double f_m = 250e3;
    double f_mod = 400.0;
    std::optional<double> code_phase;  // chips; unset draws a random offset per frame
    double range_m = 5.0;
    double angle_deg = 0.0;
    double velocity = 0.0;  // radial, positive approaching
    double rcs_dbsm = -8.0;
    std::optional<double> snr_db;          // overrides the link budget
    std::optional<double> off_leakage_db;  // unset = OFF absorbs fully

    void validate(int code_length) const;
};

// Instantaneous ON state of a chip-coded tag at absolute time t.
double modulation_at(const TagSpec& tag, const GoldCodebook& book, double t, double code_phase,
                     TagWaveform model = TagWaveform::physical);

// ON/OFF state in {0,1} (or the fundamental-harmonic model) sampled on t_grid.
// code_phase here is explicit; the codebook supplies the chips of tag.tag_id.
Vector<double> modulation_waveform(const TagSpec& tag, const GoldCodebook& book, const Vector<double>& t_grid,
                                   double code_phase, TagWaveform model = TagWaveform::physical);

// Bipolar c(t) * sq(f_m t), sq = +1 on the first half of each chip.
Vector<double> bipolar_baseband(const TagSpec& tag, const GoldCodebook& book, const Vector<double>& t_grid,
                                double code_phase, TagWaveform model = TagWaveform::physical);

// 50% duty square wave, ON during the first half period. A non-null warnings
// sink receives a note when f_mod reaches doppler_limit instead of throwing.
Vector<double> fm_baseline_waveform(double f_mod, const Vector<double>& t_grid,
                                    double doppler_limit = 0.0, std::vector<std::string>* warnings = nullptr);

enum class ConstraintStatus { pass, boundary, violation };
std::string to_string(ConstraintStatus s);

struct ConstraintReport {
    ConstraintStatus timing = ConstraintStatus::pass;
    ConstraintStatus bandwidth = ConstraintStatus::pass;
    double timing_min_fm = 0;     // k N / T_c
    double bandwidth_max_fm = 0;  // fs / 4
    double repetitions = 0;       // T_c f_m / N
    double samples_per_chip = 0;  // fs / f_m

    bool ok() const { return timing != ConstraintStatus::violation && bandwidth != ConstraintStatus::violation; }
};

ConstraintReport check_modulation_constraints(double f_m, int n_chips, int k, const RadarConfig& cfg);

}  // namespace radtag
