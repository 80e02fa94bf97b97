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
#include <string>
#include <vector>

#include "radtag/decoder.hpp"
#include "radtag/io.hpp"
#include "radtag/radar.hpp"
#include "radtag/scene.hpp"

namespace radtag {

// Sweep variables: range (m), angle (deg), speed (km/h, radial), snr (dB per
// sample), threshold (dB), L (chirps).
struct ExperimentSpec {
    Scene scene;
    RadarConfig radar;
    std::string variable = "range";
    std::vector<double> grid;
    int trials = 100;
    std::uint64_t base_seed = 1;
    int chirps = 64;
    double threshold_db = 12.0;
    int target = 0;  // index into scene.tags
    DecoderOptions decoder;

    void validate() const;
};

ExperimentSpec experiment_from_json(const Json& j);

struct SweepRow {
    double value = 0;
    double detection_rate = 0;
    double mean_range_error_m = 0;
    double mean_angle_error_deg = 0;
    int trials = 0;
};

std::vector<SweepRow> run_detection_sweep(const ExperimentSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct RocSpec {
    Scene present;
    Scene absent;
    RadarConfig radar;
    int chirps = 64;
    int trials = 100;
    std::uint64_t base_seed = 1;
    DecoderOptions decoder;
};

RocSpec roc_from_json(const Json& j);

struct RocPoint {
    double threshold_db;
    double tpr;
    double fpr;
};

struct RocResult {
    std::vector<RocPoint> points;
    double auc = 0.5;
    std::vector<double> positives;  // per present code per trial: best peak-to-noise
    std::vector<double> negatives;
    std::vector<std::string> warnings;
};

// Threshold sweep over the pooled statistics, trapezoidal AUC.
RocResult roc_from_scores(const std::vector<double>& positives, const std::vector<double>& negatives);
RocResult run_roc(const RocSpec& spec);
std::string roc_csv(const RocResult& r);

struct BaselineSpec {
    Scene scene;  // one spread-spectrum tag (first tag) plus clutter
    RadarConfig radar;
    std::vector<double> speeds_kmh{0.0, 5.0, 10.0, 15.0, 20.0};
    double fm_f_mod = 400.0;
    std::vector<double> fm_freqs{200.0, 300.0, 400.0, 500.0, 600.0};
    double fm_threshold_db = 6.0;
    int chirps = 64;
    int trials = 50;
    std::uint64_t base_seed = 1;
    DecoderOptions decoder;
};

BaselineSpec baseline_from_json(const Json& j);

struct BaselineRow {
    double speed_kmh;
    double clutter_doppler_hz;
    double cdm_rate;
    double fm_rate;
    int trials;
};

// Clutter velocity is set to each speed on every clutter object; the CDM run
// sees the spread-spectrum tag, the FM run the same tag switched at fm_f_mod.
std::vector<BaselineRow> run_baseline_comparison(const BaselineSpec& spec);
std::string baseline_csv(const std::vector<BaselineRow>& rows);

struct LocalizationSpec {
    Scene scene;  // first tag is repositioned each trial
    RadarConfig radar;
    double range_min = 2.0, range_max = 25.0;
    double angle_max_deg = 60.0;
    int chirps = 64;
    int trials = 100;
    std::uint64_t base_seed = 1;
    DecoderOptions decoder;
};

struct LocalizationResult {
    std::vector<double> range_errors;
    std::vector<double> angle_errors;
    int detected = 0;
    int trials = 0;
    double median_range_error = 0;
    double median_angle_error = 0;
};

LocalizationResult run_localization(const LocalizationSpec& spec);

// Median peak-to-noise of the tag's code at L_lo and L_hi over paired trials.
struct GainResult {
    std::vector<double> ptn_lo, ptn_hi;
    double median_lo = 0, median_hi = 0, gain_db = 0;
};

GainResult run_processing_gain(const Scene& scene, const RadarConfig& cfg, int L_lo, int L_hi, int trials,
                               std::uint64_t base_seed, const DecoderOptions& opt = {});

// Best peak-to-noise of one code over all hypotheses.
double code_statistic(const CorrelationMatrix& cm, int code_id);

double median(std::vector<double> v);

}  // namespace radtag
