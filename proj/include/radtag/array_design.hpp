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

#include <string>
#include <vector>

#include "radtag/radar.hpp"

namespace radtag {

struct ArrayDesign {
    int n_pairs = 3;
    int n_elements = 8;
    double spacing = 0.5;  // wavelengths
    double trace_loss_db_per_wl = 0.0;
    // single pair, single element; puts the lossless Np=3, Ne=8 design at -8 dBsm
    double base_rcs_dbsm = -35.6042;

    void validate() const;
};

// 0.886 lambda / (2 Ne d), degrees; lambda only fixes the unit of d.
double vertical_beamwidth(const ArrayDesign& design, double lambda_m = 1.0);
double element_gain_boost(int n_elements);
double pair_gain_ideal(int n_pairs);
// Coherent amplitude sum of pairs with trace lengths 0, lambda, ..., (Np-1) lambda.
double pair_gain_lossy(int n_pairs, double alpha_db_per_wl);

// Range at which snr_at_range + processing gain equals detection_snr_db.
double max_range(double rcs_dbsm, const RadarConfig& cfg, double processing_gain_db, double detection_snr_db);

// detection SNR that puts max_range at anchor_m with no processing gain
double calibrate_detection_snr(double rcs_dbsm, const RadarConfig& cfg, double anchor_m);

double required_fov(double height_m, double distance_m);

struct ArraySweepRow {
    int n_pairs;
    int n_elements;
    double alpha;
    double beamwidth_deg;
    double element_gain_db;
    double pair_gain_ideal_db;
    double pair_gain_lossy_db;
    double range_m;
};

// Range per row uses base_rcs plus element and lossy pair gains against the calibrated detection SNR.
std::vector<ArraySweepRow> array_sweep(const std::vector<int>& pairs, const std::vector<int>& elements,
                                       const std::vector<double>& alphas, const ArrayDesign& base, const RadarConfig& cfg,
                                       double detection_snr_db);

std::string array_sweep_csv(const std::vector<ArraySweepRow>& rows);

}  // namespace radtag
