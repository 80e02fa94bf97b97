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

#include "radtag/array_design.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "radtag/scene.hpp"

namespace radtag {

void ArrayDesign::validate() const {
    if (n_pairs < 1) throw std::invalid_argument("array: n_pairs must be >= 1");
    if (n_elements < 1) throw std::invalid_argument("array: n_elements must be >= 1");
    if (!(spacing > 0)) throw std::invalid_argument("array: spacing must be positive");
    if (!(trace_loss_db_per_wl >= 0)) throw std::invalid_argument("array: trace loss must be >= 0");
}

double vertical_beamwidth(const ArrayDesign& design, double /*lambda_m*/) {
    design.validate();
    return 0.886 / (2.0 * design.n_elements * design.spacing) * 180.0 / kPi;
}

double element_gain_boost(int n_elements) {
    if (n_elements < 1) throw std::invalid_argument("element_gain_boost: Ne must be >= 1");
    return 20.0 * std::log10(static_cast<double>(n_elements));
}

double pair_gain_ideal(int n_pairs) {
    if (n_pairs < 1) throw std::invalid_argument("pair_gain_ideal: Np must be >= 1");
    return 20.0 * std::log10(static_cast<double>(n_pairs));
}

double pair_gain_lossy(int n_pairs, double alpha_db_per_wl) {
    if (n_pairs < 1) throw std::invalid_argument("pair_gain_lossy: Np must be >= 1");
    if (!(alpha_db_per_wl >= 0)) throw std::invalid_argument("pair_gain_lossy: alpha must be >= 0");
    double amp = 0;
    for (int i = 0; i < n_pairs; ++i) amp += std::pow(10.0, -alpha_db_per_wl * i / 20.0);
    return 20.0 * std::log10(amp);
}

double max_range(double rcs_dbsm, const RadarConfig& cfg, double processing_gain_db, double detection_snr_db) {
    // snr_at_range(1 m) - 40 log10(d) + gain = detection_snr
    const double at_1m = snr_at_range(1.0, rcs_dbsm, cfg);
    const double excess = at_1m + processing_gain_db - detection_snr_db;
    if (!std::isfinite(excess)) throw std::domain_error("max_range: no positive solution");
    return std::pow(10.0, excess / 40.0);
}

double calibrate_detection_snr(double rcs_dbsm, const RadarConfig& cfg, double anchor_m) {
    return snr_at_range(anchor_m, rcs_dbsm, cfg);
}

double required_fov(double height_m, double distance_m) {
    if (!(distance_m > 0)) throw std::domain_error("required_fov: distance must be positive");
    return std::atan(height_m / distance_m) * 180.0 / kPi;
}

std::vector<ArraySweepRow> array_sweep(const std::vector<int>& pairs, const std::vector<int>& elements,
                                       const std::vector<double>& alphas, const ArrayDesign& base, const RadarConfig& cfg,
                                       double detection_snr_db) {
    std::vector<ArraySweepRow> rows;
    // base_rcs refers to the single-pair, single-element tag
    for (double a : alphas)
        for (int ne : elements)
            for (int np : pairs) {
                ArrayDesign d = base;
                d.n_pairs = np;
                d.n_elements = ne;
                d.trace_loss_db_per_wl = a;
                ArraySweepRow r;
                r.n_pairs = np;
                r.n_elements = ne;
                r.alpha = a;
                r.beamwidth_deg = vertical_beamwidth(d);
                r.element_gain_db = element_gain_boost(ne);
                r.pair_gain_ideal_db = pair_gain_ideal(np);
                r.pair_gain_lossy_db = pair_gain_lossy(np, a);
                r.range_m = max_range(base.base_rcs_dbsm + r.element_gain_db + r.pair_gain_lossy_db, cfg, 0.0, detection_snr_db);
                rows.push_back(r);
            }
    return rows;
}

std::string array_sweep_csv(const std::vector<ArraySweepRow>& rows) {
    std::string out = "n_pairs,n_elements,alpha_db_per_wl,beamwidth_deg,element_gain_db,pair_gain_ideal_db,pair_gain_lossy_db,range_m\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.n_pairs, r.n_elements, r.alpha,
                      r.beamwidth_deg, r.element_gain_db, r.pair_gain_ideal_db, r.pair_gain_lossy_db, r.range_m);
        out += buf;
    }
    return out;
}

}  // namespace radtag
