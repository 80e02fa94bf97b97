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

#include "radtag/tag.hpp"

#include <cmath>
#include <stdexcept>

namespace radtag {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::spread_spectrum: return "spread-spectrum";
        case Scheme::in_chirp_square: return "in-chirp-square";
        case Scheme::inter_chirp_fm: return "inter-chirp-fm";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "spread-spectrum") return Scheme::spread_spectrum;
    if (s == "in-chirp-square") return Scheme::in_chirp_square;
    if (s == "inter-chirp-fm") return Scheme::inter_chirp_fm;
    throw std::invalid_argument("unknown scheme: " + s);
}

std::string to_string(TagWaveform w) { return w == TagWaveform::physical ? "physical" : "fundamental"; }

TagWaveform waveform_from_string(const std::string& s) {
    if (s == "physical") return TagWaveform::physical;
    if (s == "fundamental") return TagWaveform::fundamental;
    throw std::invalid_argument("unknown waveform model: " + s);
}

std::string to_string(ConstraintStatus s) {
    switch (s) {
        case ConstraintStatus::pass: return "pass";
        case ConstraintStatus::boundary: return "boundary";
        case ConstraintStatus::violation: return "violation";
    }
    return "?";
}

void TagSpec::validate(int code_length) const {
    if (scheme != Scheme::inter_chirp_fm && !(f_m > 0)) throw std::invalid_argument("tag: f_m must be positive");
    if (scheme == Scheme::inter_chirp_fm && !(f_mod > 0)) throw std::invalid_argument("tag: f_mod must be positive");
    if (code_phase && (*code_phase < 0 || *code_phase >= code_length))
        throw std::invalid_argument("tag: code_phase outside [0, N)");
    if (!std::isfinite(rcs_dbsm)) throw std::invalid_argument("tag: rcs must be finite");
    if (!(std::abs(angle_deg) < 90)) throw std::invalid_argument("tag: |angle| must be < 90");
    if (!(range_m >= 0)) throw std::invalid_argument("tag: negative range");
}

namespace {

// Signed chip-times-square value at one instant, plus the fundamental alternative.
double bipolar_at(const BitSequence& code, bool constant_code, double u, TagWaveform model) {
    const double fl = std::floor(u);
    const double frac = u - fl;
    const int n = static_cast<int>(code.size());
    long chip = static_cast<long>(fl) % n;
    if (chip < 0) chip += n;
    const double c = (constant_code || code[static_cast<size_t>(chip)]) ? 1.0 : -1.0;
    if (model == TagWaveform::fundamental) return c * (4.0 / kPi) * std::sin(2.0 * kPi * frac);
    return c * (frac < 0.5 ? 1.0 : -1.0);
}

}  // namespace

Vector<double> bipolar_baseband(const TagSpec& tag, const GoldCodebook& book, const Vector<double>& t_grid,
                                double code_phase, TagWaveform model) {
    if (t_grid.size() == 0) throw std::invalid_argument("modulation_waveform: empty time grid");
    if (tag.scheme == Scheme::inter_chirp_fm) throw std::invalid_argument("modulation_waveform: FM tag has no chip code");
    const bool constant = tag.scheme == Scheme::in_chirp_square;
    static const BitSequence ones(1, 1);
    const BitSequence& code = constant ? ones : book[tag.tag_id];
    Vector<double> out(t_grid.size());
    for (Eigen::Index i = 0; i < t_grid.size(); ++i)
        out[i] = bipolar_at(code, constant, t_grid[i] * tag.f_m + code_phase, model);
    return out;
}

double modulation_at(const TagSpec& tag, const GoldCodebook& book, double t, double code_phase, TagWaveform model) {
    const bool constant = tag.scheme == Scheme::in_chirp_square;
    const BitSequence& code = book[constant ? 0 : tag.tag_id];
    return 0.5 + 0.5 * bipolar_at(code, constant, t * tag.f_m + code_phase, model);
}

Vector<double> modulation_waveform(const TagSpec& tag, const GoldCodebook& book, const Vector<double>& t_grid,
                                   double code_phase, TagWaveform model) {
    Vector<double> b = bipolar_baseband(tag, book, t_grid, code_phase, model);
    return (0.5 + 0.5 * b.array()).matrix();
}

Vector<double> fm_baseline_waveform(double f_mod, const Vector<double>& t_grid, double doppler_limit,
                                    std::vector<std::string>* warnings) {
    if (!(f_mod > 0)) throw std::invalid_argument("fm_baseline_waveform: f_mod must be positive");
    if (t_grid.size() == 0) throw std::invalid_argument("fm_baseline_waveform: empty time grid");
    if (doppler_limit > 0 && f_mod >= doppler_limit) {
        std::string msg = "fm_baseline_waveform: f_mod at or beyond the doppler bandwidth";
        if (!warnings) throw std::domain_error(msg);
        warnings->push_back(msg);
    }
    Vector<double> out(t_grid.size());
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
        double u = t_grid[i] * f_mod;
        out[i] = (u - std::floor(u)) < 0.5 ? 1.0 : 0.0;
    }
    return out;
}

ConstraintReport check_modulation_constraints(double f_m, int n_chips, int k, const RadarConfig& cfg) {
    ConstraintReport r;
    r.timing_min_fm = static_cast<double>(k) * n_chips / cfg.t_chirp;
    r.bandwidth_max_fm = cfg.fs / 4.0;
    r.repetitions = cfg.t_chirp * f_m / n_chips;
    r.samples_per_chip = cfg.fs / f_m;
    auto classify = [](double margin, double scale) {
        const double tol = 1e-9 * scale;
        if (std::abs(margin) <= tol) return ConstraintStatus::boundary;
        return margin > 0 ? ConstraintStatus::pass : ConstraintStatus::violation;
    };
    r.timing = classify(f_m - r.timing_min_fm, r.timing_min_fm);
    r.bandwidth = classify(r.bandwidth_max_fm - f_m, r.bandwidth_max_fm);
    return r;
}

}  // namespace radtag
