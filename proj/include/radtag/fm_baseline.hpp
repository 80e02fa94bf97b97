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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "radtag/iq_frame.hpp"
#include "radtag/spectral.hpp"
#include "radtag/tag.hpp"

namespace radtag {

struct FmTemplate {
    double f_mod = 0;
    Vector<double> magnitude;  // unit energy, DC bin zero
};

// Magnitude doppler spectra of a 50% duty ON/OFF pattern sampled once per chirp.
inline std::vector<FmTemplate> fm_template_bank(const std::vector<double>& freqs, int n_chirps, const RadarConfig& cfg) {
    if (n_chirps < 2) throw std::invalid_argument("fm_template_bank: needs >= 2 chirps");
    const double lim = max_unambiguous_doppler(cfg);
    Vector<double> t(n_chirps);
    for (int c = 0; c < n_chirps; ++c) t[c] = c * cfg.t_rep() + 0.5 * cfg.t_chirp;
    std::vector<FmTemplate> bank;
    for (double f : freqs) {
        if (!(f > 0) || f >= lim) throw std::domain_error("fm_template_bank: frequency outside the doppler band");
        Vector<double> on = fm_baseline_waveform(f, t);
        CVector<double> x = (on.array() - on.mean()).matrix().cast<std::complex<double>>();
        Vector<double> mag = fft(x).cwiseAbs();
        mag[0] = 0;
        const double n = mag.norm();
        if (n > 0) mag /= n;
        bank.push_back({f, mag});
    }
    return bank;
}

struct FmDetection {
    int template_index = -1;
    double f_mod = 0;
    int range_bin = 0;
    double score = 0;
    double ptn_db = 0;
};

// Magnitude range-doppler map summed non-coherently over antennas; rows are
// range bins up to Ns/2.
template <typename Scalar>
Matrix<double> rd_magnitude(const IQFrame<Scalar>& frame) {
    const int half = frame.n_samples() / 2;
    Matrix<double> mag = Matrix<double>::Zero(half, frame.n_chirps());
    for (int q = 0; q < frame.n_rx(); ++q) {
        const CMatrix<Scalar> rd = range_doppler_map(frame, q);
        mag += rd.topRows(half).cwiseAbs().template cast<double>();
    }
    return mag;
}

struct FmMatch {
    Matrix<double> scores;  // [range bin][template]
    Vector<double> floor;   // per template, median over range bins
};

inline FmMatch fm_scores(const Matrix<double>& rd_mag, const std::vector<FmTemplate>& bank) {
    FmMatch m;
    m.scores = Matrix<double>::Zero(rd_mag.rows(), static_cast<Eigen::Index>(bank.size()));
    m.floor = Vector<double>::Zero(static_cast<Eigen::Index>(bank.size()));
    for (size_t i = 0; i < bank.size(); ++i) {
        if (bank[i].magnitude.size() != rd_mag.cols()) throw std::invalid_argument("fm_template_match: template length mismatch");
        m.scores.col(static_cast<Eigen::Index>(i)) = rd_mag * bank[i].magnitude;
        std::vector<double> col(m.scores.rows());
        for (Eigen::Index b = 0; b < m.scores.rows(); ++b) col[b] = m.scores(b, static_cast<Eigen::Index>(i));
        auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
        std::nth_element(col.begin(), mid, col.end());
        m.floor[static_cast<Eigen::Index>(i)] = *mid;
    }
    return m;
}

// Per template, the best range bin whose score over the median floor reaches threshold_db.
inline std::vector<FmDetection> fm_template_match(const Matrix<double>& rd_mag, const std::vector<FmTemplate>& bank,
                                                  double threshold_db) {
    if (rd_mag.cols() < 2) throw std::invalid_argument("fm_template_match: needs >= 2 chirps");
    const FmMatch m = fm_scores(rd_mag, bank);
    std::vector<FmDetection> out;
    for (size_t i = 0; i < bank.size(); ++i) {
        Eigen::Index b = 0;
        const double s = m.scores.col(static_cast<Eigen::Index>(i)).maxCoeff(&b);
        const double fl = m.floor[static_cast<Eigen::Index>(i)];
        const double ptn = fl > 0 ? 20.0 * std::log10(s / fl) : (s > 0 ? 1e9 : -1e9);
        if (ptn >= threshold_db) out.push_back({static_cast<int>(i), bank[i].f_mod, static_cast<int>(b), s, ptn});
    }
    std::stable_sort(out.begin(), out.end(), [](const FmDetection& a, const FmDetection& b) { return a.ptn_db > b.ptn_db; });
    return out;
}

inline std::vector<double> default_fm_frequencies() { return {200.0, 300.0, 400.0, 500.0, 600.0}; }

}  // namespace radtag
