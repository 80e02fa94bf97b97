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

#include "radtag/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace radtag {

std::string to_string(ToneModel t) {
    switch (t) {
        case ToneModel::real: return "real";
        case ToneModel::analytic: return "analytic";
        case ToneModel::image: return "image";
    }
    return "?";
}

ToneModel tone_from_string(const std::string& s) {
    if (s == "real") return ToneModel::real;
    if (s == "analytic") return ToneModel::analytic;
    if (s == "image") return ToneModel::image;
    throw std::invalid_argument("unknown tone model: " + s);
}

void ClutterObject::validate() const {
    if (!(range_m > 0)) throw std::invalid_argument("clutter: range must be positive");
    if (!std::isfinite(angle_deg) || !std::isfinite(velocity) || !std::isfinite(rcs_dbsm))
        throw std::invalid_argument("clutter: non-finite field");
}

double thermal_noise_power(const RadarConfig& cfg) { return -174.0 + 10.0 * std::log10(cfg.fs) + cfg.nf_db; }

double snr_at_range(double range_m, double rcs_dbsm, const RadarConfig& cfg) {
    if (!(range_m > 0)) throw std::domain_error("snr_at_range: range must be positive");
    const double lambda = cfg.wavelength();
    const double pr = cfg.pt_dbm + 2.0 * cfg.gain_dbi + 20.0 * std::log10(lambda) + rcs_dbsm -
                      30.0 * std::log10(4.0 * kPi) - 40.0 * std::log10(range_m);
    return pr - thermal_noise_power(cfg);
}

double tag_rcs_at_angle(const TagSpec& tag, const Scene& scene) {
    const double excess = std::abs(tag.angle_deg) - scene.fov_half_deg;
    return excess > 0 ? tag.rcs_dbsm - scene.fov_taper_db_per_deg * excess : tag.rcs_dbsm;
}

double scatterer_snr_db(const TagSpec& tag, const Scene& scene, const RadarConfig& cfg) {
    if (tag.snr_db) return *tag.snr_db;
    return snr_at_range(tag.range_m, tag_rcs_at_angle(tag, scene), cfg) + cfg.system_gain_db;
}

double scatterer_snr_db(const ClutterObject& obj, const RadarConfig& cfg) {
    if (obj.snr_db) return *obj.snr_db;
    return snr_at_range(obj.range_m, obj.rcs_dbsm, cfg) + cfg.system_gain_db;
}

const GoldCodebook& default_codebook() {
    static const GoldCodebook book = generate_gold_codebook(5);
    return book;
}

namespace {

struct Scatterer {
    double amp;
    double beat_hz;  // intra-chirp frequency incl. doppler
    double doppler_hz;
    double phase0;
    double sin_theta;
};

Scatterer make_scatterer(double range_m, double angle_deg, double velocity, double snr_db, const RadarConfig& cfg) {
    Scatterer s;
    s.amp = std::sqrt(2.0 * db_to_power(snr_db));
    s.doppler_hz = doppler_shift(velocity, cfg);
    s.beat_hz = beat_frequency(range_m, cfg) + s.doppler_hz;
    // round-trip carrier phase 4 pi R / lambda
    s.phase0 = 2.0 * kPi * std::fmod(2.0 * range_m / cfg.wavelength(), 1.0);
    s.sin_theta = std::sin(angle_deg * kPi / 180.0);
    return s;
}

// Adds gate(n) * tone into every antenna/chirp of frame; gate is a callback over absolute time.
template <typename Gate>
void add_tone(IQFrameD& frame, const Scatterer& s, ToneModel tone, const RadarConfig& cfg, Gate&& gate) {
    const int L = frame.n_chirps(), Ns = frame.n_samples();
    for (int c = 0; c < L; ++c) {
        const double t0 = c * cfg.t_rep();
        const double chirp_phase = 2.0 * kPi * std::fmod(s.doppler_hz * t0, 1.0);
        for (int n = 0; n < Ns; ++n) {
            const double g = gate(t0 + n / cfg.fs);
            if (g == 0.0) continue;
            const double base = 2.0 * kPi * s.beat_hz * (n / cfg.fs) + s.phase0 + chirp_phase;
            for (int q = 0; q < frame.n_rx(); ++q) {
                const double th = base + 2.0 * kPi * q * cfg.rx_spacing * s.sin_theta;
                std::complex<double> v;
                switch (tone) {
                    case ToneModel::real: v = {s.amp * std::cos(th), 0.0}; break;
                    case ToneModel::analytic: v = 0.5 * s.amp * std::polar(1.0, th); break;
                    case ToneModel::image: v = 0.5 * s.amp * std::polar(1.0, -th); break;
                }
                frame.rx[q](c, n) += g * v;
            }
        }
    }
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

IQFrameD simulate_frame(const Scene& scene, const RadarConfig& cfg, int n_chirps, std::uint64_t seed,
                        const GoldCodebook& book, SimTruth* truth) {
    cfg.validate();
    if (n_chirps < 1) throw std::invalid_argument("simulate_frame: n_chirps must be >= 1");
    IQFrameD frame(cfg, n_chirps);
    std::mt19937_64 rng(splitmix(seed));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int N = book.length();

    if (truth) truth->code_phase.clear();
    for (const TagSpec& tag : scene.tags) {
        tag.validate(N);
        if (tag.scheme == Scheme::spread_spectrum && (tag.tag_id < 0 || tag.tag_id >= book.size()))
            throw std::invalid_argument("simulate_frame: tag_id outside codebook");
        const double phase = tag.code_phase ? *tag.code_phase : uni(rng) * N;
        if (truth) truth->code_phase.push_back(phase);

        const double leak = tag.off_leakage_db ? std::pow(10.0, *tag.off_leakage_db / 20.0) : 0.0;
        const Scatterer s = make_scatterer(tag.range_m, tag.angle_deg, tag.velocity, scatterer_snr_db(tag, scene, cfg), cfg);

        if (tag.scheme == Scheme::inter_chirp_fm) {
            const double lim = max_unambiguous_doppler(cfg);
            if (tag.f_mod >= lim) frame.warnings.push_back("tag " + std::to_string(tag.tag_id) + ": f_mod beyond doppler bandwidth");
            add_tone(frame, s, scene.tone, cfg, [&](double t) {
                double u = t * tag.f_mod;
                double on = (u - std::floor(u)) < 0.5 ? 1.0 : 0.0;
                return on + (1.0 - on) * leak;
            });
            continue;
        }

        const int k = static_cast<int>(std::floor(cfg.t_chirp * tag.f_m / N + 1e-9));
        const ConstraintReport rep = check_modulation_constraints(tag.f_m, N, std::max(k, 1), cfg);
        if (!rep.ok()) frame.warnings.push_back("tag " + std::to_string(tag.tag_id) + ": modulation constraint violated");

        add_tone(frame, s, scene.tone, cfg, [&](double t) {
            const double on = modulation_at(tag, book, t, phase, scene.waveform);
            return on + (1.0 - on) * leak;
        });
    }

    for (const ClutterObject& obj : scene.clutter) {
        obj.validate();
        const Scatterer s = make_scatterer(obj.range_m, obj.angle_deg, obj.velocity, scatterer_snr_db(obj, cfg), cfg);
        add_tone(frame, s, scene.tone, cfg, [](double) { return 1.0; });
    }

    if (scene.noise_enabled) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        for (int q = 0; q < frame.n_rx(); ++q) {
            std::mt19937_64 eng(splitmix(seed ^ splitmix(0xA5A5ull + static_cast<std::uint64_t>(q))));
            auto& m = frame.rx[q];
            for (Eigen::Index c = 0; c < m.rows(); ++c)
                for (Eigen::Index n = 0; n < m.cols(); ++n) {
                    const double re = gauss(eng);
                    const double im = gauss(eng);
                    m(c, n) += std::complex<double>(re, im);
                }
        }
    }
    return frame;
}

}  // namespace radtag
