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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "radtag/radar.hpp"
#include "radtag/scene.hpp"
#include "radtag/spectral.hpp"

using namespace radtag;

namespace {

// brute-force DFT, independent of the FFT backend
CVector<double> naive_dft(const CVector<double>& x, int n) {
    CVector<double> X = CVector<double>::Zero(n);
    for (int k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < x.size(); ++i) X[k] += x[i] * std::polar(1.0, -2.0 * M_PI * k * i / n);
    return X;
}

}  // namespace

TEST_CASE("default configuration") {
    RadarConfig cfg;
    CHECK(cfg.samples_per_chirp() == 496);
    CHECK(cfg.gap_samples() == 104);
    CHECK(cfg.repetition_samples() == 600);
    CHECK(cfg.t_rep() == doctest::Approx(600e-6));
    CHECK(cfg.wavelength() == doctest::Approx(299792458.0 / 24e9));
    CHECK_NOTHROW(cfg.validate());

    RadarConfig bad = cfg;
    bad.bandwidth = 0;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.n_rx = 0;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.fft_pad = 0;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.rx_spacing = -0.5;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("beat frequency and its inverse") {
    RadarConfig cfg;
    const double slope = 250e6 / 496e-6;
    CHECK(beat_frequency(0.0, cfg) == 0.0);
    CHECK(beat_frequency(5.0, cfg) == doctest::Approx(slope * 2 * 5.0 / 299792458.0).epsilon(1e-12));
    CHECK(beat_frequency(5.0, cfg) == doctest::Approx(16801).epsilon(1e-3));
    // one range-resolution cell is one coarse bin
    CHECK(beat_frequency(range_resolution(cfg), cfg) == doctest::Approx(cfg.coarse_bin_hz()).epsilon(1e-9));
    CHECK(beat_frequency(0.6, cfg) == doctest::Approx(2016).epsilon(2e-3));
    CHECK_THROWS_AS(beat_frequency(-1.0, cfg), std::domain_error);

    CHECK(range_from_frequency(0.0, cfg) == 0.0);
    CHECK(range_from_frequency(16801.0, cfg) == doctest::Approx(5.0).epsilon(1e-3));
    CHECK_THROWS_AS(range_from_frequency(-1.0, cfg), std::domain_error);
    for (double d : {0.1, 1.0, 7.3, 45.0, 130.0})
        CHECK(range_from_frequency(beat_frequency(d, cfg), cfg) == doctest::Approx(d).epsilon(1e-9));
    // linear in d
    CHECK(beat_frequency(6.0, cfg) == doctest::Approx(2.0 * beat_frequency(3.0, cfg)).epsilon(1e-12));
}

TEST_CASE("coarse bins are one range resolution apart") {
    RadarConfig cfg;
    const double step = range_from_frequency(cfg.coarse_bin_hz(), cfg);
    CHECK(step == doctest::Approx(299792458.0 / (2 * 250e6)).epsilon(1e-9));
    // fine bins with fft_pad 4
    CHECK(cfg.fine_bin_hz() == doctest::Approx(1e6 / 1984).epsilon(1e-12));
    CHECK(range_from_frequency(cfg.fine_bin_hz(), cfg) == doctest::Approx(0.15).epsilon(0.01));
}

TEST_CASE("doppler") {
    RadarConfig cfg;
    CHECK(doppler_shift(0.0, cfg) == 0.0);
    CHECK(doppler_shift(kmh_to_mps(150), cfg) == doctest::Approx(3333).epsilon(2e-3));
    CHECK(doppler_shift(kmh_to_mps(30), cfg) == doctest::Approx(667).epsilon(2e-3));
    CHECK(doppler_shift(-3.0, cfg) == doctest::Approx(-doppler_shift(3.0, cfg)));
    CHECK(doppler_shift(6.0, cfg) == doctest::Approx(2 * doppler_shift(3.0, cfg)));

    CHECK(max_unambiguous_doppler(cfg) == doctest::Approx(1666.667).epsilon(1e-6));
    RadarConfig c2 = cfg;
    c2.t_chirp = 0.9e-3;
    c2.t_gap = 0.1e-3;
    CHECK(max_unambiguous_doppler(c2) == doctest::Approx(1000.0));
    c2.t_chirp = 25e-6;
    c2.t_gap = 5e-6;
    CHECK(max_unambiguous_doppler(c2) == doctest::Approx(33333.33).epsilon(1e-6));
}

TEST_CASE("range fft matches a direct DFT") {
    RadarConfig cfg;
    IQFrameD f(cfg, 2);
    for (int n = 0; n < 496; ++n) f.rx[1](1, n) = std::complex<double>(std::sin(0.37 * n), std::cos(0.011 * n * n));
    const CVector<double> X = range_fft(f, 1, 1, 1984);
    const CVector<double> ref = naive_dft(f.chirp(1, 1).transpose(), 1984);
    CHECK((X - ref).norm() / ref.norm() < 1e-10);

    // Parseval on the unpadded transform
    const CVector<double> X0 = range_fft(f, 1, 1, 496);
    CHECK(X0.squaredNorm() / 496.0 == doctest::Approx(f.chirp(1, 1).squaredNorm()).epsilon(1e-6));

    CHECK(range_fft(f, 0, 0, 496).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(range_fft(f, 2, 0, 496));
    CHECK_THROWS(range_fft(f, 0, 4, 496));
    CHECK_THROWS(range_fft(f, 0, 0, 100));
}

TEST_CASE("single scatterer lands on its beat bin") {
    RadarConfig cfg;
    Scene sc;
    sc.noise_enabled = false;
    ClutterObject c;
    c.range_m = 5.0;
    c.snr_db = 10;
    sc.clutter.push_back(c);
    const IQFrameD f = simulate_frame(sc, cfg, 2, 1);
    const double want = beat_frequency(5.0, cfg) / cfg.coarse_bin_hz();  // 8.33
    for (int q = 0; q < cfg.n_rx; ++q) {
        Eigen::Index k = 0;
        range_fft(f, 0, q, 496).head(248).cwiseAbs().maxCoeff(&k);
        CHECK(std::abs(k - want) <= 1.0);
    }
}

TEST_CASE("range-doppler map") {
    RadarConfig cfg;
    Scene sc;
    sc.noise_enabled = false;
    ClutterObject c;
    c.range_m = 8.0;
    c.snr_db = 10;
    sc.clutter.push_back(c);
    const int L = 32;

    SUBCASE("static scatterer stays in the zero-doppler column") {
        const CMatrix<double> rd = range_doppler_map(simulate_frame(sc, cfg, L, 1), 0);
        const double total = rd.squaredNorm();
        CHECK(rd.col(0).squaredNorm() / total > 1.0 - 1e-9);
    }
    SUBCASE("moving scatterer peaks at its doppler bin") {
        sc.clutter[0].velocity = 5.0;
        const double fd = doppler_shift(5.0, cfg);
        const CMatrix<double> rd = range_doppler_map(simulate_frame(sc, cfg, L, 1), 0);
        Eigen::Index r = 0, d = 0;
        rd.cwiseAbs().maxCoeff(&r, &d);
        const double res = 1.0 / (L * cfg.t_rep());
        // the real tone puts copies at +-fd; either bin is nearest fd modulo the doppler band
        const double pos = std::fmod(fd / res, L);
        const double dd = std::min(std::abs(d - pos), std::abs(d - (L - pos)));
        CHECK(dd <= 0.5 + 1e-9);
        CHECK(doppler_bin_hz(1, L, cfg) == doctest::Approx(res));
    }
    SUBCASE("needs two chirps") { CHECK_THROWS(range_doppler_map(simulate_frame(sc, cfg, 1, 1), 0)); }
}

TEST_CASE("dB helpers") {
    CHECK(db_to_power(10.0) == doctest::Approx(10.0));
    CHECK(power_to_db(100.0) == doctest::Approx(20.0));
    CHECK(kmh_to_mps(36.0) == doctest::Approx(10.0));
}
