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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radtag/array_design.hpp"
#include "radtag/scene.hpp"

using namespace radtag;

namespace {

ArrayDesign design(int ne, double spacing) {
    ArrayDesign d;
    d.n_elements = ne;
    d.spacing = spacing;
    return d;
}

}  // namespace

TEST_CASE("vertical beamwidth") {
    // 0.886 / (2 * 0.443) = 1 rad
    CHECK(vertical_beamwidth(design(1, 0.443)) == doctest::Approx(180.0 / M_PI));
    CHECK(vertical_beamwidth(design(8, 0.5)) == doctest::Approx(6.35).epsilon(0.01 / 6.35));
    for (int ne : {1, 2, 4, 8, 16}) {
        CHECK(vertical_beamwidth(design(2 * ne, 0.5)) == doctest::Approx(vertical_beamwidth(design(ne, 0.5)) / 2));
        CHECK(vertical_beamwidth(design(ne, 0.5)) * ne == doctest::Approx(vertical_beamwidth(design(1, 0.5))));
    }
    CHECK_THROWS(vertical_beamwidth(design(0, 0.5)));
    CHECK_THROWS(vertical_beamwidth(design(8, 0.0)));
}

TEST_CASE("gains") {
    CHECK(element_gain_boost(1) == doctest::Approx(0.0));
    CHECK(element_gain_boost(8) == doctest::Approx(18.06).epsilon(1e-3));
    CHECK(element_gain_boost(16) == doctest::Approx(24.08).epsilon(1e-3));
    CHECK(pair_gain_ideal(1) == doctest::Approx(0.0));
    CHECK(pair_gain_ideal(3) == doctest::Approx(9.54).epsilon(1e-3));
    CHECK(pair_gain_ideal(4) == doctest::Approx(12.04).epsilon(1e-3));
    CHECK(pair_gain_lossy(3, 3.0) == doctest::Approx(6.89).epsilon(1e-3));
    for (int np = 1; np <= 8; ++np) CHECK(pair_gain_lossy(np, 0.0) == doctest::Approx(pair_gain_ideal(np)));
    for (double a : {0.5, 1.0, 3.0}) {
        double prev_step = 1e9;
        for (int np = 1; np <= 8; ++np) {
            CHECK(pair_gain_lossy(np, a) < pair_gain_ideal(np) + (np == 1 ? 1e-12 : 0.0));
            const double step = pair_gain_lossy(np + 1, a) - pair_gain_lossy(np, a);
            CHECK(step < prev_step);
            prev_step = step;
        }
    }
    CHECK_THROWS(pair_gain_lossy(3, -1.0));
    CHECK_THROWS(element_gain_boost(0));
}

TEST_CASE("coverage") {
    RadarConfig cfg;
    const double det = calibrate_detection_snr(-8.0, cfg, 45.0);
    CHECK(max_range(-8.0, cfg, 0.0, det) == doctest::Approx(45.0));
    CHECK(max_range(-8.0, cfg, 18.06, det) / 45.0 == doctest::Approx(std::pow(10.0, 18.06 / 40)));
    CHECK(max_range(-8.0, cfg, 18.06, det) == doctest::Approx(127.0).epsilon(0.01));
    RadarConfig eirp = cfg;
    eirp.pt_dbm = 20.0;
    // 8 -> 20 dBm is 12 dB, 1.995x; 12.04 dB gives 2.000x
    CHECK(max_range(-8.0, eirp, 0.0, det) / 45.0 == doctest::Approx(2.0).epsilon(3e-3));
    CHECK(max_range(-8.0, cfg, 20 * std::log10(4.0), det) / 45.0 == doctest::Approx(2.0));
    for (double x : {-20.0, -8.0, 3.0}) CHECK(max_range(x + 10, cfg, 0, det) / max_range(x, cfg, 0, det) == doctest::Approx(std::pow(10.0, 0.25)).epsilon(1e-9));
    // the range returned meets the link budget exactly
    const double r = max_range(-3.0, cfg, 6.0, det);
    CHECK(snr_at_range(r, -3.0, cfg) + 6.0 == doctest::Approx(det));
}

TEST_CASE("required field of view") {
    CHECK(required_fov(4, 45) == doctest::Approx(5.08).epsilon(0.02 / 5.08));
    CHECK(required_fov(0, 12) == 0.0);
    CHECK(required_fov(7, 7) == doctest::Approx(45.0));
    CHECK_THROWS_AS(required_fov(4, 0), std::domain_error);
}

TEST_CASE("sweep table") {
    RadarConfig cfg;
    ArrayDesign base;
    const double det = calibrate_detection_snr(-8.0, cfg, 45.0);
    const auto rows = array_sweep({1, 3}, {8}, {0.0, 3.0}, base, cfg, det);
    REQUIRE(rows.size() == 4);
    // the default base RCS puts Np=3, Ne=8, lossless at -8 dBsm, hence 45 m
    CHECK(rows[1].n_pairs == 3);
    CHECK(rows[1].range_m == doctest::Approx(45.0).epsilon(1e-4));
    CHECK(rows[3].range_m < rows[1].range_m);
    const std::string csv = array_sweep_csv(rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n_pairs,n_elements,alpha_db_per_wl,beamwidth_deg,element_gain_db,pair_gain_ideal_db,pair_gain_lossy_db,range_m");
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(n == 4);
}
