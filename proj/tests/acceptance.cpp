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


// One line per acceptance criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "radtag/array_design.hpp"
#include "radtag/harness.hpp"

using namespace radtag;

namespace {

int failures = 0;

void report(bool ok, int n, const std::string& what, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string f(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string f(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TagSpec tag(int id, double range, double angle, double snr_db) {
    TagSpec t;
    t.tag_id = id;
    t.range_m = range;
    t.angle_deg = angle;
    t.snr_db = snr_db;
    return t;
}

// ---- tolerances -------------------------------------------------------------
constexpr double kGainTarget = 18.06, kGainTol = 1.0;
constexpr double kDopplerMaxErr = 2.0;
constexpr double kRangeTarget = 130.0, kRangeTol = 0.05;
constexpr double kLocRange = 0.15, kLocAngle = 6.0;
constexpr double kAucMin = 0.99;
constexpr double kFlat = 0.02;
constexpr double kBeamwidth = 6.35, kBeamTol = 0.01, kFov = 5.08, kFovTol = 0.02;

void gold_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    const GoldCodebook book = generate_gold_codebook(5);
    bool ok = book.size() == 33 && book.length() == 31;
    int max_auto_side = 0, max_cross = 0, peak = 0;
    std::vector<int> values;
    for (int a = 0; a < book.size(); ++a)
        for (int b = a; b < book.size(); ++b) {
            const auto r = periodic_crosscorr(book[a], book[b]);
            for (size_t s = 0; s < r.size(); ++s) {
                if (a == b && s == 0) {
                    peak = std::max(peak, r[0]);
                    ok = ok && r[0] == 31;
                    continue;
                }
                if (a == b) max_auto_side = std::max(max_auto_side, std::abs(r[s]));
                else max_cross = std::max(max_cross, std::abs(r[s]));
                if (std::find(values.begin(), values.end(), r[s]) == values.end()) values.push_back(r[s]);
            }
        }
    std::sort(values.begin(), values.end());
    ok = ok && values == std::vector<int>{-9, -1, 7} && max_cross == 9 && max_auto_side <= 9;
    const double t = elapsed(t0);
    ok = ok && t < 1.0;
    report(ok, 1, "Gold-code properties",
           f("%d codes x %d chips, peak %d, off-peak values {%d..%d} in %zu levels, max |cross| %d, %.3f s", book.size(),
             book.length(), peak, values.front(), values.back(), values.size(), max_cross, t));
}

void constraint_boundary() {
    RadarConfig cfg;
    const ConstraintReport r = check_modulation_constraints(250e3, 31, 4, cfg);
    const bool ok = r.timing == ConstraintStatus::boundary && r.bandwidth == ConstraintStatus::boundary &&
                    std::abs(r.repetitions - 4.0) < 1e-9 && r.ok();
    report(ok, 2, "Constraint boundary",
           f("k = %.6g, timing %s, bandwidth %s", r.repetitions, to_string(r.timing).c_str(), to_string(r.bandwidth).c_str()));
}

void processing_gain() {
    const auto t0 = std::chrono::steady_clock::now();
    Scene s;
    s.tags.push_back(tag(3, 5.0, 0.0, 0.0));
    const GainResult g = run_processing_gain(s, RadarConfig{}, 1, 64, 100, 1);
    const double t = elapsed(t0);
    const bool ok = std::abs(g.gain_db - kGainTarget) <= kGainTol && t < 120.0;
    report(ok, 3, "Processing gain L=1 -> 64",
           f("median %.2f -> %.2f dB, gain %.2f dB (target %.2f +- %.1f), 100 trials, %.1f s", g.median_lo, g.median_hi,
             g.gain_db, kGainTarget, kGainTol, t));
}

void doppler_robustness() {
    RadarConfig cfg;
    int correct = 0, total = 0;
    double worst = 0;
    for (double kmh = 0; kmh <= 150.0 + 1e-9; kmh += 10.0)
        for (int rep = 0; rep < 2; ++rep) {
            Scene s;
            s.noise_enabled = false;
            const int id = (7 * total + 3) % 33;
            TagSpec t = tag(id, 10.0 + 2.5 * rep, 0.0, 0.0);
            t.velocity = kmh_to_mps(kmh);
            s.tags.push_back(t);
            // single-chirp read; chirp combining assumes doppler phase is constant across chirps
            const IQFrameD frame = simulate_frame(s, cfg, 1, 100 + total);
            const DetectionReport r = decode(frame, default_codebook(), 1);
            ++total;
            // noiseless frames put every code over the floor; the strongest one names the tag
            if (!r.detections.empty() && r.detections[0].code_id == id) {
                ++correct;
                worst = std::max(worst, std::abs(r.detections[0].range_m - t.range_m));
            } else {
                worst = std::max(worst, 1e9);
            }
        }
    const bool ok = correct == total && worst <= kDopplerMaxErr;
    report(ok, 4, "Doppler robustness 0-150 km/h, single chirp",
           f("%d/%d correct, max range error %.3f m (limit %.1f m), doppler up to %.0f Hz", correct, total, worst,
             kDopplerMaxErr, doppler_shift(kmh_to_mps(150.0), cfg)));
}

void range_scaling() {
    RadarConfig cfg;
    const double det = calibrate_detection_snr(-8.0, cfg, 45.0);
    const double r1 = max_range(-8.0, cfg, 0.0, det);
    const double r64 = max_range(-8.0, cfg, 10 * std::log10(64.0), det);
    const bool ok = std::abs(r1 - 45.0) < 1e-6 && std::abs(r64 / kRangeTarget - 1.0) <= kRangeTol;
    report(ok, 5, "Range scaling",
           f("detection SNR %.2f dB, 1 chirp %.2f m, 64 chirps %.2f m (%.1f%% from %.0f m)", det, r1, r64,
             100 * (r64 / kRangeTarget - 1.0), kRangeTarget));
}

void localization() {
    const auto t0 = std::chrono::steady_clock::now();
    LocalizationSpec spec;
    spec.scene.tags.push_back(tag(5, 5.0, 0.0, 0.0));
    spec.scene.tags[0].snr_db.reset();
    // link budget puts a -8 dBsm tag at the single-chirp threshold at 45 m
    spec.radar.system_gain_db = -snr_at_range(45.0, -8.0, RadarConfig{});
    spec.trials = 100;
    const LocalizationResult r = run_localization(spec);
    const double t = elapsed(t0);
    const bool ok = r.detected == r.trials && r.median_range_error <= kLocRange && r.median_angle_error <= kLocAngle && t < 300;
    report(ok, 6, "Localization 2-25 m",
           f("%d/%d detected, median range error %.4f m (<= %.2f), median angle error %.2f deg (<= %.0f), %.1f s", r.detected,
             r.trials, r.median_range_error, kLocRange, r.median_angle_error, kLocAngle, t));
}

void multi_tag_roc() {
    struct Geometry {
        const char* name;
        double range[3], angle[3];
    };
    const Geometry geoms[] = {{"spread", {4, 9, 14}, {-30, 0, 30}},
                              {"close", {5, 6.5, 8}, {-10, 0, 10}},
                              {"adjacent", {5, 5.3, 5.6}, {0, 0, 0}}};
    const int Ls[] = {4, 16, 64};
    double auc[3][3];
    std::string detail;
    for (int g = 0; g < 3; ++g) {
        for (int li = 0; li < 3; ++li) {
            RocSpec spec;
            const int ids[] = {2, 7, 12};
            for (int i = 0; i < 3; ++i) spec.present.tags.push_back(tag(ids[i], geoms[g].range[i], geoms[g].angle[i], -14.0));
            spec.chirps = Ls[li];
            spec.trials = 30;
            auc[g][li] = run_roc(spec).auc;
        }
        detail += f("%s %.3f/%.3f/%.3f; ", geoms[g].name, auc[g][0], auc[g][1], auc[g][2]);
    }
    bool ok = auc[2][0] < auc[2][2];
    for (int g = 0; g < 3; ++g) ok = ok && auc[g][2] >= kAucMin;
    report(ok, 7, "Multi-tag ROC",
           detail + f("AUC at 2.4/9.6/38.4 ms, need >= %.2f at 38.4 ms and adjacent 2.4 ms < 38.4 ms", kAucMin));
}

void baseline() {
    BaselineSpec spec;
    spec.scene.tags.push_back(tag(4, 6.0, 0.0, -10.0));
    ClutterObject c;
    c.range_m = 9.0;
    c.snr_db = 10.0;
    spec.scene.clutter.push_back(c);
    // 0 km/h is the static sanity point; 10-20 km/h puts the clutter doppler in 222-445 Hz
    spec.speeds_kmh = {0.0, 10.0, 12.5, 15.0, 17.5, 20.0};
    spec.trials = 30;
    const auto rows = run_baseline_comparison(spec);
    bool ok = true;
    double lo = 1, hi = 0;
    std::string detail;
    for (const auto& r : rows) {
        lo = std::min(lo, r.cdm_rate);
        hi = std::max(hi, r.cdm_rate);
        const bool in_band = r.clutter_doppler_hz >= 200.0 && r.clutter_doppler_hz <= 600.0;
        if (in_band) ok = ok && r.cdm_rate > r.fm_rate;
        detail += f("%.1f km/h (%.0f Hz) %.2f/%.2f; ", r.speed_kmh, r.clutter_doppler_hz, r.cdm_rate, r.fm_rate);
    }
    ok = ok && hi - lo <= kFlat;
    report(ok, 8, "CDM vs FM under moving clutter", detail + f("CDM/FM rates, CDM spread %.2f", hi - lo));
}

void energy_halving() {
    RadarConfig cfg;
    double worst = 0;
    for (int id : {0, 1, 5, 17, 32}) {
        Scene a, b;
        a.noise_enabled = b.noise_enabled = false;
        a.tags.push_back(tag(id, 6.0, 0.0, 0.0));
        ClutterObject c;
        c.range_m = 6.0;
        c.snr_db = 0.0;
        b.clutter.push_back(c);
        const double ratio = simulate_frame(a, cfg, 8, 1).energy() / simulate_frame(b, cfg, 8, 1).energy();
        worst = std::max(worst, std::abs(ratio - 0.5));
    }
    report(worst <= 1.0 / 31.0, 9, "Energy halving", f("max |ratio - 0.5| = %.5f over 5 codes (limit 1/31 = %.5f)", worst, 1.0 / 31));
}

// Image copy of the tag: the code on a carrier at f_m - delta, decoded at the
// matched hypothesis f_m + delta, so it keeps a 2 delta offset after downconversion.
// filtered = true also runs the one-sided bandpass first.
double image_ratio(double range, const RadarConfig& cfg, bool filtered, double* oracle) {
    const GoldCodebook& book = default_codebook();
    const double f_m = 250e3, delta = beat_frequency(range, cfg);
    const Vector<double> c = upsample_bipolar<double>(book[3], 4);
    const int Ns = cfg.samples_per_chirp();
    CVector<double> matched(Ns), image(Ns);
    for (int n = 0; n < Ns; ++n) {
        matched[n] = c[n % c.size()] * std::polar(1.0, 2 * kPi * (f_m + delta) * n / cfg.fs);
        image[n] = c[n % c.size()] * std::polar(1.0, 2 * kPi * (f_m - delta) * n / cfg.fs);
    }
    auto corr = [&](const CVector<double>& x) {
        const CVector<double> y = downconvert(filtered ? bandpass_positive(x, f_m, delta, cfg) : x, f_m, delta, cfg);
        return correlate_with_code(y, book[3], f_m, cfg.fs);
    };
    // contribution at the lag of the matched correlation peak
    const auto m = corr(matched);
    const auto i = corr(image);
    std::complex<double> d = 0;
    for (int n = 0; n < Ns; ++n) d += std::polar(1.0, -4 * kPi * delta * n / cfg.fs);
    *oracle = std::abs(d) / Ns;
    return std::abs(i.folded[m.coherent_lag]) / m.coherent_peak;
}

void image_decay() {
    RadarConfig cfg;
    double o2 = 0, o10 = 0;
    const double r2 = image_ratio(2.0, cfg, false, &o2), r10 = image_ratio(10.0, cfg, false, &o10);
    const double b2 = image_ratio(2.0, cfg, true, &o2), b10 = image_ratio(10.0, cfg, true, &o10);
    // the oracle is the Dirichlet kernel of the 2 delta offset over one chirp
    const bool ok = r2 > r10 && std::abs(r2 - o2) < 0.01 && std::abs(r10 - o10) < 0.01;
    report(ok, 10, "Image-term decay",
           f("image/matched correlation %.4f at 2 m vs %.4f at 10 m (Dirichlet %.4f vs %.4f; after bandpass %.4f vs %.4f)", r2,
             r10, o2, o10, b2, b10));
}

void array_sweeps() {
    bool mono = true;
    for (double a : {0.5, 1.0, 3.0}) {
        double prev = 1e9;
        for (int np = 1; np <= 8; ++np) {
            mono = mono && pair_gain_lossy(np, a) <= pair_gain_ideal(np) + 1e-12;
            const double step = pair_gain_lossy(np + 1, a) - pair_gain_lossy(np, a);
            mono = mono && step < prev;
            prev = step;
        }
    }
    ArrayDesign d;
    d.n_elements = 8;
    d.spacing = 0.5;
    const double bw = vertical_beamwidth(d), fov = required_fov(4, 45);
    const bool ok = mono && std::abs(bw - kBeamwidth) <= kBeamTol && std::abs(fov - kFov) <= kFovTol;
    report(ok, 11, "Array-design sweeps",
           f("lossy <= ideal with decreasing marginal gain: %s; beamwidth %.3f deg; required FoV %.3f deg; Np=3 at 3 dB/wl %.2f dB",
             mono ? "yes" : "no", bw, fov, pair_gain_lossy(3, 3.0)));
}

std::string slurp(const std::filesystem::path& p) {
    std::FILE* fp = std::fopen(p.string().c_str(), "rb");
    if (!fp) return "<missing>";
    std::string s;
    char buf[65536];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, fp)) > 0) s.append(buf, n);
    std::fclose(fp);
    return s;
}

void cli_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "radtag_acceptance";
    fs::create_directories(dir);
    const std::string cli = RADTAG_CLI_PATH, scenes = std::string(RADTAG_SOURCE_DIR) + "/tools/scenes/";
    struct Cmd {
        const char* name;
        std::string args;
        std::vector<std::string> outputs;
    };
    const std::vector<Cmd> cmds = {
        {"simulate", "simulate --scene " + scenes + "single_tag.json --seed 7 --chirps 4 --out {}/frame.iq", {"frame.iq", "frame.iq.json"}},
        {"decode", "decode --scene " + scenes + "single_tag.json --seed 7 --chirps 8 --out {}/report.json --csv {}/report.csv",
         {"report.json", "report.csv"}},
        {"sweep", "sweep --spec " + scenes + "range_sweep.json --trials 2 --chirps 4 --out {}/sweep.csv", {"sweep.csv"}},
        {"roc", "roc --spec " + scenes + "roc_three_tags.json --trials 3 --out {}/roc.csv", {"roc.csv"}},
        {"baseline", "baseline --spec " + scenes + "baseline_clutter.json --trials 2 --chirps 16 --out {}/baseline.csv", {"baseline.csv"}},
        {"design-array", "design-array --pairs 1,2,3,4 --elements 4,8 --alpha 0,3 --out {}/array.csv", {"array.csv"}},
        {"codebook", "codebook --m 5 --out {}/codebook.json", {"codebook.json"}},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cmds) {
        std::string outs[2];
        bool ran = true;
        for (int run = 0; run < 2; ++run) {
            const fs::path rd = dir / (std::string(c.name) + std::to_string(run));
            fs::create_directories(rd);
            std::string args = c.args;
            for (size_t p; (p = args.find("{}")) != std::string::npos;) args.replace(p, 2, rd.string());
            const std::string line = "\"" + cli + "\" " + args + " 2>/dev/null";
            ran = ran && std::system(line.c_str()) == 0;
            for (const auto& o : c.outputs) outs[run] += slurp(rd / o) + '\0';
        }
        const bool same = ran && outs[0] == outs[1] && outs[0].find("<missing>") == std::string::npos;
        ok = ok && same;
        detail += f("%s %s; ", c.name, same ? "identical" : "DIFFERENT");
    }
    fs::remove_all(dir);
    report(ok, 12, "CLI determinism", detail);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    gold_properties();
    constraint_boundary();
    processing_gain();
    doppler_robustness();
    range_scaling();
    localization();
    multi_tag_roc();
    baseline();
    energy_halving();
    image_decay();
    array_sweeps();
    cli_determinism();
    std::printf("%d of 12 criteria failed, %.1f s\n", failures, elapsed(t0));
    return failures;
}
