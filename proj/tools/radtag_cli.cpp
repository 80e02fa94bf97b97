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

// radtag: simulate, decode and evaluate radar backscatter tag scenes.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radtag/array_design.hpp"
#include "radtag/harness.hpp"
#include "radtag/io.hpp"

using namespace radtag;

namespace {

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text(out, text);
}

// A scene file is either a bare Scene or {"radar": ..., "scene": ...}.
std::pair<Scene, RadarConfig> load_scene(const std::string& path) {
    const Json j = read_json(path);
    RadarConfig cfg = j.contains("radar") ? radar_config_from_json(j.at("radar")) : RadarConfig{};
    Scene s = scene_from_json(j.contains("scene") ? j.at("scene") : j);
    return {s, cfg};
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> v;
    for (double d : split_doubles(s)) v.push_back(static_cast<int>(d));
    return v;
}

int fail(const std::string& cmd, const std::string& msg, int code) {
    Json e{{"error", msg}, {"command", cmd}};
    std::cerr << e.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radar backscatter tag toolkit"};
    app.require_subcommand(1);

    std::string scene_path, out_path, in_path, spec_path, csv_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> chirps, trials;
    std::optional<double> threshold_db;

    auto* sim = app.add_subcommand("simulate", "write a float32 IQ frame for a scene");
    sim->add_option("--scene", scene_path, "scene JSON")->required();
    sim->add_option("--out", out_path, "IQ output path (sidecar at <out>.json)")->required();
    sim->add_option("--seed", seed, "RNG seed (default: scene rng_seed)");
    sim->add_option("--chirps", chirps, "chirps in the frame (default 64)");

    auto* dec = app.add_subcommand("decode", "decode an IQ frame or a scene");
    dec->add_option("--in", in_path, "IQ frame written by simulate");
    dec->add_option("--scene", scene_path, "simulate this scene, then decode");
    dec->add_option("--out", out_path, "report JSON (default stdout)");
    dec->add_option("--csv", csv_path, "also write the report as CSV");
    dec->add_option("--seed", seed, "RNG seed when decoding a scene");
    dec->add_option("--chirps", chirps, "chirps to combine (default: all)");
    dec->add_option("--threshold-db", threshold_db, "peak-to-noise threshold (default 12)");

    auto* swp = app.add_subcommand("sweep", "detection-rate sweep");
    swp->add_option("--spec", spec_path, "experiment JSON")->required();
    swp->add_option("--out", out_path, "CSV output (default stdout)");
    swp->add_option("--seed", seed, "base seed override");
    swp->add_option("--chirps", chirps, "chirps override");
    swp->add_option("--threshold-db", threshold_db, "threshold override");
    swp->add_option("--trials", trials, "trials per grid point override");

    auto* roc = app.add_subcommand("roc", "ROC and AUC from tag-present and tag-absent scenes");
    roc->add_option("--spec", spec_path, "ROC JSON")->required();
    roc->add_option("--out", out_path, "CSV output (default stdout)");
    roc->add_option("--seed", seed, "base seed override");
    roc->add_option("--chirps", chirps, "chirps override");
    roc->add_option("--trials", trials, "trials override");

    auto* base = app.add_subcommand("baseline", "CDM versus FM detection rate against clutter speed");
    base->add_option("--spec", spec_path, "baseline JSON")->required();
    base->add_option("--out", out_path, "CSV output (default stdout)");
    base->add_option("--seed", seed, "base seed override");
    base->add_option("--chirps", chirps, "chirps override");
    base->add_option("--trials", trials, "trials override");

    std::string pairs = "1,2,3,4,5,6", elements = "8", alphas = "0,0.5,1";
    double anchor = 45.0, rcs = -8.0, pg = 0.0;
    auto* arr = app.add_subcommand("design-array", "van-atta design sweep as CSV");
    arr->add_option("--pairs", pairs, "comma-separated Np values");
    arr->add_option("--elements", elements, "comma-separated Ne values");
    arr->add_option("--alpha", alphas, "comma-separated trace loss in dB per wavelength");
    arr->add_option("--anchor-m", anchor, "range the reference tag reaches");
    arr->add_option("--anchor-rcs", rcs, "RCS of the reference tag (dBsm)");
    arr->add_option("--processing-gain-db", pg, "gain added to every design");
    arr->add_option("--out", out_path, "CSV output (default stdout)");

    int m = 5;
    auto* cb = app.add_subcommand("codebook", "Gold codebook as JSON");
    cb->add_option("--m", m, "register length (odd)");
    cb->add_option("--out", out_path, "JSON output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("parse", e.what(), 2);
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "simulate") {
            auto [scene, cfg] = load_scene(scene_path);
            const int L = chirps.value_or(64);
            const IQFrameD frame = simulate_frame(scene, cfg, L, seed.value_or(scene.rng_seed));
            for (const auto& w : frame.warnings) std::cerr << Json{{"warning", w}}.dump() << "\n";
            write_iq(out_path, frame.cast<float>());
        } else if (cmd == "decode") {
            if (in_path.empty() == scene_path.empty()) throw std::invalid_argument("decode: give exactly one of --in or --scene");
            IQFrameF frame;
            if (!in_path.empty()) {
                frame = read_iq(in_path);
            } else {
                auto [scene, cfg] = load_scene(scene_path);
                frame = simulate_frame(scene, cfg, chirps.value_or(64), seed.value_or(scene.rng_seed)).cast<float>();
            }
            const int L = chirps.value_or(frame.n_chirps());
            DecoderOptions opt;
            if (threshold_db) opt.threshold_db = *threshold_db;
            const DetectionReport rep = decode(frame, default_codebook(), L, opt);
            emit(out_path, to_json(rep).dump(2) + "\n");
            if (!csv_path.empty()) write_text(csv_path, report_csv(rep));
        } else if (cmd == "sweep") {
            Json j = read_json(spec_path);
            if (seed) j["base_seed"] = *seed;
            if (chirps) j["chirps"] = *chirps;
            if (threshold_db) j["threshold_db"] = *threshold_db;
            if (trials) j["trials"] = *trials;
            emit(out_path, sweep_csv(run_detection_sweep(experiment_from_json(j))));
        } else if (cmd == "roc") {
            Json j = read_json(spec_path);
            if (seed) j["base_seed"] = *seed;
            if (chirps) j["chirps"] = *chirps;
            if (trials) j["trials"] = *trials;
            const RocResult r = run_roc(roc_from_json(j));
            for (const auto& w : r.warnings) std::cerr << Json{{"warning", w}}.dump() << "\n";
            emit(out_path, roc_csv(r));
        } else if (cmd == "baseline") {
            Json j = read_json(spec_path);
            if (seed) j["base_seed"] = *seed;
            if (chirps) j["chirps"] = *chirps;
            if (trials) j["trials"] = *trials;
            emit(out_path, baseline_csv(run_baseline_comparison(baseline_from_json(j))));
        } else if (cmd == "design-array") {
            RadarConfig cfg;
            ArrayDesign d;
            const double det = calibrate_detection_snr(rcs, cfg, anchor) - pg;
            d.base_rcs_dbsm = rcs - element_gain_boost(d.n_elements) - pair_gain_ideal(d.n_pairs);
            emit(out_path, array_sweep_csv(array_sweep(split_ints(pairs), split_ints(elements), split_doubles(alphas), d, cfg, det)));
        } else if (cmd == "codebook") {
            emit(out_path, to_json(generate_gold_codebook(m, default_preferred_pair(m))).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        return fail(cmd, e.what(), 1);
    }
    return 0;
}
