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

#include "radtag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "radtag/fm_baseline.hpp"

namespace radtag {

namespace {

// Runs fn(i) for i in [0, n); each index writes only its own result slot.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

template <typename T>
T get_or(const Json& j, const char* key, T def) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return def;
    return it->get<T>();
}

Scene scene_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("spec: missing ") + key);
    if (it->is_string()) return scene_from_json(read_json(it->get<std::string>()));
    return scene_from_json(*it);
}

RadarConfig radar_field(const Json& j) {
    return j.contains("radar") ? radar_config_from_json(j.at("radar")) : RadarConfig{};
}

DecoderOptions decoder_field(const Json& j) {
    return j.contains("decoder") ? decoder_options_from_json(j.at("decoder")) : DecoderOptions{};
}

int truth_bin(double range_m, const RadarConfig& cfg) {
    return static_cast<int>(std::lround(beat_frequency(range_m, cfg) / cfg.coarse_bin_hz()));
}

}  // namespace

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double code_statistic(const CorrelationMatrix& cm, int code_id) {
    if (code_id < 0 || code_id >= cm.n_codes()) throw std::out_of_range("code_statistic: code id");
    double best = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < cm.n_hyp(); ++h) best = std::max(best, cm.ptn_db(h, code_id));
    return best;
}

// ---- sweeps -----------------------------------------------------------------

void ExperimentSpec::validate() const {
    if (trials < 1) throw std::invalid_argument("spec: trials must be >= 1");
    if (grid.empty()) throw std::invalid_argument("spec: grid must be non-empty");
    if (target < 0 || target >= static_cast<int>(scene.tags.size())) throw std::invalid_argument("spec: target tag index");
    static const char* vars[] = {"range", "angle", "speed", "snr", "threshold", "L"};
    if (std::find(std::begin(vars), std::end(vars), variable) == std::end(vars))
        throw std::invalid_argument("spec: unknown sweep variable '" + variable + "'");
    if (chirps < 1) throw std::invalid_argument("spec: chirps must be >= 1");
    radar.validate();
}

ExperimentSpec experiment_from_json(const Json& j) {
    ExperimentSpec s;
    s.scene = scene_field(j, "scene");
    s.radar = radar_field(j);
    s.variable = get_or<std::string>(j, "variable", s.variable);
    s.grid = get_or<std::vector<double>>(j, "grid", s.grid);
    s.trials = get_or(j, "trials", s.trials);
    s.base_seed = get_or(j, "base_seed", s.base_seed);
    s.chirps = get_or(j, "chirps", s.chirps);
    s.threshold_db = get_or(j, "threshold_db", s.threshold_db);
    s.target = get_or(j, "target", s.target);
    s.decoder = decoder_field(j);
    s.validate();
    return s;
}

std::vector<SweepRow> run_detection_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const int G = static_cast<int>(spec.grid.size()), T = spec.trials;
    struct Outcome {
        bool hit = false;
        double range_err = 0, angle_err = 0;
    };
    std::vector<Outcome> out(static_cast<size_t>(G) * T);
    parallel_for(G * T, [&](int idx) {
        const int g = idx / T, t = idx % T;
        const double v = spec.grid[g];
        Scene scene = spec.scene;
        TagSpec& tag = scene.tags[spec.target];
        DecoderOptions opt = spec.decoder;
        opt.threshold_db = spec.threshold_db;
        int L = spec.chirps;
        if (spec.variable == "range") tag.range_m = v;
        else if (spec.variable == "angle") tag.angle_deg = v;
        else if (spec.variable == "speed") tag.velocity = kmh_to_mps(v);
        else if (spec.variable == "snr") tag.snr_db = v;
        else if (spec.variable == "threshold") opt.threshold_db = v;
        else L = static_cast<int>(std::lround(v));
        if (L < 1) throw std::invalid_argument("sweep: L must be >= 1");
        const IQFrameD frame = simulate_frame(scene, spec.radar, L, spec.base_seed + static_cast<std::uint64_t>(t));
        const DetectionReport rep = decode(frame, default_codebook(), L, opt);
        Outcome& o = out[static_cast<size_t>(idx)];
        if (const Detection* d = rep.find(tag.tag_id)) {
            o.hit = true;
            o.range_err = std::abs(d->range_m - tag.range_m);
            o.angle_err = std::abs(d->angle_deg - tag.angle_deg);
        }
    });
    std::vector<SweepRow> rows;
    for (int g = 0; g < G; ++g) {
        SweepRow r;
        r.value = spec.grid[g];
        r.trials = T;
        int hits = 0;
        double re = 0, ae = 0;
        for (int t = 0; t < T; ++t) {
            const Outcome& o = out[static_cast<size_t>(g) * T + t];
            if (!o.hit) continue;
            ++hits;
            re += o.range_err;
            ae += o.angle_err;
        }
        r.detection_rate = static_cast<double>(hits) / T;
        r.mean_range_error_m = hits ? re / hits : std::numeric_limits<double>::quiet_NaN();
        r.mean_angle_error_deg = hits ? ae / hits : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "value,detection_rate,mean_range_error_m,mean_angle_error_deg,trials\n";
    for (const auto& r : rows)
        s += fmt_num(r.value) + "," + fmt_num(r.detection_rate) + "," + fmt_num(r.mean_range_error_m) + "," +
             fmt_num(r.mean_angle_error_deg) + "," + std::to_string(r.trials) + "\n";
    return s;
}

// ---- ROC --------------------------------------------------------------------

RocSpec roc_from_json(const Json& j) {
    RocSpec s;
    s.present = scene_field(j, "present");
    s.absent = scene_field(j, "absent");
    s.radar = radar_field(j);
    s.chirps = get_or(j, "chirps", s.chirps);
    s.trials = get_or(j, "trials", s.trials);
    s.base_seed = get_or(j, "base_seed", s.base_seed);
    s.decoder = decoder_field(j);
    if (s.trials < 1) throw std::invalid_argument("roc: trials must be >= 1");
    if (s.chirps < 1) throw std::invalid_argument("roc: chirps must be >= 1");
    if (s.present.tags.empty()) throw std::invalid_argument("roc: present scene has no tags");
    return s;
}

RocResult roc_from_scores(const std::vector<double>& positives, const std::vector<double>& negatives) {
    RocResult r;
    r.positives = positives;
    r.negatives = negatives;
    if (positives.empty() || negatives.empty()) {
        r.warnings.push_back("roc: empty score set, AUC set to 0.5");
        r.auc = 0.5;
        return r;
    }
    std::vector<double> thr(positives);
    thr.insert(thr.end(), negatives.begin(), negatives.end());
    std::sort(thr.begin(), thr.end(), std::greater<>());
    thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
    if (thr.size() == 1) r.warnings.push_back("roc: degenerate statistics, all scores equal");

    std::vector<double> p(positives), n(negatives);
    std::sort(p.begin(), p.end());
    std::sort(n.begin(), n.end());
    auto frac_at_least = [](const std::vector<double>& v, double t) {
        return static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), t)) / static_cast<double>(v.size());
    };
    r.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    for (double t : thr) r.points.push_back({t, frac_at_least(p, t), frac_at_least(n, t)});
    double auc = 0;
    for (size_t i = 1; i < r.points.size(); ++i)
        auc += (r.points[i].fpr - r.points[i - 1].fpr) * 0.5 * (r.points[i].tpr + r.points[i - 1].tpr);
    r.auc = std::clamp(auc, 0.0, 1.0);
    return r;
}

RocResult run_roc(const RocSpec& spec) {
    std::vector<int> codes;
    for (const auto& t : spec.present.tags) codes.push_back(t.tag_id);
    const int T = spec.trials, K = static_cast<int>(codes.size());
    std::vector<double> pos(static_cast<size_t>(T) * K), neg(static_cast<size_t>(T) * K);
    parallel_for(2 * T, [&](int idx) {
        const bool present = idx < T;
        const int t = present ? idx : idx - T;
        const Scene& scene = present ? spec.present : spec.absent;
        const IQFrameD frame = simulate_frame(scene, spec.radar, spec.chirps, spec.base_seed + static_cast<std::uint64_t>(t));
        const CorrelationMatrix cm = joint_code_range_search(frame, default_codebook(), spec.chirps, spec.decoder);
        auto& dst = present ? pos : neg;
        for (int k = 0; k < K; ++k) dst[static_cast<size_t>(t) * K + k] = code_statistic(cm, codes[k]);
    });
    return roc_from_scores(pos, neg);
}

std::string roc_csv(const RocResult& r) {
    std::string s = "threshold_db,tpr,fpr\n";
    for (const auto& p : r.points) s += fmt_num(p.threshold_db) + "," + fmt_num(p.tpr) + "," + fmt_num(p.fpr) + "\n";
    s += "# auc," + fmt_num(r.auc) + "\n";
    return s;
}

// ---- FM baseline comparison -------------------------------------------------

BaselineSpec baseline_from_json(const Json& j) {
    BaselineSpec s;
    s.scene = scene_field(j, "scene");
    s.radar = radar_field(j);
    s.speeds_kmh = get_or(j, "speeds_kmh", s.speeds_kmh);
    s.fm_f_mod = get_or(j, "fm_f_mod", s.fm_f_mod);
    s.fm_freqs = get_or(j, "fm_freqs", s.fm_freqs);
    s.fm_threshold_db = get_or(j, "fm_threshold_db", s.fm_threshold_db);
    s.chirps = get_or(j, "chirps", s.chirps);
    s.trials = get_or(j, "trials", s.trials);
    s.base_seed = get_or(j, "base_seed", s.base_seed);
    s.decoder = decoder_field(j);
    if (s.scene.tags.empty()) throw std::invalid_argument("baseline: scene needs a tag");
    if (s.trials < 1) throw std::invalid_argument("baseline: trials must be >= 1");
    if (s.speeds_kmh.empty()) throw std::invalid_argument("baseline: speeds must be non-empty");
    if (std::find(s.fm_freqs.begin(), s.fm_freqs.end(), s.fm_f_mod) == s.fm_freqs.end())
        throw std::invalid_argument("baseline: fm_f_mod must be one of fm_freqs");
    return s;
}

std::vector<BaselineRow> run_baseline_comparison(const BaselineSpec& spec) {
    const int S = static_cast<int>(spec.speeds_kmh.size()), T = spec.trials;
    const TagSpec& tag = spec.scene.tags.front();
    const int want_bin = truth_bin(tag.range_m, spec.radar);
    const auto bank = fm_template_bank(spec.fm_freqs, spec.chirps, spec.radar);
    std::vector<char> cdm_hit(static_cast<size_t>(S) * T, 0), fm_hit(static_cast<size_t>(S) * T, 0);

    parallel_for(S * T, [&](int idx) {
        const int s = idx / T, t = idx % T;
        const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(t);
        Scene cdm = spec.scene;
        cdm.tags.resize(1);
        cdm.tags[0].scheme = Scheme::spread_spectrum;
        for (auto& c : cdm.clutter) c.velocity = kmh_to_mps(spec.speeds_kmh[s]);
        Scene fm = cdm;
        fm.tags[0].scheme = Scheme::inter_chirp_fm;
        fm.tags[0].f_mod = spec.fm_f_mod;

        // CDM: the strongest surviving detection names the tag at its range
        {
            const IQFrameD frame = simulate_frame(cdm, spec.radar, spec.chirps, seed);
            const CorrelationMatrix cm = joint_code_range_search(frame, default_codebook(), spec.chirps, spec.decoder);
            const DetectionReport rep = detect(cm, spec.decoder.threshold_db, spec.radar, spec.decoder.detect);
            cdm_hit[idx] = !rep.detections.empty() && rep.detections[0].code_id == tag.tag_id &&
                           std::abs(rep.detections[0].bin - want_bin) <= 2;
        }
        // FM: the best template over all range bins must be the tag's
        {
            const IQFrameD frame = simulate_frame(fm, spec.radar, spec.chirps, seed);
            const auto dets = fm_template_match(rd_magnitude(frame), bank, spec.fm_threshold_db);
            fm_hit[idx] = !dets.empty() && dets[0].f_mod == spec.fm_f_mod && std::abs(dets[0].range_bin - want_bin) <= 2;
        }
    });

    std::vector<BaselineRow> rows;
    for (int s = 0; s < S; ++s) {
        int c = 0, f = 0;
        for (int t = 0; t < T; ++t) {
            c += cdm_hit[static_cast<size_t>(s) * T + t];
            f += fm_hit[static_cast<size_t>(s) * T + t];
        }
        rows.push_back({spec.speeds_kmh[s], doppler_shift(kmh_to_mps(spec.speeds_kmh[s]), spec.radar),
                        static_cast<double>(c) / T, static_cast<double>(f) / T, T});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const BaselineRow& a, const BaselineRow& b) { return a.speed_kmh < b.speed_kmh; });
    return rows;
}

std::string baseline_csv(const std::vector<BaselineRow>& rows) {
    std::string s = "speed_kmh,clutter_doppler_hz,cdm_rate,fm_rate,trials\n";
    for (const auto& r : rows)
        s += fmt_num(r.speed_kmh) + "," + fmt_num(r.clutter_doppler_hz) + "," + fmt_num(r.cdm_rate) + "," +
             fmt_num(r.fm_rate) + "," + std::to_string(r.trials) + "\n";
    return s;
}

// ---- localization and processing gain --------------------------------------

LocalizationResult run_localization(const LocalizationSpec& spec) {
    if (spec.scene.tags.empty()) throw std::invalid_argument("localization: scene needs a tag");
    if (spec.trials < 1) throw std::invalid_argument("localization: trials must be >= 1");
    const int T = spec.trials;
    // positions come from their own stream so the frame seeds stay base_seed + trial
    std::mt19937_64 pos_rng(spec.base_seed ^ 0x5EEDull);
    std::uniform_real_distribution<double> ur(spec.range_min, spec.range_max), ua(-spec.angle_max_deg, spec.angle_max_deg);
    std::vector<std::pair<double, double>> where(T);
    for (auto& w : where) {
        w.first = ur(pos_rng);
        w.second = ua(pos_rng);
    }
    std::vector<double> re(T, std::numeric_limits<double>::quiet_NaN()), ae(T, std::numeric_limits<double>::quiet_NaN());
    parallel_for(T, [&](int t) {
        Scene scene = spec.scene;
        scene.tags[0].range_m = where[t].first;
        scene.tags[0].angle_deg = where[t].second;
        const IQFrameD frame = simulate_frame(scene, spec.radar, spec.chirps, spec.base_seed + static_cast<std::uint64_t>(t));
        const DetectionReport rep = decode(frame, default_codebook(), spec.chirps, spec.decoder);
        if (const Detection* d = rep.find(scene.tags[0].tag_id)) {
            re[t] = std::abs(d->range_m - where[t].first);
            ae[t] = std::abs(d->angle_deg - where[t].second);
        }
    });
    LocalizationResult r;
    r.trials = T;
    for (int t = 0; t < T; ++t)
        if (!std::isnan(re[t])) {
            ++r.detected;
            r.range_errors.push_back(re[t]);
            r.angle_errors.push_back(ae[t]);
        }
    r.median_range_error = median(r.range_errors);
    r.median_angle_error = median(r.angle_errors);
    return r;
}

GainResult run_processing_gain(const Scene& scene, const RadarConfig& cfg, int L_lo, int L_hi, int trials,
                               std::uint64_t base_seed, const DecoderOptions& opt) {
    if (scene.tags.empty()) throw std::invalid_argument("processing gain: scene needs a tag");
    if (L_lo < 1 || L_hi < L_lo || trials < 1) throw std::invalid_argument("processing gain: bad L or trials");
    const int code = scene.tags.front().tag_id;
    GainResult g;
    g.ptn_lo.resize(trials);
    g.ptn_hi.resize(trials);
    parallel_for(trials, [&](int t) {
        // one frame per trial, searched over its first L_lo and all L_hi chirps
        const IQFrameD frame = simulate_frame(scene, cfg, L_hi, base_seed + static_cast<std::uint64_t>(t));
        g.ptn_lo[t] = code_statistic(joint_code_range_search(frame, default_codebook(), L_lo, opt), code);
        g.ptn_hi[t] = code_statistic(joint_code_range_search(frame, default_codebook(), L_hi, opt), code);
    });
    g.median_lo = median(g.ptn_lo);
    g.median_hi = median(g.ptn_hi);
    g.gain_db = g.median_hi - g.median_lo;
    return g;
}

}  // namespace radtag
