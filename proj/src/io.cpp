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

#include "radtag/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radtag {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T def) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return def;
    return it->get<T>();
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
    return v;
}

}  // namespace

std::string fmt_num(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s(buf);
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s = std::string(buf[0] == '-' ? buf + 1 : buf);
    return s;
}

Json to_json(const RadarConfig& c) {
    return Json{{"fc", c.fc},         {"bandwidth", c.bandwidth}, {"t_chirp", c.t_chirp},     {"t_gap", c.t_gap},
                {"fs", c.fs},         {"n_rx", c.n_rx},           {"rx_spacing", c.rx_spacing}, {"fft_pad", c.fft_pad},
                {"pt_dbm", c.pt_dbm}, {"gain_dbi", c.gain_dbi},   {"nf_db", c.nf_db},         {"system_gain_db", c.system_gain_db}};
}

RadarConfig radar_config_from_json(const Json& j) {
    RadarConfig c;
    c.fc = get_or(j, "fc", c.fc);
    c.bandwidth = get_or(j, "bandwidth", c.bandwidth);
    c.t_chirp = get_or(j, "t_chirp", c.t_chirp);
    c.t_gap = get_or(j, "t_gap", c.t_gap);
    c.fs = get_or(j, "fs", c.fs);
    c.n_rx = get_or(j, "n_rx", c.n_rx);
    c.rx_spacing = get_or(j, "rx_spacing", c.rx_spacing);
    c.fft_pad = get_or(j, "fft_pad", c.fft_pad);
    c.pt_dbm = get_or(j, "pt_dbm", c.pt_dbm);
    c.gain_dbi = get_or(j, "gain_dbi", c.gain_dbi);
    c.nf_db = get_or(j, "nf_db", c.nf_db);
    c.system_gain_db = get_or(j, "system_gain_db", c.system_gain_db);
    c.validate();
    return c;
}

Json to_json(const TagSpec& t) {
    Json j{{"tag_id", t.tag_id}, {"scheme", to_string(t.scheme)}, {"f_m", t.f_m},         {"f_mod", t.f_mod},
           {"code_phase", nullptr}, {"range_m", t.range_m},        {"angle_deg", t.angle_deg}, {"velocity", t.velocity},
           {"rcs_dbsm", t.rcs_dbsm}, {"snr_db", nullptr},          {"off_leakage_db", nullptr}};
    if (t.code_phase) j["code_phase"] = *t.code_phase;
    if (t.snr_db) j["snr_db"] = *t.snr_db;
    if (t.off_leakage_db) j["off_leakage_db"] = *t.off_leakage_db;
    return j;
}

TagSpec tag_from_json(const Json& j) {
    TagSpec t;
    t.tag_id = get_or(j, "tag_id", t.tag_id);
    t.scheme = scheme_from_string(get_or<std::string>(j, "scheme", to_string(t.scheme)));
    t.f_m = get_or(j, "f_m", t.f_m);
    t.f_mod = get_or(j, "f_mod", t.f_mod);
    t.code_phase = get_opt<double>(j, "code_phase");
    t.range_m = get_or(j, "range_m", t.range_m);
    t.angle_deg = get_or(j, "angle_deg", t.angle_deg);
    t.velocity = get_or(j, "velocity", t.velocity);
    t.rcs_dbsm = get_or(j, "rcs_dbsm", t.rcs_dbsm);
    t.snr_db = get_opt<double>(j, "snr_db");
    t.off_leakage_db = get_opt<double>(j, "off_leakage_db");
    return t;
}

Json to_json(const ClutterObject& c) {
    Json j{{"range_m", c.range_m}, {"angle_deg", c.angle_deg}, {"velocity", c.velocity}, {"rcs_dbsm", c.rcs_dbsm}, {"snr_db", nullptr}};
    if (c.snr_db) j["snr_db"] = *c.snr_db;
    return j;
}

ClutterObject clutter_from_json(const Json& j) {
    ClutterObject c;
    c.range_m = get_or(j, "range_m", c.range_m);
    c.angle_deg = get_or(j, "angle_deg", c.angle_deg);
    c.velocity = get_or(j, "velocity", c.velocity);
    c.rcs_dbsm = get_or(j, "rcs_dbsm", c.rcs_dbsm);
    c.snr_db = get_opt<double>(j, "snr_db");
    c.validate();
    return c;
}

Json to_json(const Scene& s) {
    Json tags = Json::array(), clutter = Json::array();
    for (const auto& t : s.tags) tags.push_back(to_json(t));
    for (const auto& c : s.clutter) clutter.push_back(to_json(c));
    return Json{{"tags", tags},
                {"clutter", clutter},
                {"noise_enabled", s.noise_enabled},
                {"rng_seed", s.rng_seed},
                {"waveform", to_string(s.waveform)},
                {"tone", to_string(s.tone)},
                {"fov_half_deg", s.fov_half_deg},
                {"fov_taper_db_per_deg", s.fov_taper_db_per_deg}};
}

Scene scene_from_json(const Json& j) {
    Scene s;
    if (j.contains("tags"))
        for (const auto& t : j.at("tags")) s.tags.push_back(tag_from_json(t));
    if (j.contains("clutter"))
        for (const auto& c : j.at("clutter")) s.clutter.push_back(clutter_from_json(c));
    s.noise_enabled = get_or(j, "noise_enabled", s.noise_enabled);
    s.rng_seed = get_or<std::uint64_t>(j, "rng_seed", s.rng_seed);
    s.waveform = waveform_from_string(get_or<std::string>(j, "waveform", to_string(s.waveform)));
    s.tone = tone_from_string(get_or<std::string>(j, "tone", to_string(s.tone)));
    s.fov_half_deg = get_or(j, "fov_half_deg", s.fov_half_deg);
    s.fov_taper_db_per_deg = get_or(j, "fov_taper_db_per_deg", s.fov_taper_db_per_deg);
    if (s.tags.empty() && s.clutter.empty() && !s.noise_enabled)
        throw std::invalid_argument("scene: needs a scatterer or noise");
    return s;
}

Json to_json(const DecoderOptions& o) {
    return Json{{"f_m", o.f_m},
                {"min_bin", o.min_bin},
                {"n_bins", o.n_bins},
                {"edge_hz", o.edge_hz},
                {"coherent_fold", o.coherent_fold},
                {"excision_kappa", o.excision_kappa},
                {"threshold_db", o.threshold_db},
                {"refine_span", o.refine_span},
                {"aoa_pad", o.aoa_pad},
                {"cross_ratio", o.detect.cross_ratio},
                {"guard_bins", o.detect.guard_bins}};
}

DecoderOptions decoder_options_from_json(const Json& j) {
    DecoderOptions o;
    o.f_m = get_or(j, "f_m", o.f_m);
    o.min_bin = get_or(j, "min_bin", o.min_bin);
    o.n_bins = get_or(j, "n_bins", o.n_bins);
    o.edge_hz = get_or(j, "edge_hz", o.edge_hz);
    o.coherent_fold = get_or(j, "coherent_fold", o.coherent_fold);
    o.excision_kappa = get_or(j, "excision_kappa", o.excision_kappa);
    o.threshold_db = get_or(j, "threshold_db", o.threshold_db);
    o.refine_span = get_or(j, "refine_span", o.refine_span);
    o.aoa_pad = get_or(j, "aoa_pad", o.aoa_pad);
    o.detect.cross_ratio = get_or(j, "cross_ratio", o.detect.cross_ratio);
    o.detect.guard_bins = get_or(j, "guard_bins", o.detect.guard_bins);
    if (o.min_bin < 0 || o.refine_span < 0 || o.aoa_pad < 1 || o.excision_kappa < 0)
        throw std::invalid_argument("decoder options out of range");
    return o;
}

Json to_json(const GoldCodebook& book) {
    Json seqs = Json::array();
    for (const auto& s : book.sequences) seqs.push_back(to_bit_string(s));
    Json pair = Json::array();
    for (const auto& p : book.pair) pair.push_back(Json{{"m", p.m}, {"taps", p.taps}, {"seed", p.seed}});
    return Json{{"m", book.m},
                {"length", book.length()},
                {"count", book.size()},
                {"preferred_pair", pair},
                {"id_rule", "0: first m-sequence, 1: second, 2+s: first XOR second advanced by s"},
                {"sequences", seqs}};
}

Json to_json(const DetectionReport& rep) {
    Json dets = Json::array();
    for (const auto& d : rep.detections)
        dets.push_back(Json{{"code_id", d.code_id},
                            {"range_m", std::stod(fmt_num(d.range_m, 4))},
                            {"angle_deg", std::stod(fmt_num(d.angle_deg, 3))},
                            {"corr_peak", std::stod(fmt_num(d.corr_peak, 4))},
                            {"peak_to_noise_db", std::stod(fmt_num(d.peak_to_noise_db, 3))},
                            {"bin", d.bin},
                            {"lag", d.lag}});
    return Json{{"detections", dets},
                {"threshold_used", rep.threshold_used},
                {"observation_time", std::stod(fmt_num(rep.observation_time, 6))},
                {"chirps", rep.L}};
}

std::string report_csv(const DetectionReport& rep) {
    std::string out = "code_id,range_m,angle_deg,corr_peak,ptn_db,observation_ms\n";
    for (const auto& d : rep.detections)
        out += std::to_string(d.code_id) + "," + fmt_num(d.range_m, 4) + "," + fmt_num(d.angle_deg, 3) + "," +
               fmt_num(d.corr_peak, 4) + "," + fmt_num(d.peak_to_noise_db, 3) + "," +
               fmt_num(rep.observation_time * 1e3, 3) + "\n";
    return out;
}

void write_iq(const std::string& path, const IQFrameF& frame) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_iq: cannot open " + path);
    for (const auto& m : frame.rx)
        for (Eigen::Index c = 0; c < m.rows(); ++c)
            for (Eigen::Index n = 0; n < m.cols(); ++n) {
                const float parts[2] = {m(c, n).real(), m(c, n).imag()};
                for (float v : parts) {
                    std::uint32_t u;
                    std::memcpy(&u, &v, 4);
                    u = to_le(u);
                    f.write(reinterpret_cast<const char*>(&u), 4);
                }
            }
    if (!f) throw std::runtime_error("write_iq: write failed for " + path);
    Json side{{"format", "float32-le-interleaved"},
              {"layout", "rx,chirp,sample"},
              {"n_rx", frame.n_rx()},
              {"n_chirps", frame.n_chirps()},
              {"n_samples", frame.n_samples()},
              {"radar", to_json(frame.config)},
              {"warnings", frame.warnings}};
    write_text(path + ".json", side.dump(2) + "\n");
}

IQFrameF read_iq(const std::string& path) {
    const Json side = read_json(path + ".json");
    RadarConfig cfg = radar_config_from_json(side.at("radar"));
    const int nrx = side.at("n_rx").get<int>(), L = side.at("n_chirps").get<int>(), Ns = side.at("n_samples").get<int>();
    if (nrx != cfg.n_rx || Ns != cfg.samples_per_chirp()) throw std::runtime_error("read_iq: sidecar dimensions disagree with radar config");
    IQFrameF frame(cfg, L);
    if (side.contains("warnings")) frame.warnings = side.at("warnings").get<std::vector<std::string>>();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_iq: cannot open " + path);
    for (auto& m : frame.rx)
        for (Eigen::Index c = 0; c < m.rows(); ++c)
            for (Eigen::Index n = 0; n < m.cols(); ++n) {
                float parts[2];
                for (float& v : parts) {
                    std::uint32_t u;
                    if (!f.read(reinterpret_cast<char*>(&u), 4)) throw std::runtime_error("read_iq: truncated file " + path);
                    u = to_le(u);
                    std::memcpy(&v, &u, 4);
                }
                m(c, n) = {parts[0], parts[1]};
            }
    return frame;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

Json read_json(const std::string& path) { return Json::parse(read_text(path)); }

}  // namespace radtag
