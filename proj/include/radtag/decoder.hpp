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
#include <limits>
#include <stdexcept>
#include <vector>

#include "radtag/codes.hpp"
#include "radtag/iq_frame.hpp"
#include "radtag/radar.hpp"
#include "radtag/spectral.hpp"
#include "radtag/types.hpp"

namespace radtag {

struct DetectOptions {
    // A cell within guard_bins of a stronger accepted detection must reach
    // cross_ratio of its peak; mismatched Gold codes sit near 9/31 of it.
    double cross_ratio = 0.5;
    int guard_bins = 2;
};

struct DecoderOptions {
    double f_m = 250e3;
    int min_bin = 0;
    int n_bins = -1;            // -1: every bin with f_m + delta below fs/2
    double edge_hz = 0.0;       // raised-cosine band edge width, 0 = rectangular
    bool coherent_fold = true;  // false: single max peak of the sliding correlation
    double excision_kappa = 8.0;  // drop spectral lines above kappa * median |H|; 0 disables
    double threshold_db = 12.0;
    int refine_span = 6;  // fine bins searched each side of the coarse bin
    int aoa_pad = 64;
    DetectOptions detect;
};

struct CodeGeometry {
    int n_chips = 0;
    int samples_per_chip = 0;
    int period = 0;      // samples per code period
    int carrier_bin = 0;  // f_m in coarse bins
    int line_step = 0;   // coarse bins between code lines
    int n_lines = 0;     // lines each side of the carrier
    bool fast = false;   // line-domain search is exact
};

inline CodeGeometry code_geometry(const RadarConfig& cfg, double f_m, int n_chips) {
    CodeGeometry g;
    g.n_chips = n_chips;
    const double spc = cfg.fs / f_m;
    if (std::abs(spc - std::round(spc)) > 1e-9) throw std::invalid_argument("samples per chip must be an integer (fs/f_m)");
    g.samples_per_chip = static_cast<int>(std::lround(spc));
    g.period = n_chips * g.samples_per_chip;
    const int Ns = cfg.samples_per_chirp();
    const double kc = f_m * Ns / cfg.fs;
    g.fast = (Ns % g.period == 0) && std::abs(kc - std::round(kc)) < 1e-9;
    g.carrier_bin = static_cast<int>(std::lround(kc));
    g.line_step = g.fast ? Ns / g.period : 0;
    g.n_lines = n_chips;  // |m| fs / P <= f_m
    return g;
}

inline int default_bin_count(const RadarConfig& cfg, double f_m) {
    const double top = cfg.fs / 2.0 - f_m;  // the carrier copy f_m + delta stays below Nyquist
    const int n = static_cast<int>(std::ceil(top / cfg.coarse_bin_hz() - 1e-9));
    return std::max(n, 1);
}

// Raised-cosine band mask as a function of offset from the band centre f_m + delta.
inline double band_weight(double offset_hz, double f_m, double edge_hz) {
    const double a = std::abs(offset_hz);
    if (a > f_m * (1.0 + 1e-12)) return 0.0;
    if (edge_hz <= 0 || a <= f_m - edge_hz) return 1.0;
    return 0.5 * (1.0 + std::cos(kPi * (a - (f_m - edge_hz)) / edge_hz));
}

// ---- literal pipeline -------------------------------------------------------

template <typename Scalar>
CVector<Scalar> combine_chirps(const IQFrame<Scalar>& frame, int rx, int L) {
    if (L < 1 || L > frame.n_chirps()) throw std::out_of_range("combine_chirps: L out of range");
    if (rx < 0 || rx >= frame.n_rx()) throw std::out_of_range("combine_chirps: rx index");
    const int R = frame.config.repetition_samples(), Ns = frame.n_samples();
    CVector<Scalar> s = CVector<Scalar>::Zero(static_cast<Eigen::Index>(L) * R);
    for (int c = 0; c < L; ++c) s.segment(static_cast<Eigen::Index>(c) * R, Ns) = frame.chirp(rx, c).transpose();
    return s;
}

// Frequency-domain mask per chirp segment keeping [delta, delta + 2 f_m]; gaps stay zero.
template <typename Scalar>
CVector<Scalar> bandpass_positive(const CVector<Scalar>& stream, double f_m, double delta, const RadarConfig& cfg,
                                  double edge_hz = 0.0) {
    if (!(f_m > 0) || f_m > cfg.fs / 4.0 * (1.0 + 1e-12) || delta < 0 || delta >= cfg.fs / 2.0)
        throw std::domain_error("bandpass_positive: band exceeds Nyquist");
    const int R = cfg.repetition_samples(), Ns = cfg.samples_per_chirp();
    CVector<Scalar> out = CVector<Scalar>::Zero(stream.size());
    CVector<Scalar> mask(Ns);
    for (int k = 0; k < Ns; ++k) {
        double f = k * cfg.fs / Ns;
        double off = std::remainder(f - (delta + f_m), cfg.fs);
        mask[k] = static_cast<Scalar>(band_weight(off, f_m, edge_hz));
    }
    for (Eigen::Index start = 0; start < stream.size(); start += R) {
        const Eigen::Index len = std::min<Eigen::Index>(Ns, stream.size() - start);
        CVector<Scalar> seg = CVector<Scalar>::Zero(Ns);
        seg.head(len) = stream.segment(start, len);
        CVector<Scalar> X = fft(seg);
        X.array() *= mask.array();
        out.segment(start, len) = ifft(X).head(len);
    }
    return out;
}

// x[s] = y[s] exp(-j 2 pi delta t_chirp) exp(-j 2 pi f_m t_abs)
template <typename Scalar>
CVector<Scalar> downconvert(const CVector<Scalar>& stream, double f_m, double delta_hyp, const RadarConfig& cfg) {
    const int R = cfg.repetition_samples();
    CVector<Scalar> x(stream.size());
    for (Eigen::Index s = 0; s < stream.size(); ++s) {
        const double n_in = static_cast<double>(s % R);
        const double ph = -2.0 * kPi * (std::fmod(delta_hyp * n_in / cfg.fs, 1.0) + std::fmod(f_m * s / cfg.fs, 1.0));
        x[s] = stream[s] * std::complex<Scalar>(static_cast<Scalar>(std::cos(ph)), static_cast<Scalar>(std::sin(ph)));
    }
    return x;
}

template <typename Scalar>
struct CodeCorrelation {
    CVector<Scalar> sliding;  // sum_n x[l + n] c[n] over one code period
    CVector<Scalar> folded;  // sum_s x[s] c[(s - l) mod P]
    Scalar single_peak = 0;
    Scalar coherent_peak = 0;
    int single_lag = 0;
    int coherent_lag = 0;
};

template <typename Scalar>
CodeCorrelation<Scalar> correlate_with_code(const CVector<Scalar>& x, const BitSequence& code, double f_m, double fs) {
    const double spc_d = fs / f_m;
    if (std::abs(spc_d - std::round(spc_d)) > 1e-9) throw std::invalid_argument("correlate_with_code: non-integral samples per chip");
    const Vector<Scalar> c = upsample_bipolar<Scalar>(code, static_cast<int>(std::lround(spc_d)));
    const Eigen::Index P = c.size();
    CodeCorrelation<Scalar> r;
    const Eigen::Index n_slide = std::max<Eigen::Index>(x.size() - P + 1, 0);
    r.sliding = CVector<Scalar>::Zero(n_slide);
    for (Eigen::Index l = 0; l < n_slide; ++l) {
        std::complex<Scalar> acc = 0;
        for (Eigen::Index n = 0; n < P; ++n) acc += x[l + n] * c[n];
        r.sliding[l] = acc;
    }
    if (n_slide > 0) {
        Eigen::Index lag = 0;
        r.single_peak = r.sliding.cwiseAbs().maxCoeff(&lag);
        r.single_lag = static_cast<int>(lag);
    }

    CVector<Scalar> h = CVector<Scalar>::Zero(P);
    for (Eigen::Index s = 0; s < x.size(); ++s) h[s % P] += x[s];
    r.folded = CVector<Scalar>::Zero(P);
    for (Eigen::Index l = 0; l < P; ++l) {
        std::complex<Scalar> acc = 0;
        for (Eigen::Index p = 0; p < P; ++p) acc += h[p] * c[(p - l + P) % P];
        r.folded[l] = acc;
    }
    Eigen::Index lag = 0;
    r.coherent_peak = r.folded.cwiseAbs().maxCoeff(&lag);
    r.coherent_lag = static_cast<int>(lag);
    return r;
}

// ---- joint search -----------------------------------------------------------

struct CorrelationMatrix {
    Matrix<double> values;  // [hypothesis][code]
    Eigen::MatrixXi lags;
    std::vector<int> bins;  // coarse bin of each hypothesis row
    std::vector<CVector<double>> antenna_peaks;  // row-major [hyp * n_codes + code]
    Vector<double> noise_floor;  // per code
    double noise_var = 0;        // per-sample noise power estimate
    int L = 0;
    double observation_s = 0;

    int n_hyp() const { return static_cast<int>(values.rows()); }
    int n_codes() const { return static_cast<int>(values.cols()); }
    double ptn_db(int h, int k) const {
        const double fl = noise_floor[k];
        if (!(fl > 0)) return values(h, k) > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        return 20.0 * std::log10(values(h, k) / fl);
    }
    const CVector<double>& peaks(int h, int k) const { return antenna_peaks[static_cast<size_t>(h) * n_codes() + k]; }
};

struct Detection {
    int code_id = -1;
    int bin = 0;
    int lag = 0;
    double range_m = 0;
    double angle_deg = 0;
    double corr_peak = 0;
    double peak_to_noise_db = 0;
    double delta_hz = 0;
    CVector<double> antenna_peaks;
};

struct DetectionReport {
    std::vector<Detection> detections;
    double threshold_used = 0;
    double observation_time = 0;
    int L = 0;

    const Detection* find(int code_id) const {
        for (const auto& d : detections)
            if (d.code_id == code_id) return &d;
        return nullptr;
    }
};

namespace detail {

template <typename Scalar>
std::vector<CVector<Scalar>> code_spectra(const GoldCodebook& book, int spc) {
    std::vector<CVector<Scalar>> out;
    for (const auto& code : book.sequences) out.push_back(fft<Scalar>(upsample_bipolar<Scalar>(code, spc).template cast<std::complex<Scalar>>()));
    return out;
}

template <typename Scalar>
double noise_var_estimate(const std::vector<std::vector<CVector<Scalar>>>& spectra, int Ns) {
    std::vector<double> mag2;
    for (const auto& per_rx : spectra)
        for (const auto& X : per_rx)
            for (Eigen::Index i = 0; i < X.size(); ++i) mag2.push_back(std::norm(X[i]));
    if (mag2.empty()) return 0;
    auto mid = mag2.begin() + static_cast<std::ptrdiff_t>(mag2.size() / 2);
    std::nth_element(mag2.begin(), mid, mag2.end());
    return *mid / (std::log(2.0) * Ns);
}

inline double median_in_place(std::vector<double>& v) {
    if (v.empty()) return 0;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Line-domain spectra H[m], m in [-M, M], for one hypothesis and antenna.
// spectra: per chirp DFT of length pad * Ns. offset is added in fine bins.
template <typename Scalar>
void gather_lines(const std::vector<CVector<Scalar>>& spectra, int L, int pad, int Ns, const CodeGeometry& g,
                  double bin_frac, const std::vector<std::complex<Scalar>>& chirp_phasor, const std::vector<Scalar>& weight,
                  double kappa, CVector<Scalar>& H, std::vector<Scalar>* excised_weight) {
    const int M = g.n_lines;
    const int n_fine = pad * Ns;
    // bin_frac in fine bins relative to bin 0: hypothesis position times pad
    const long base = std::lround(bin_frac) + static_cast<long>(pad) * g.carrier_bin;
    H.setZero(2 * M + 1);
    for (int m = -M; m <= M; ++m) {
        const Scalar w = weight[m + M];
        if (w == Scalar(0)) continue;
        long idx = (base + static_cast<long>(pad) * g.line_step * m) % n_fine;
        if (idx < 0) idx += n_fine;
        std::complex<Scalar> acc = 0;
        const std::complex<Scalar>* ph = &chirp_phasor[static_cast<size_t>(m + M) * L];
        for (int c = 0; c < L; ++c) acc += ph[c] * spectra[c][idx];
        H[m + M] = w * acc;
    }
    if (excised_weight) excised_weight->assign(weight.begin(), weight.end());
    if (kappa > 0) {
        std::vector<double> mags;
        for (int i = 0; i <= 2 * M; ++i)
            if (weight[i] != Scalar(0)) mags.push_back(std::abs(H[i]));
        const double med = median_in_place(mags);
        if (med > 0)
            for (int i = 0; i <= 2 * M; ++i)
                if (std::abs(H[i]) > kappa * med) {
                    H[i] = 0;
                    if (excised_weight) (*excised_weight)[i] = 0;
                }
    }
}

// phasor[m][c] = exp(-j 2 pi (m / P + f_m / fs) c R)
template <typename Scalar>
std::vector<std::complex<Scalar>> chirp_phasors(const RadarConfig& cfg, const CodeGeometry& g, double f_m, int L) {
    const int M = g.n_lines;
    const int R = cfg.repetition_samples();
    std::vector<std::complex<Scalar>> ph(static_cast<size_t>(2 * M + 1) * L);
    for (int m = -M; m <= M; ++m)
        for (int c = 0; c < L; ++c) {
            const double cyc = std::fmod(static_cast<double>(m) * c * R / g.period + f_m * c * R / cfg.fs, 1.0);
            ph[static_cast<size_t>(m + M) * L + c] = std::polar(Scalar(1), static_cast<Scalar>(-2.0 * kPi * cyc));
        }
    return ph;
}

template <typename Scalar>
std::vector<Scalar> line_weights(const RadarConfig& cfg, const CodeGeometry& g, double f_m, double edge_hz) {
    const int M = g.n_lines;
    std::vector<Scalar> w(2 * M + 1);
    for (int m = -M; m <= M; ++m) w[m + M] = static_cast<Scalar>(band_weight(m * cfg.fs / g.period, f_m, edge_hz));
    return w;
}

// Correlate lines against one code spectrum: G = (1/P) IDFT(H conj C).
template <typename Scalar>
void correlate_lines(const CVector<Scalar>& H, const CVector<Scalar>& C, const CodeGeometry& g, CVector<Scalar>& buf,
                     CVector<Scalar>& G) {
    const int M = g.n_lines, P = g.period;
    buf.setZero(P);
    for (int m = -M; m <= M; ++m) {
        const int i = ((m % P) + P) % P;
        buf[i] = H[m + M] * std::conj(C[i]);
    }
    G.resize(P);
    auto& eng = fft_engine<Scalar>();
    eng.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    eng.inv(G, buf);
    eng.ClearFlag(Eigen::FFT<Scalar>::Unscaled);
    G /= static_cast<Scalar>(P);
}

template <typename Scalar>
std::vector<std::vector<CVector<Scalar>>> chirp_spectra(const IQFrame<Scalar>& frame, int L, int n_points) {
    std::vector<std::vector<CVector<Scalar>>> out(frame.n_rx());
    for (int q = 0; q < frame.n_rx(); ++q)
        for (int c = 0; c < L; ++c) out[q].push_back(range_fft(frame, c, q, n_points));
    return out;
}

}  // namespace detail

// Literal combine -> bandpass -> downconvert -> correlate for one (bin, code) cell.
// Returns per-antenna folded (or sliding-window) correlations.
template <typename Scalar>
std::vector<CodeCorrelation<Scalar>> reference_cell(const IQFrame<Scalar>& frame, const BitSequence& code, int bin, int L,
                                                    const DecoderOptions& opt) {
    const RadarConfig& cfg = frame.config;
    const double delta = bin * cfg.coarse_bin_hz();
    std::vector<CodeCorrelation<Scalar>> out;
    for (int q = 0; q < frame.n_rx(); ++q) {
        CVector<Scalar> s = combine_chirps(frame, q, L);
        s = bandpass_positive(s, opt.f_m, delta, cfg, opt.edge_hz);
        s = downconvert(s, opt.f_m, delta, cfg);
        out.push_back(correlate_with_code(s, code, opt.f_m, cfg.fs));
    }
    return out;
}

// Non-coherent antenna combination of a reference cell: max_l sqrt(sum_q |G_q(l)|^2).
template <typename Scalar>
double reference_cell_statistic(const std::vector<CodeCorrelation<Scalar>>& cell, bool coherent, int* lag = nullptr) {
    if (cell.empty()) return 0;
    if (!coherent) {
        Vector<double> acc = Vector<double>::Zero(cell.front().sliding.size());
        for (const auto& c : cell) acc += c.sliding.template cast<std::complex<double>>().cwiseAbs2();
        Eigen::Index i = 0;
        double v = acc.size() ? std::sqrt(acc.maxCoeff(&i)) : 0.0;
        if (lag) *lag = static_cast<int>(i);
        return v;
    }
    Vector<double> acc = Vector<double>::Zero(cell.front().folded.size());
    for (const auto& c : cell) acc += c.folded.template cast<std::complex<double>>().cwiseAbs2();
    Eigen::Index i = 0;
    double v = std::sqrt(acc.maxCoeff(&i));
    if (lag) *lag = static_cast<int>(i);
    return v;
}

template <typename Scalar>
CorrelationMatrix joint_code_range_search(const IQFrame<Scalar>& frame, const GoldCodebook& book, int L,
                                          const DecoderOptions& opt = {}) {
    const RadarConfig& cfg = frame.config;
    if (L < 1 || L > frame.n_chirps()) throw std::out_of_range("joint_code_range_search: L out of range");
    const CodeGeometry g = code_geometry(cfg, opt.f_m, book.length());
    const int Ns = frame.n_samples();
    const int n_bins = opt.n_bins > 0 ? opt.n_bins : default_bin_count(cfg, opt.f_m) - opt.min_bin;
    const int K = book.size(), P = g.period, M = g.n_lines, nrx = frame.n_rx();

    CorrelationMatrix cm;
    cm.L = L;
    cm.observation_s = L * cfg.t_rep();
    cm.values = Matrix<double>::Zero(n_bins, K);
    cm.lags = Eigen::MatrixXi::Zero(n_bins, K);
    cm.antenna_peaks.assign(static_cast<size_t>(n_bins) * K, CVector<double>::Zero(nrx));
    for (int h = 0; h < n_bins; ++h) cm.bins.push_back(opt.min_bin + h);

    const auto spectra = detail::chirp_spectra(frame, L, Ns);
    cm.noise_var = detail::noise_var_estimate(spectra, Ns);
    const auto C = detail::code_spectra<Scalar>(book, g.samples_per_chip);
    const auto w = detail::line_weights<Scalar>(cfg, g, opt.f_m, opt.edge_hz);
    std::vector<double> all_stats;

    const bool literal = !g.fast || !opt.coherent_fold;
    if (literal) {
        for (int h = 0; h < n_bins; ++h)
            for (int k = 0; k < K; ++k) {
                auto cell = reference_cell(frame, book[k], cm.bins[h], L, opt);
                int lag = 0;
                cm.values(h, k) = reference_cell_statistic(cell, opt.coherent_fold, &lag);
                cm.lags(h, k) = lag;
                CVector<double>& pk = cm.antenna_peaks[static_cast<size_t>(h) * K + k];
                for (int q = 0; q < nrx; ++q)
                    pk[q] = opt.coherent_fold ? std::complex<double>(cell[q].folded[lag]) : std::complex<double>(cell[q].sliding[lag]);
                all_stats.push_back(cm.values(h, k));
            }
    } else {
        const auto ph = detail::chirp_phasors<Scalar>(cfg, g, opt.f_m, L);
        std::vector<CVector<Scalar>> H(nrx), G(nrx);
        CVector<Scalar> buf;
        Vector<double> s2(P);
        // noise power seen by each code, accumulated over unexcised lines
        Matrix<double> code_noise = Matrix<double>::Zero(n_bins, K);
        std::vector<Scalar> wq;
        for (int h = 0; h < n_bins; ++h) {
            std::vector<double> wsum(2 * M + 1, 0.0);
            for (int q = 0; q < nrx; ++q) {
                detail::gather_lines(spectra[q], L, 1, Ns, g, static_cast<double>(cm.bins[h]), ph, w, opt.excision_kappa, H[q], &wq);
                for (int i = 0; i <= 2 * M; ++i) wsum[i] += static_cast<double>(wq[i]) * wq[i];
            }
            for (int k = 0; k < K; ++k) {
                s2.setZero();
                for (int q = 0; q < nrx; ++q) {
                    detail::correlate_lines(H[q], C[k], g, buf, G[q]);
                    for (int l = 0; l < P; ++l) s2[l] += std::norm(std::complex<double>(G[q][l]));
                }
                Eigen::Index lag = 0;
                const double best = s2.maxCoeff(&lag);
                cm.values(h, k) = std::sqrt(best);
                cm.lags(h, k) = static_cast<int>(lag);
                CVector<double>& pk = cm.antenna_peaks[static_cast<size_t>(h) * K + k];
                for (int q = 0; q < nrx; ++q) pk[q] = std::complex<double>(G[q][lag]);
                for (int l = 0; l < P; l += 4) all_stats.push_back(std::sqrt(s2[l]));
                double e = 0;
                for (int m = -M; m <= M; ++m) e += wsum[m + M] * std::norm(std::complex<double>(C[k][((m % P) + P) % P]));
                code_noise(h, k) = e;
            }
        }
        // E|G|^2 per antenna = L sigma^2 Ns sum w^2 |C|^2 / P^2, summed over antennas via wsum
        cm.noise_floor = Vector<double>::Zero(K);
        for (int k = 0; k < K; ++k) {
            const double mean_e = code_noise.col(k).mean();
            cm.noise_floor[k] = std::sqrt(L * cm.noise_var * Ns * mean_e) / P;
        }
    }
    if (literal) {
        cm.noise_floor = Vector<double>::Zero(K);
        if (opt.coherent_fold) {
            // masked noise folded over L chirps, as in the line-domain path
            for (int k = 0; k < K; ++k) {
                double e = 0;
                for (int m = -M; m <= M; ++m) {
                    const double wm = w[m + M];
                    e += wm * wm * std::norm(std::complex<double>(C[k][((m % P) + P) % P]));
                }
                cm.noise_floor[k] = std::sqrt(nrx * L * cm.noise_var * Ns * e) / P;
            }
        } else {
            // one code period of bandpassed noise: P sigma^2 (sum of squared mask) / Ns
            double wsq = 0;
            for (int k = 0; k < Ns; ++k) {
                const double b = band_weight(std::remainder(k * cfg.fs / Ns - opt.f_m, cfg.fs), opt.f_m, opt.edge_hz);
                wsq += b * b;
            }
            cm.noise_floor.setConstant(std::sqrt(nrx * P * cm.noise_var * wsq / Ns));
        }
    }
    // self-interference guard: half the median correlation level
    const double guard = 0.5 * detail::median_in_place(all_stats);
    for (int k = 0; k < K; ++k) cm.noise_floor[k] = std::max(cm.noise_floor[k], guard);
    return cm;
}

// Greedy over cells in descending order: one detection per code, each at
// or above the threshold and not dominated by a stronger nearby detection.
// cross_ratio = 0 reduces to the per-code best bin.
inline DetectionReport detect(const CorrelationMatrix& cm, double threshold_db, const RadarConfig& cfg,
                              const DetectOptions& dopt = {}) {
    DetectionReport rep;
    rep.threshold_used = threshold_db;
    rep.observation_time = cm.observation_s;
    rep.L = cm.L;
    const int H = cm.n_hyp(), K = cm.n_codes();
    std::vector<std::pair<int, int>> order;
    std::vector<int> best(K, -1);
    for (int k = 0; k < K; ++k)
        for (int h = 0; h < H; ++h)
            if (best[k] < 0 || cm.values(h, k) > cm.values(best[k], k)) best[k] = h;
    if (dopt.cross_ratio > 0) {
        for (int h = 0; h < H; ++h)
            for (int k = 0; k < K; ++k)
                if (cm.ptn_db(h, k) >= threshold_db) order.emplace_back(h, k);
    } else {
        for (int k = 0; k < K; ++k)
            if (best[k] >= 0 && cm.ptn_db(best[k], k) >= threshold_db) order.emplace_back(best[k], k);
    }
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        const double va = cm.values(a.first, a.second), vb = cm.values(b.first, b.second);
        if (va != vb) return va > vb;
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    std::vector<bool> taken(K, false);
    for (auto [h, k] : order) {
        if (taken[k]) continue;
        const double v = cm.values(h, k);
        bool dominated = false;
        for (const auto& d : rep.detections)
            if (std::abs(d.bin - cm.bins[h]) <= dopt.guard_bins && v < dopt.cross_ratio * d.corr_peak) dominated = true;
        if (dominated) continue;
        taken[k] = true;
        Detection d;
        d.code_id = k;
        d.bin = cm.bins[h];
        d.lag = cm.lags(h, k);
        d.corr_peak = v;
        d.peak_to_noise_db = cm.ptn_db(h, k);
        d.delta_hz = d.bin * cfg.coarse_bin_hz();
        d.range_m = range_from_frequency(d.delta_hz, cfg);
        d.antenna_peaks = cm.peaks(h, k);
        rep.detections.push_back(std::move(d));
    }
    return rep;
}

// Global argmax of the matrix, ties toward smaller bin then smaller code.
inline std::pair<int, int> matrix_argmax(const CorrelationMatrix& cm) {
    int bh = 0, bk = 0;
    for (int h = 0; h < cm.n_hyp(); ++h)
        for (int k = 0; k < cm.n_codes(); ++k)
            if (cm.values(h, k) > cm.values(bh, bk)) bh = h, bk = k;
    return {bh, bk};
}

inline double estimate_aoa(const CVector<double>& peaks, const RadarConfig& cfg, int pad = 64) {
    const int n = static_cast<int>(peaks.size());
    if (n < 2) throw std::invalid_argument("estimate_aoa: needs at least 2 antennas");
    pad = std::max(pad, n);
    CVector<double> x = CVector<double>::Zero(pad);
    x.head(n) = peaks;
    const CVector<double> X = fft(x);
    Eigen::Index k = 0;
    X.cwiseAbs2().maxCoeff(&k);
    const int kk = k < pad / 2 ? static_cast<int>(k) : static_cast<int>(k) - pad;
    const double s = std::clamp(kk / (pad * cfg.rx_spacing), -1.0, 1.0);
    return std::asin(s) * 180.0 / kPi;
}

struct RefineResult {
    double delta_hz = 0;
    double range_m = 0;
    double peak = 0;
    CVector<double> antenna_peaks;
};

// Matched-comb search on the fft_pad zero-padded chirp spectra around the coarse bin,
// with parabolic interpolation of the peak statistic.
template <typename Scalar>
RefineResult refine_range(const std::vector<std::vector<CVector<Scalar>>>& fine_spectra, const Detection& det,
                          const GoldCodebook& book, const RadarConfig& cfg, int L, const DecoderOptions& opt = {}) {
    if (det.code_id < 0 || det.code_id >= book.size()) throw std::invalid_argument("refine_range: detection absent");
    const CodeGeometry g = code_geometry(cfg, opt.f_m, book.length());
    if (!g.fast) throw std::invalid_argument("refine_range: configuration needs an integral line grid");
    const int pad = cfg.fft_pad, Ns = cfg.samples_per_chirp(), P = g.period, nrx = static_cast<int>(fine_spectra.size());
    const auto ph = detail::chirp_phasors<Scalar>(cfg, g, opt.f_m, L);
    const auto w = detail::line_weights<Scalar>(cfg, g, opt.f_m, opt.edge_hz);
    const CVector<Scalar> C = fft<Scalar>(upsample_bipolar<Scalar>(book[det.code_id], g.samples_per_chip).template cast<std::complex<Scalar>>());
    const int span = opt.refine_span;
    std::vector<double> stat(2 * span + 1, 0.0);
    std::vector<CVector<double>> pk(2 * span + 1, CVector<double>::Zero(nrx));
    CVector<Scalar> H, buf;
    std::vector<CVector<Scalar>> G(nrx);
    for (int d = -span; d <= span; ++d) {
        const double pos = static_cast<double>(det.bin) * pad + d;
        if (pos < 0) continue;
        Vector<double> s2 = Vector<double>::Zero(P);
        for (int q = 0; q < nrx; ++q) {
            detail::gather_lines(fine_spectra[q], L, pad, Ns, g, pos, ph, w, opt.excision_kappa, H, static_cast<std::vector<Scalar>*>(nullptr));
            detail::correlate_lines(H, C, g, buf, G[q]);
            for (int l = 0; l < P; ++l) s2[l] += std::norm(std::complex<double>(G[q][l]));
        }
        Eigen::Index lag = 0;
        stat[d + span] = std::sqrt(s2.maxCoeff(&lag));
        for (int q = 0; q < nrx; ++q) pk[d + span][q] = std::complex<double>(G[q][lag]);
    }
    int bi = 0;
    for (int i = 1; i <= 2 * span; ++i)
        if (stat[i] > stat[bi]) bi = i;
    double frac = 0;
    if (bi > 0 && bi < 2 * span && stat[bi - 1] > 0) {
        const double a = stat[bi - 1], b = stat[bi], c = stat[bi + 1];
        const double den = a - 2 * b + c;
        if (den < 0) frac = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
    }
    RefineResult r;
    r.peak = stat[bi];
    r.antenna_peaks = pk[bi];
    const double fine_pos = static_cast<double>(det.bin) * pad + (bi - span) + frac;
    r.delta_hz = std::max(0.0, fine_pos * cfg.fs / (static_cast<double>(Ns) * pad));
    r.range_m = range_from_frequency(r.delta_hz, cfg);
    return r;
}

template <typename Scalar>
RefineResult refine_range(const IQFrame<Scalar>& frame, const Detection& det, const GoldCodebook& book, int L,
                          const DecoderOptions& opt = {}) {
    const auto spectra = detail::chirp_spectra(frame, L, frame.n_samples() * frame.config.fft_pad);
    return refine_range(spectra, det, book, frame.config, L, opt);
}

// Search, threshold, then refine range and angle of every detection.
template <typename Scalar>
DetectionReport decode(const IQFrame<Scalar>& frame, const GoldCodebook& book, int L, const DecoderOptions& opt = {},
                       CorrelationMatrix* matrix_out = nullptr) {
    CorrelationMatrix cm = joint_code_range_search(frame, book, L, opt);
    DetectionReport rep = detect(cm, opt.threshold_db, frame.config, opt.detect);
    if (!rep.detections.empty() && code_geometry(frame.config, opt.f_m, book.length()).fast) {
        const auto spectra = detail::chirp_spectra(frame, L, frame.n_samples() * frame.config.fft_pad);
        for (auto& d : rep.detections) {
            RefineResult r = refine_range(spectra, d, book, frame.config, L, opt);
            d.delta_hz = r.delta_hz;
            d.range_m = r.range_m;
            if (frame.n_rx() >= 2) d.angle_deg = estimate_aoa(r.antenna_peaks, frame.config, opt.aoa_pad);
        }
    } else {
        for (auto& d : rep.detections)
            if (frame.n_rx() >= 2) d.angle_deg = estimate_aoa(d.antenna_peaks, frame.config, opt.aoa_pad);
    }
    if (matrix_out) *matrix_out = std::move(cm);
    return rep;
}

}  // namespace radtag
