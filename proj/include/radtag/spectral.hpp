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

#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "radtag/iq_frame.hpp"
#include "radtag/types.hpp"

namespace radtag {

// kissfft caches twiddles per length, so keep one engine alive per thread.
template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
    thread_local Eigen::FFT<Scalar> engine;
    return engine;
}

template <typename Scalar>
CVector<Scalar> fft(const CVector<Scalar>& x) {
    CVector<Scalar> out(x.size());
    fft_engine<Scalar>().fwd(out, x);
    return out;
}

// Unscaled inverse: ifft(fft(x)) = n * x.
template <typename Scalar>
CVector<Scalar> ifft_unscaled(const CVector<Scalar>& X) {
    auto& eng = fft_engine<Scalar>();
    eng.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    CVector<Scalar> out(X.size());
    eng.inv(out, X);
    eng.ClearFlag(Eigen::FFT<Scalar>::Unscaled);
    return out;
}

template <typename Scalar>
CVector<Scalar> ifft(const CVector<Scalar>& X) {
    return ifft_unscaled(X) / static_cast<Scalar>(X.size());
}

// Zero-padded DFT of one chirp; bin b sits at b * fs / n_points.
template <typename Scalar>
CVector<Scalar> range_fft(const IQFrame<Scalar>& frame, int chirp, int rx, int n_points) {
    if (rx < 0 || rx >= frame.n_rx()) throw std::out_of_range("range_fft: rx index");
    if (chirp < 0 || chirp >= frame.n_chirps()) throw std::out_of_range("range_fft: chirp index");
    if (n_points < frame.n_samples()) throw std::invalid_argument("range_fft: n_points < Ns");
    CVector<Scalar> x = CVector<Scalar>::Zero(n_points);
    x.head(frame.n_samples()) = frame.chirp(rx, chirp).transpose();
    return fft(x);
}

// Rows are range bins (fs/Ns spacing), columns doppler bins (1/(L*T_rep)
// spacing, unshifted so column L-1 is the first negative bin).
template <typename Scalar>
CMatrix<Scalar> range_doppler_map(const IQFrame<Scalar>& frame, int rx) {
    if (frame.n_chirps() < 2) throw std::invalid_argument("range_doppler_map: needs >= 2 chirps");
    if (rx < 0 || rx >= frame.n_rx()) throw std::out_of_range("range_doppler_map: rx index");
    const int L = frame.n_chirps(), Ns = frame.n_samples();
    CMatrix<Scalar> rd(Ns, L);
    for (int c = 0; c < L; ++c) rd.col(c) = range_fft(frame, c, rx, Ns);
    for (int b = 0; b < Ns; ++b) {
        CVector<Scalar> row = rd.row(b).transpose();
        rd.row(b) = fft(row).transpose();
    }
    return rd;
}

inline double doppler_bin_hz(int bin, int n_chirps, const RadarConfig& cfg) {
    int k = bin < (n_chirps + 1) / 2 ? bin : bin - n_chirps;
    return k / (n_chirps * cfg.t_rep());
}

}  // namespace radtag
