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
#include <string>
#include <vector>

#include "radtag/radar.hpp"
#include "radtag/types.hpp"

namespace radtag {

// Dechirped complex samples, [rx][chirp][sample]. Each rx is a chirps x Ns matrix.
template <typename Scalar = double>
struct IQFrame {
    RadarConfig config;
    std::vector<CMatrix<Scalar>> rx;
    std::vector<std::string> warnings;

    IQFrame() = default;
    IQFrame(const RadarConfig& cfg, int n_chirps) : config(cfg) {
        cfg.validate();
        if (n_chirps < 1) throw std::invalid_argument("IQFrame: n_chirps must be >= 1");
        rx.assign(cfg.n_rx, CMatrix<Scalar>::Zero(n_chirps, cfg.samples_per_chirp()));
    }

    int n_rx() const { return static_cast<int>(rx.size()); }
    int n_chirps() const { return rx.empty() ? 0 : static_cast<int>(rx.front().rows()); }
    int n_samples() const { return rx.empty() ? 0 : static_cast<int>(rx.front().cols()); }

    auto chirp(int q, int c) const { return rx.at(q).row(c); }
    auto chirp(int q, int c) { return rx.at(q).row(c); }

    Scalar energy() const {
        Scalar e = 0;
        for (const auto& m : rx) e += m.squaredNorm();
        return e;
    }

    bool all_finite() const {
        for (const auto& m : rx)
            if (!m.allFinite()) return false;
        return true;
    }

    template <typename Other>
    IQFrame<Other> cast() const {
        IQFrame<Other> out;
        out.config = config;
        out.warnings = warnings;
        out.rx.reserve(rx.size());
        for (const auto& m : rx) out.rx.push_back(m.template cast<std::complex<Other>>());
        return out;
    }

    IQFrame& operator+=(const IQFrame& o) {
        if (o.n_rx() != n_rx() || o.n_chirps() != n_chirps() || o.n_samples() != n_samples())
            throw std::invalid_argument("IQFrame: shape mismatch");
        for (size_t q = 0; q < rx.size(); ++q) rx[q] += o.rx[q];
        return *this;
    }
};

using IQFrameD = IQFrame<double>;
using IQFrameF = IQFrame<float>;

}  // namespace radtag
