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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radtag/types.hpp"

namespace radtag {

using BitSequence = std::vector<std::uint8_t>;

// Fibonacci LFSR. Taps are 1-based register positions; output is stage m.
struct LfsrSpec {
    int m = 5;
    std::vector<int> taps;
    std::uint32_t seed = 1;
};

struct GoldCodebook {
    int m = 0;
    std::array<LfsrSpec, 2> pair;
    // [0] and [1] are the two m-sequences, [2 + s] is a XOR (b advanced by s).
    std::vector<BitSequence> sequences;

    int size() const { return static_cast<int>(sequences.size()); }
    int length() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().size()); }
    const BitSequence& operator[](int id) const { return sequences.at(id); }
};

// Throws std::invalid_argument for a zero seed or taps whose period is not 2^m - 1.
BitSequence lfsr_sequence(const LfsrSpec& spec, int length);

int lfsr_period(const LfsrSpec& spec);

std::array<LfsrSpec, 2> default_preferred_pair(int m);

// Throws std::invalid_argument when the pair fails the three-valued check.
GoldCodebook generate_gold_codebook(int m, const std::array<LfsrSpec, 2>& pair);
GoldCodebook generate_gold_codebook(int m = 5);

// Bits {1,0} mapped to {+1,-1}; r[s] = sum_n a[n] b[(n+s) mod N].
std::vector<int> periodic_crosscorr(const BitSequence& a, const BitSequence& b);

// floor((2^m - 1) / (2^((m+1)/2) + 1))
int max_supported_tags(int m);
// 2^((m-1)/2), the rounded form of the same ratio
int approx_supported_tags(int m);

// 2^((m+1)/2) + 1
int gold_bound(int m);

template <typename Scalar = double>
Vector<Scalar> bipolar(const BitSequence& bits) {
    Vector<Scalar> v(static_cast<Eigen::Index>(bits.size()));
    for (size_t i = 0; i < bits.size(); ++i) v[static_cast<Eigen::Index>(i)] = bits[i] ? Scalar(1) : Scalar(-1);
    return v;
}

// Each chip repeated samples_per_chip times.
template <typename Scalar = double>
Vector<Scalar> upsample_bipolar(const BitSequence& bits, int samples_per_chip) {
    Vector<Scalar> v(static_cast<Eigen::Index>(bits.size()) * samples_per_chip);
    for (size_t i = 0; i < bits.size(); ++i)
        v.segment(static_cast<Eigen::Index>(i) * samples_per_chip, samples_per_chip)
            .setConstant(bits[i] ? Scalar(1) : Scalar(-1));
    return v;
}

std::string to_bit_string(const BitSequence& bits);

}  // namespace radtag
