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

#include "radtag/codes.hpp"

#include <cstdlib>
#include <set>
#include <stdexcept>

namespace radtag {

namespace {

struct Register {
    int m;
    std::uint32_t state;
    std::uint32_t tap_mask = 0;

    Register(const LfsrSpec& spec) : m(spec.m), state(spec.seed) {
        if (spec.m < 2 || spec.m > 31) throw std::invalid_argument("lfsr: m out of range");
        if (spec.seed == 0 || (spec.seed >> spec.m) != 0) throw std::invalid_argument("lfsr: seed must be a nonzero m-bit value");
        if (spec.taps.empty()) throw std::invalid_argument("lfsr: no taps");
        for (int t : spec.taps) {
            if (t < 1 || t > spec.m) throw std::invalid_argument("lfsr: tap out of range");
            tap_mask |= 1u << (t - 1);
        }
    }

    // bit i of state is stage i+1
    std::uint8_t step() {
        std::uint8_t out = (state >> (m - 1)) & 1u;
        std::uint32_t fb = __builtin_parity(state & tap_mask);
        state = ((state << 1) | fb) & ((1u << m) - 1u);
        return out;
    }
};

}  // namespace

int lfsr_period(const LfsrSpec& spec) {
    Register r(spec);
    const std::uint32_t start = r.state;
    const int limit = 1 << spec.m;
    for (int n = 1; n <= limit; ++n) {
        r.step();
        if (r.state == start) return n;
    }
    return 0;
}

BitSequence lfsr_sequence(const LfsrSpec& spec, int length) {
    if (length < 0) throw std::invalid_argument("lfsr: negative length");
    if (lfsr_period(spec) != (1 << spec.m) - 1) throw std::invalid_argument("lfsr: taps are not primitive");
    Register r(spec);
    BitSequence out(static_cast<size_t>(length));
    for (auto& b : out) b = r.step();
    return out;
}

std::array<LfsrSpec, 2> default_preferred_pair(int m) {
    switch (m) {
        case 3: return {LfsrSpec{3, {3, 2}, 1}, LfsrSpec{3, {3, 1}, 1}};
        case 5: return {LfsrSpec{5, {5, 3}, 1}, LfsrSpec{5, {5, 4, 3, 2}, 1}};
        case 7: return {LfsrSpec{7, {7, 4}, 1}, LfsrSpec{7, {7, 6, 5, 4}, 1}};
        default: throw std::invalid_argument("no default preferred pair for this m");
    }
}

int gold_bound(int m) { return (1 << ((m + 1) / 2)) + 1; }

std::vector<int> periodic_crosscorr(const BitSequence& a, const BitSequence& b) {
    if (a.size() != b.size()) throw std::invalid_argument("periodic_crosscorr: length mismatch");
    const size_t n = a.size();
    std::vector<int> r(n, 0);
    for (size_t s = 0; s < n; ++s) {
        int acc = 0;
        for (size_t i = 0; i < n; ++i) acc += (a[i] == b[(i + s) % n]) ? 1 : -1;
        r[s] = acc;
    }
    return r;
}

GoldCodebook generate_gold_codebook(int m, const std::array<LfsrSpec, 2>& pair) {
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("gold codebook needs odd m >= 3");
    if (pair[0].m != m || pair[1].m != m) throw std::invalid_argument("gold codebook: register length mismatch");
    const int n = (1 << m) - 1;
    GoldCodebook book;
    book.m = m;
    book.pair = pair;
    const BitSequence a = lfsr_sequence(pair[0], n);
    const BitSequence b = lfsr_sequence(pair[1], n);

    const int bound = gold_bound(m);
    std::set<int> vals;
    for (int v : periodic_crosscorr(a, b)) vals.insert(v);
    if (vals.size() > 3 || std::abs(*vals.begin()) > bound || std::abs(*vals.rbegin()) > bound)
        throw std::invalid_argument("gold codebook: pair is not preferred");

    book.sequences.push_back(a);
    book.sequences.push_back(b);
    for (int s = 0; s < n; ++s) {
        BitSequence g(n);
        for (int i = 0; i < n; ++i) g[i] = a[i] ^ b[(i + s) % n];
        book.sequences.push_back(std::move(g));
    }
    return book;
}

GoldCodebook generate_gold_codebook(int m) { return generate_gold_codebook(m, default_preferred_pair(m)); }

int max_supported_tags(int m) {
    if (m < 3 || m % 2 == 0) throw std::domain_error("max_supported_tags: needs odd m >= 3");
    return ((1 << m) - 1) / gold_bound(m);
}

int approx_supported_tags(int m) {
    if (m < 3 || m % 2 == 0) throw std::domain_error("approx_supported_tags: needs odd m >= 3");
    return 1 << ((m - 1) / 2);
}

std::string to_bit_string(const BitSequence& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

}  // namespace radtag
