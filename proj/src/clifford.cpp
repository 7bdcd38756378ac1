// Copyright 2026 The leakstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "leakstack/clifford.hpp"

#include <cmath>
#include <complex>
#include <deque>

#include "leakstack/errors.hpp"

namespace leakstack {

namespace {

// Global phase fixed by making the first sizeable entry real and positive.
Unitary2 canonical(const Unitary2 &u) {
    for (int k = 0; k < 4; ++k) {
        const std::complex<double> z = u(k % 2, k / 2);
        if (std::abs(z) > 1e-6) return u * std::polar(1.0, -std::arg(z));
    }
    return u;
}

bool same(const Unitary2 &a, const Unitary2 &b) {
    return (canonical(a) - canonical(b)).cwiseAbs().maxCoeff() < 1e-9;
}

Unitary2 rotation(char axis) {
    const double s = std::sqrt(0.5);
    const std::complex<double> i(0, 1);
    Unitary2 u;
    if (axis == 'x') {
        u << s, -i * s, -i * s, s;
    } else {
        u << s, -s, s, s;
    }
    return u;
}

}  // namespace

CliffordGroup::CliffordGroup() {
    const std::pair<std::string, Unitary2> gens[] = {{"X/2", rotation('x')}, {"Y/2", rotation('y')}};
    elements_.push_back(Unitary2::Identity());
    words_.push_back({});
    std::deque<size_t> frontier{0};
    while (!frontier.empty()) {
        const size_t cur = frontier.front();
        frontier.pop_front();
        for (const auto &[name, g] : gens) {
            const Unitary2 next = g * elements_[cur];
            bool known = false;
            for (const auto &e : elements_) known = known || same(e, next);
            if (known) continue;
            elements_.push_back(canonical(next));
            auto word = words_[cur];
            word.push_back(name);
            words_.push_back(std::move(word));
            frontier.push_back(elements_.size() - 1);
        }
    }
    if (elements_.size() != 24) throw InvariantError("Clifford group generation produced the wrong order");
    const size_t n = elements_.size();
    table_.assign(n, std::vector<size_t>(n, 0));
    inverse_.assign(n, 0);
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) table_[a][b] = find(elements_[b] * elements_[a]);
        inverse_[a] = find(elements_[a].adjoint());
    }
}

const CliffordGroup &CliffordGroup::instance() {
    static const CliffordGroup group;
    return group;
}

size_t CliffordGroup::find(const Unitary2 &u) const {
    for (size_t i = 0; i < elements_.size(); ++i) {
        if (same(elements_[i], u)) return i;
    }
    throw InvariantError("recovery Clifford lookup failed");
}

size_t recovery_clifford(const std::vector<size_t> &sequence) {
    const auto &group = CliffordGroup::instance();
    size_t total = 0;
    for (size_t c : sequence) total = group.compose(total, c);
    return group.inverse(total);
}

}  // namespace leakstack
