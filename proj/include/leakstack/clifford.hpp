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


// The 24-element single-qubit Clifford group, generated from the native
// X/2 and Y/2 pulses.

#ifndef LEAKSTACK_CLIFFORD_HPP
#define LEAKSTACK_CLIFFORD_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace leakstack {

using Unitary2 = Eigen::Matrix2cd;

class CliffordGroup {
   public:
    static const CliffordGroup &instance();

    size_t size() const { return elements_.size(); }
    const Unitary2 &unitary(size_t i) const { return elements_.at(i); }
    /// Shortest X/2, Y/2 word producing element i (applied left to right).
    const std::vector<std::string> &decomposition(size_t i) const { return words_.at(i); }
    /// Element equal to "a then b".
    size_t compose(size_t a, size_t b) const { return table_.at(a).at(b); }
    size_t inverse(size_t a) const { return inverse_.at(a); }
    /// Index of u up to global phase; throws InvariantError when u is not a Clifford.
    size_t find(const Unitary2 &u) const;

   private:
    CliffordGroup();

    std::vector<Unitary2> elements_;
    std::vector<std::vector<std::string>> words_;
    std::vector<std::vector<size_t>> table_;
    std::vector<size_t> inverse_;
};

/// Recovery element that returns the product of `sequence` to the identity.
size_t recovery_clifford(const std::vector<size_t> &sequence);

}  // namespace leakstack

#endif  // LEAKSTACK_CLIFFORD_HPP
