// Copyright 2026 The vibronic Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <vector>

#include "vibronic/model.hpp"

namespace vibronic::circuit {

struct ScheduleStep {
    enum class Kind { compute, phase, release };

    Kind kind;
    // Factor sequence of the monomial this step concerns, nondecreasing modes.
    std::vector<std::size_t> factors;

    unsigned degree() const noexcept { return static_cast<unsigned>(factors.size()); }
    // For `compute`: the cached prefix (degree - 1) and the mode multiplied in.
    std::vector<std::size_t> parent() const { return {factors.begin(), factors.end() - 1}; }
    std::size_t new_factor() const { return factors.back(); }

    bool operator==(const ScheduleStep&) const = default;
};

// Orders the exponentials of a set of monomials. The constant and linear
// terms come first; they need no product register. Higher-degree monomials
// are visited depth-first over the prefix tree: each degree-L product is
// formed from the live degree-(L-1) prefix and released when the traversal
// leaves its subtree, so at most one product per degree is live.
//
// With `caching` off every monomial is built from its modes and released
// immediately after its phase.
inline std::vector<ScheduleStep> schedule_monomials(const std::set<MultiIndex>& terms, bool caching = true) {
    using Kind = ScheduleStep::Kind;
    std::vector<ScheduleStep> out;

    std::set<std::vector<std::size_t>> higher;  // degree >= 2 factor sequences
    for (const auto& t : terms) {
        if (t.degree() < 2)
            out.push_back({Kind::phase, t.factors()});
        else
            higher.insert(t.factors());
    }

    if (!caching) {
        for (const auto& seq : higher) {
            for (std::size_t l = 2; l <= seq.size(); ++l)
                out.push_back({Kind::compute, {seq.begin(), seq.begin() + l}});
            out.push_back({Kind::phase, seq});
            for (std::size_t l = seq.size(); l >= 2; --l)
                out.push_back({Kind::release, {seq.begin(), seq.begin() + l}});
        }
        return out;
    }

    // Every degree >= 2 prefix becomes a node; lexicographic order is a
    // preorder traversal of the prefix tree.
    std::set<std::vector<std::size_t>> nodes;
    for (const auto& seq : higher)
        for (std::size_t l = 2; l <= seq.size(); ++l) nodes.insert({seq.begin(), seq.begin() + l});

    auto is_prefix = [](const std::vector<std::size_t>& p, const std::vector<std::size_t>& s) {
        return p.size() < s.size() && std::equal(p.begin(), p.end(), s.begin());
    };

    std::vector<std::vector<std::size_t>> stack;
    for (const auto& node : nodes) {
        while (!stack.empty() && !is_prefix(stack.back(), node)) {
            out.push_back({Kind::release, stack.back()});
            stack.pop_back();
        }
        out.push_back({Kind::compute, node});
        stack.push_back(node);
        if (higher.count(node)) out.push_back({Kind::phase, node});
    }
    while (!stack.empty()) {
        out.push_back({Kind::release, stack.back()});
        stack.pop_back();
    }
    return out;
}

}  // namespace vibronic::circuit
