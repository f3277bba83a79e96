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

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "vibronic/error.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/sim/state.hpp"

namespace vibronic::sim {

// exp(i t H) on the dense grid Hamiltonian through one Hermitian
// eigendecomposition, reusable for any number of times.
class ExactPropagator {
  public:
    ExactPropagator(const VibronicModel& m, const GridConfig& g, bool include_v0 = true) : shape_(m, g) {
        checked_dimension(m, g, dense_dimension_cap, "exact propagator");
        const Eigen::MatrixXcd H = build_hamiltonian(m, g, include_v0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian eigendecomposition failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    const SystemShape& shape() const noexcept { return shape_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    const Eigen::MatrixXcd& eigenvectors() const noexcept { return vectors_; }

    // Coefficients of `s` in the eigenbasis.
    Eigen::VectorXcd to_eigenbasis(const StateVector& s) const { return vectors_.adjoint() * s.as_eigen(); }

    StateVector from_eigenbasis(const Eigen::VectorXcd& c) const {
        StateVector out(shape_);
        out.as_eigen() = vectors_ * c;
        return out;
    }

    // exp(i t H) s
    StateVector evolve(const StateVector& s, double t) const {
        if (s.size() != shape_.dim()) throw ValidationError("state size does not match the propagator");
        Eigen::VectorXcd c = to_eigenbasis(s);
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, t * energies_[i]);
        return from_eigenbasis(c);
    }

    Eigen::MatrixXcd unitary(double t) const {
        Eigen::VectorXcd phases(energies_.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, t * energies_[i]);
        return vectors_ * phases.asDiagonal() * vectors_.adjoint();
    }

  private:
    SystemShape shape_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

inline StateVector exact_evolve(const VibronicModel& m, const GridConfig& g, double t, const StateVector& s,
                                bool include_v0 = true) {
    return ExactPropagator(m, g, include_v0).evolve(s, t);
}

}  // namespace vibronic::sim
