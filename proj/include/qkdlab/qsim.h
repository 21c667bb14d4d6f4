// Copyright 2026 The qkdlab Authors
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

#ifndef QKDLAB_QSIM_H
#define QKDLAB_QSIM_H

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/rng.h"

/// Exact dense statevector and density-matrix engine for up to eight qubits.
///
/// Qubit position 0 is the leftmost ket label, i.e. the most significant bit
/// of a basis index. |q0 q1 ... q(n-1)> has index sum_k q_k * 2^(n-1-k).
namespace qkdlab::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 8;
inline constexpr double kInvariantTolerance = 1e-10;

struct QsimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Qubit counts, positions or permutation sizes that do not line up.
struct DimensionError : QsimError {
    using QsimError::QsimError;
};

enum class BellLabel : uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kAllBellLabels = {
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

std::string_view to_string(BellLabel label);

/// Rect = {0 deg, 90 deg} = {|0>, |1>}; Diag = {45 deg, 135 deg}.
enum class Basis : uint8_t { Rect = 0, Diag = 1 };

std::string_view to_string(Basis basis);

enum class Rotation : uint8_t { Forward, Inverse };

class StateVector {
   public:
    /// Computational basis state |index> on num_qubits qubits.
    static StateVector basis_state(int num_qubits, uint64_t index);

    /// Throws DimensionError unless the length is 2^n with 1 <= n <= 8, and
    /// QsimError unless the amplitudes are normalized within 1e-10.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    int num_qubits() const {
        return num_qubits_;
    }
    size_t dimension() const {
        return amplitudes_.size();
    }
    std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    Complex amplitude(uint64_t index) const {
        return amplitudes_.at(index);
    }
    double norm() const;

    bool approx_equal(const StateVector &other, double tolerance) const;

    /// Ket notation, e.g. "0.5|0000> + 0.5|0011>"; zero amplitudes omitted.
    std::string str() const;

   private:
    StateVector(int num_qubits, std::vector<Complex> amplitudes)
        : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    }

    friend class Engine;

    int num_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Row-major 2^n x 2^n density matrix.
class DensityMatrix {
   public:
    static DensityMatrix from_state(const StateVector &state);

    /// Throws unless the entries form a Hermitian, unit-trace, positive
    /// semidefinite matrix within 1e-10.
    static DensityMatrix from_entries(int num_qubits, std::vector<Complex> entries);

    /// identity / 2^n.
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const {
        return num_qubits_;
    }
    size_t dimension() const {
        return size_t{1} << num_qubits_;
    }
    Complex entry(size_t row, size_t col) const {
        return entries_.at(row * dimension() + col);
    }
    std::span<const Complex> entries() const {
        return entries_;
    }

    Complex trace() const;
    double max_abs_difference(const DensityMatrix &other) const;
    double min_eigenvalue() const;
    bool is_hermitian(double tolerance) const;

   private:
    DensityMatrix(int num_qubits, std::vector<Complex> entries)
        : num_qubits_(num_qubits), entries_(std::move(entries)) {
    }

    friend class Engine;

    int num_qubits_;
    std::vector<Complex> entries_;
};

/// mapping[i] is the new position of the qubit currently at position i.
class QubitPermutation {
   public:
    explicit QubitPermutation(std::vector<int> mapping);

    static QubitPermutation identity(int num_qubits);
    /// Transposition of positions a and b.
    static QubitPermutation swap(int num_qubits, int a, int b);

    int size() const {
        return static_cast<int>(mapping_.size());
    }
    int operator[](int position) const {
        return mapping_.at(position);
    }
    std::span<const int> mapping() const {
        return mapping_;
    }

    QubitPermutation inverse() const;

   private:
    std::vector<int> mapping_;
};

/// |Phi+-> = (|00> +- |11>)/sqrt2, |Psi+-> = (|01> +- |10>)/sqrt2.
StateVector make_bell(BellLabel label);

/// Single-photon state polarized at 0, 45, 90 or 135 degrees, as the real
/// Jones vector (cos t, sin t). 135 degrees is therefore (-|0> + |1>)/sqrt2.
StateVector polarization_state(int degrees);

/// Unitarily invariant random pure state (normalized complex Gaussian).
StateVector random_state(int num_qubits, Rng &rng);

/// Kronecker product with a's qubits first.
StateVector tensor(const StateVector &a, const StateVector &b);

StateVector permute_qubits(const StateVector &state, const QubitPermutation &permutation);

/// <a|b>, conjugate-linear in a.
Complex inner_product(const StateVector &a, const StateVector &b);

/// Reduced state on the kept positions, in ascending position order.
DensityMatrix partial_trace(const StateVector &state, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep);

/// Exact Born probabilities of the four Bell projectors on (first, second),
/// indexed by BellLabel. Qubit `first` plays the left ket slot.
std::array<double, 4> bell_probabilities(const StateVector &state, int first, int second);

struct BellOutcome {
    BellLabel label;
    StateVector state;
    /// Born probability of the branch that occurred.
    double probability;
};

BellOutcome bell_measure(const StateVector &state, int first, int second, Rng &rng);

/// Normalized post-measurement state for a given Bell outcome. Throws
/// QsimError if that outcome has zero probability.
StateVector bell_collapse(const StateVector &state, int first, int second, BellLabel label);

/// Probabilities of bit 0 / bit 1. Rect bit 0 is |0>; Diag bit 0 is 45 deg.
std::array<double, 2> polarization_probabilities(const StateVector &state, int qubit, Basis basis);

struct BitOutcome {
    int bit;
    StateVector state;
    double probability;
};

BitOutcome measure_polarization(const StateVector &state, int qubit, Basis basis, Rng &rng);

/// Real rotation by +45 degrees (Forward: 0->45, 90->135) or its inverse.
StateVector rotate_45(const StateVector &state, int qubit, Rotation direction);

/// Index of the branch selected by one uniform draw against the exact
/// cumulative distribution. Zero-probability branches are never returned.
size_t sample_branch(std::span<const double> probabilities, Rng &rng);

}  // namespace qkdlab::qsim

#endif
