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

#include "qkdlab/qsim.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace qkdlab::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int checked_qubit_count(size_t length) {
    if (length < 2 || !std::has_single_bit(length)) {
        throw DimensionError("amplitude count " + std::to_string(length) + " is not 2^n for n >= 1");
    }
    int n = std::countr_zero(length);
    if (n > kMaxQubits) {
        throw DimensionError(std::to_string(n) + " qubits exceeds the cap of " + std::to_string(kMaxQubits));
    }
    return n;
}

void check_position(int num_qubits, int position) {
    if (position < 0 || position >= num_qubits) {
        throw DimensionError(
            "qubit position " + std::to_string(position) + " out of range for " + std::to_string(num_qubits) +
            " qubits");
    }
}

inline uint64_t position_mask(int num_qubits, int position) {
    return uint64_t{1} << (num_qubits - 1 - position);
}

/// Enumerates the basis indices whose bits at `positions` are all zero.
std::vector<uint64_t> environment_indices(int num_qubits, std::span<const int> positions) {
    uint64_t fixed = 0;
    for (int p : positions) {
        fixed |= position_mask(num_qubits, p);
    }
    std::vector<uint64_t> out;
    out.reserve((uint64_t{1} << num_qubits) >> positions.size());
    for (uint64_t i = 0; i < (uint64_t{1} << num_qubits); i++) {
        if ((i & fixed) == 0) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<int> sorted_keep(int num_qubits, std::span<const int> keep) {
    if (keep.empty()) {
        throw QsimError("partial_trace requires a nonempty keep set");
    }
    std::vector<int> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DimensionError("partial_trace keep set has duplicate positions");
    }
    for (int p : sorted) {
        check_position(num_qubits, p);
    }
    return sorted;
}

/// Maps a reduced index over `positions` (first position most significant)
/// onto the corresponding bits of a full basis index.
uint64_t scatter_bits(int num_qubits, std::span<const int> positions, uint64_t reduced) {
    uint64_t full = 0;
    int k = static_cast<int>(positions.size());
    for (int j = 0; j < k; j++) {
        if ((reduced >> (k - 1 - j)) & 1) {
            full |= position_mask(num_qubits, positions[j]);
        }
    }
    return full;
}

/// Amplitudes of the Bell kets over the 2-qubit basis {00, 01, 10, 11}.
std::array<double, 4> bell_coefficients(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus:
            return {kInvSqrt2, 0, 0, kInvSqrt2};
        case BellLabel::PhiMinus:
            return {kInvSqrt2, 0, 0, -kInvSqrt2};
        case BellLabel::PsiPlus:
            return {0, kInvSqrt2, kInvSqrt2, 0};
        case BellLabel::PsiMinus:
            return {0, kInvSqrt2, -kInvSqrt2, 0};
    }
    throw QsimError("invalid Bell label");
}

/// Eigenvectors of a measurement basis, bit 0 first, as real 2-vectors.
std::array<std::array<double, 2>, 2> basis_vectors(Basis basis) {
    if (basis == Basis::Rect) {
        return {{{1.0, 0.0}, {0.0, 1.0}}};
    }
    return {{{kInvSqrt2, kInvSqrt2}, {-kInvSqrt2, kInvSqrt2}}};
}

}  // namespace

// Grants the free functions access to the private constructors.
class Engine {
   public:
    static StateVector make_state(int n, std::vector<Complex> amps) {
        return StateVector(n, std::move(amps));
    }
    static DensityMatrix make_rho(int n, std::vector<Complex> entries) {
        return DensityMatrix(n, std::move(entries));
    }
};

std::string_view to_string(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus:
            return "PhiPlus";
        case BellLabel::PhiMinus:
            return "PhiMinus";
        case BellLabel::PsiPlus:
            return "PsiPlus";
        case BellLabel::PsiMinus:
            return "PsiMinus";
    }
    return "?";
}

std::string_view to_string(Basis basis) {
    return basis == Basis::Rect ? "rect" : "diag";
}

// ---------------------------------------------------------------- StateVector

StateVector StateVector::basis_state(int num_qubits, uint64_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw DimensionError("qubit count " + std::to_string(num_qubits) + " outside 1..8");
    }
    std::vector<Complex> amps(size_t{1} << num_qubits);
    amps.at(index) = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    int n = checked_qubit_count(amplitudes.size());
    double total = 0;
    for (const auto &a : amplitudes) {
        total += std::norm(a);
    }
    if (std::abs(total - 1.0) > kInvariantTolerance) {
        throw QsimError("amplitudes are not normalized (sum |a|^2 = " + std::to_string(total) + ")");
    }
    return StateVector(n, std::move(amplitudes));
}

double StateVector::norm() const {
    double total = 0;
    for (const auto &a : amplitudes_) {
        total += std::norm(a);
    }
    return std::sqrt(total);
}

bool StateVector::approx_equal(const StateVector &other, double tolerance) const {
    if (num_qubits_ != other.num_qubits_) {
        return false;
    }
    for (size_t i = 0; i < amplitudes_.size(); i++) {
        if (std::abs(amplitudes_[i] - other.amplitudes_[i]) > tolerance) {
            return false;
        }
    }
    return true;
}

std::string StateVector::str() const {
    std::ostringstream out;
    bool first = true;
    for (size_t i = 0; i < amplitudes_.size(); i++) {
        if (std::abs(amplitudes_[i]) < 1e-12) {
            continue;
        }
        if (!first) {
            out << " + ";
        }
        first = false;
        const Complex &a = amplitudes_[i];
        if (std::abs(a.imag()) < 1e-12) {
            out << a.real();
        } else {
            out << "(" << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag()) << "i)";
        }
        out << "|";
        for (int q = 0; q < num_qubits_; q++) {
            out << (((i >> (num_qubits_ - 1 - q)) & 1) ? '1' : '0');
        }
        out << ">";
    }
    return first ? "0" : out.str();
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix DensityMatrix::from_state(const StateVector &state) {
    size_t d = state.dimension();
    std::vector<Complex> entries(d * d);
    auto amps = state.amplitudes();
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            entries[r * d + c] = amps[r] * std::conj(amps[c]);
        }
    }
    return DensityMatrix(state.num_qubits(), std::move(entries));
}

DensityMatrix DensityMatrix::from_entries(int num_qubits, std::vector<Complex> entries) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw DimensionError("qubit count " + std::to_string(num_qubits) + " outside 1..8");
    }
    size_t d = size_t{1} << num_qubits;
    if (entries.size() != d * d) {
        throw DimensionError("density matrix needs " + std::to_string(d * d) + " entries");
    }
    DensityMatrix rho(num_qubits, std::move(entries));
    if (!rho.is_hermitian(kInvariantTolerance)) {
        throw QsimError("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > kInvariantTolerance) {
        throw QsimError("density matrix trace is not 1");
    }
    if (rho.min_eigenvalue() < -kInvariantTolerance) {
        throw QsimError("density matrix has a negative eigenvalue");
    }
    return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw DimensionError("qubit count " + std::to_string(num_qubits) + " outside 1..8");
    }
    size_t d = size_t{1} << num_qubits;
    std::vector<Complex> entries(d * d);
    for (size_t i = 0; i < d; i++) {
        entries[i * d + i] = 1.0 / static_cast<double>(d);
    }
    return DensityMatrix(num_qubits, std::move(entries));
}

Complex DensityMatrix::trace() const {
    Complex t = 0;
    for (size_t i = 0; i < dimension(); i++) {
        t += entries_[i * dimension() + i];
    }
    return t;
}

double DensityMatrix::max_abs_difference(const DensityMatrix &other) const {
    if (num_qubits_ != other.num_qubits_) {
        throw DimensionError("density matrices differ in qubit count");
    }
    double worst = 0;
    for (size_t i = 0; i < entries_.size(); i++) {
        worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
    }
    return worst;
}

double DensityMatrix::min_eigenvalue() const {
    auto d = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index c = 0; c < d; c++) {
            m(r, c) = entries_[r * d + c];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_hermitian(double tolerance) const {
    size_t d = dimension();
    for (size_t r = 0; r < d; r++) {
        for (size_t c = r; c < d; c++) {
            if (std::abs(entries_[r * d + c] - std::conj(entries_[c * d + r])) > tolerance) {
                return false;
            }
        }
    }
    return true;
}

// ----------------------------------------------------------- QubitPermutation

QubitPermutation::QubitPermutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    int n = static_cast<int>(mapping_.size());
    if (n < 1 || n > kMaxQubits) {
        throw DimensionError("permutation size " + std::to_string(n) + " outside 1..8");
    }
    std::vector<bool> seen(n, false);
    for (int target : mapping_) {
        if (target < 0 || target >= n || seen[target]) {
            throw DimensionError("qubit mapping is not a bijection");
        }
        seen[target] = true;
    }
}

QubitPermutation QubitPermutation::identity(int num_qubits) {
    std::vector<int> m(std::max(num_qubits, 0));
    std::iota(m.begin(), m.end(), 0);
    return QubitPermutation(std::move(m));
}

QubitPermutation QubitPermutation::swap(int num_qubits, int a, int b) {
    std::vector<int> m(std::max(num_qubits, 0));
    std::iota(m.begin(), m.end(), 0);
    check_position(num_qubits, a);
    check_position(num_qubits, b);
    std::swap(m[a], m[b]);
    return QubitPermutation(std::move(m));
}

QubitPermutation QubitPermutation::inverse() const {
    std::vector<int> inv(mapping_.size());
    for (size_t i = 0; i < mapping_.size(); i++) {
        inv[mapping_[i]] = static_cast<int>(i);
    }
    return QubitPermutation(std::move(inv));
}

// ----------------------------------------------------------------- operations

StateVector make_bell(BellLabel label) {
    auto c = bell_coefficients(label);
    return Engine::make_state(2, {c[0], c[1], c[2], c[3]});
}

StateVector polarization_state(int degrees) {
    switch (degrees) {
        case 0:
            return Engine::make_state(1, {1.0, 0.0});
        case 45:
            return Engine::make_state(1, {kInvSqrt2, kInvSqrt2});
        case 90:
            return Engine::make_state(1, {0.0, 1.0});
        case 135:
            return Engine::make_state(1, {-kInvSqrt2, kInvSqrt2});
        default:
            throw QsimError("unsupported polarization angle " + std::to_string(degrees));
    }
}

StateVector random_state(int num_qubits, Rng &rng) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw DimensionError("qubit count " + std::to_string(num_qubits) + " outside 1..8");
    }
    std::vector<Complex> amps(size_t{1} << num_qubits);
    double total = 0;
    for (auto &a : amps) {
        // Box-Muller on the session generator keeps draws portable.
        double r = std::sqrt(-2.0 * std::log1p(-rng.uniform()));
        double theta = 2.0 * M_PI * rng.uniform();
        a = std::polar(r, theta);
        total += std::norm(a);
    }
    double scale = 1.0 / std::sqrt(total);
    for (auto &a : amps) {
        a *= scale;
    }
    return Engine::make_state(num_qubits, std::move(amps));
}

StateVector tensor(const StateVector &a, const StateVector &b) {
    int n = a.num_qubits() + b.num_qubits();
    if (n > kMaxQubits) {
        throw DimensionError("tensor product of " + std::to_string(n) + " qubits exceeds the cap");
    }
    std::vector<Complex> amps(a.dimension() * b.dimension());
    auto aa = a.amplitudes();
    auto bb = b.amplitudes();
    for (size_t i = 0; i < aa.size(); i++) {
        for (size_t j = 0; j < bb.size(); j++) {
            amps[i * bb.size() + j] = aa[i] * bb[j];
        }
    }
    return Engine::make_state(n, std::move(amps));
}

StateVector permute_qubits(const StateVector &state, const QubitPermutation &permutation) {
    int n = state.num_qubits();
    if (permutation.size() != n) {
        throw DimensionError(
            "permutation over " + std::to_string(permutation.size()) + " positions applied to " +
            std::to_string(n) + " qubits");
    }
    auto src = state.amplitudes();
    std::vector<Complex> amps(src.size());
    for (uint64_t x = 0; x < src.size(); x++) {
        uint64_t y = 0;
        for (int q = 0; q < n; q++) {
            if (x & position_mask(n, q)) {
                y |= position_mask(n, permutation[q]);
            }
        }
        amps[y] = src[x];
    }
    return Engine::make_state(n, std::move(amps));
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw DimensionError("inner product of states with different qubit counts");
    }
    Complex total = 0;
    auto aa = a.amplitudes();
    auto bb = b.amplitudes();
    for (size_t i = 0; i < aa.size(); i++) {
        total += std::conj(aa[i]) * bb[i];
    }
    return total;
}

DensityMatrix partial_trace(const StateVector &state, std::span<const int> keep) {
    int n = state.num_qubits();
    auto kept = sorted_keep(n, keep);
    int k = static_cast<int>(kept.size());
    size_t dk = size_t{1} << k;
    auto env = environment_indices(n, kept);
    std::vector<uint64_t> offsets(dk);
    for (uint64_t r = 0; r < dk; r++) {
        offsets[r] = scatter_bits(n, kept, r);
    }
    auto amps = state.amplitudes();
    std::vector<Complex> entries(dk * dk);
    for (uint64_t r = 0; r < dk; r++) {
        for (uint64_t c = 0; c < dk; c++) {
            Complex sum = 0;
            for (uint64_t e : env) {
                sum += amps[e | offsets[r]] * std::conj(amps[e | offsets[c]]);
            }
            entries[r * dk + c] = sum;
        }
    }
    return Engine::make_rho(k, std::move(entries));
}

DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep) {
    int n = rho.num_qubits();
    auto kept = sorted_keep(n, keep);
    int k = static_cast<int>(kept.size());
    size_t dk = size_t{1} << k;
    size_t d = rho.dimension();
    auto env = environment_indices(n, kept);
    std::vector<uint64_t> offsets(dk);
    for (uint64_t r = 0; r < dk; r++) {
        offsets[r] = scatter_bits(n, kept, r);
    }
    auto src = rho.entries();
    std::vector<Complex> entries(dk * dk);
    for (uint64_t r = 0; r < dk; r++) {
        for (uint64_t c = 0; c < dk; c++) {
            Complex sum = 0;
            for (uint64_t e : env) {
                sum += src[(e | offsets[r]) * d + (e | offsets[c])];
            }
            entries[r * dk + c] = sum;
        }
    }
    return Engine::make_rho(k, std::move(entries));
}

size_t sample_branch(std::span<const double> probabilities, Rng &rng) {
    double u = rng.uniform();
    double cumulative = 0;
    size_t last_nonzero = probabilities.size();
    for (size_t k = 0; k < probabilities.size(); k++) {
        if (probabilities[k] <= 0) {
            continue;
        }
        last_nonzero = k;
        cumulative += probabilities[k];
        if (u < cumulative) {
            return k;
        }
    }
    if (last_nonzero == probabilities.size()) {
        throw QsimError("all measurement branches have zero probability");
    }
    // Rounding left u just above the accumulated total.
    return last_nonzero;
}

namespace {

void check_pair(int n, int first, int second) {
    check_position(n, first);
    check_position(n, second);
    if (first == second) {
        throw DimensionError("Bell measurement needs two distinct positions");
    }
}

/// Component of the state along |label>_(first,second), one amplitude per
/// environment index.
std::vector<Complex> bell_projection(const StateVector &state, int first, int second, BellLabel label,
                                     const std::vector<uint64_t> &env) {
    int n = state.num_qubits();
    auto coef = bell_coefficients(label);
    uint64_t m1 = position_mask(n, first);
    uint64_t m2 = position_mask(n, second);
    const std::array<uint64_t, 4> offset = {0, m2, m1, m1 | m2};
    auto amps = state.amplitudes();
    std::vector<Complex> out(env.size());
    for (size_t e = 0; e < env.size(); e++) {
        Complex c = 0;
        for (int xy = 0; xy < 4; xy++) {
            c += coef[xy] * amps[env[e] | offset[xy]];
        }
        out[e] = c;
    }
    return out;
}

}  // namespace

std::array<double, 4> bell_probabilities(const StateVector &state, int first, int second) {
    check_pair(state.num_qubits(), first, second);
    const std::array<int, 2> pair = {first, second};
    auto env = environment_indices(state.num_qubits(), pair);
    std::array<double, 4> probs{};
    for (BellLabel label : kAllBellLabels) {
        double p = 0;
        for (const auto &c : bell_projection(state, first, second, label, env)) {
            p += std::norm(c);
        }
        probs[static_cast<size_t>(label)] = p;
    }
    return probs;
}

StateVector bell_collapse(const StateVector &state, int first, int second, BellLabel label) {
    int n = state.num_qubits();
    check_pair(n, first, second);
    const std::array<int, 2> pair = {first, second};
    auto env = environment_indices(n, pair);
    auto proj = bell_projection(state, first, second, label, env);
    double p = 0;
    for (const auto &c : proj) {
        p += std::norm(c);
    }
    if (!(p > 0)) {
        throw QsimError("selected Bell branch has zero norm");
    }
    auto coef = bell_coefficients(label);
    uint64_t m1 = position_mask(n, first);
    uint64_t m2 = position_mask(n, second);
    const std::array<uint64_t, 4> offset = {0, m2, m1, m1 | m2};
    double scale = 1.0 / std::sqrt(p);
    std::vector<Complex> amps(state.dimension());
    for (size_t e = 0; e < env.size(); e++) {
        for (int xy = 0; xy < 4; xy++) {
            amps[env[e] | offset[xy]] = coef[xy] * proj[e] * scale;
        }
    }
    return Engine::make_state(n, std::move(amps));
}

BellOutcome bell_measure(const StateVector &state, int first, int second, Rng &rng) {
    auto probs = bell_probabilities(state, first, second);
    auto label = static_cast<BellLabel>(sample_branch(probs, rng));
    return {label, bell_collapse(state, first, second, label), probs[static_cast<size_t>(label)]};
}

std::array<double, 2> polarization_probabilities(const StateVector &state, int qubit, Basis basis) {
    int n = state.num_qubits();
    check_position(n, qubit);
    auto vecs = basis_vectors(basis);
    uint64_t m = position_mask(n, qubit);
    auto amps = state.amplitudes();
    std::array<double, 2> probs{};
    for (uint64_t i = 0; i < amps.size(); i++) {
        if (i & m) {
            continue;
        }
        for (int b = 0; b < 2; b++) {
            Complex c = vecs[b][0] * amps[i] + vecs[b][1] * amps[i | m];
            probs[b] += std::norm(c);
        }
    }
    return probs;
}

BitOutcome measure_polarization(const StateVector &state, int qubit, Basis basis, Rng &rng) {
    auto probs = polarization_probabilities(state, qubit, basis);
    int bit = static_cast<int>(sample_branch(probs, rng));
    double scale = 1.0 / std::sqrt(probs[bit]);
    int n = state.num_qubits();
    auto v = basis_vectors(basis)[bit];
    uint64_t m = position_mask(n, qubit);
    auto src = state.amplitudes();
    std::vector<Complex> amps(src.size());
    for (uint64_t i = 0; i < src.size(); i++) {
        if (i & m) {
            continue;
        }
        Complex c = (v[0] * src[i] + v[1] * src[i | m]) * scale;
        amps[i] = v[0] * c;
        amps[i | m] = v[1] * c;
    }
    return {bit, Engine::make_state(n, std::move(amps)), probs[bit]};
}

StateVector rotate_45(const StateVector &state, int qubit, Rotation direction) {
    int n = state.num_qubits();
    check_position(n, qubit);
    // [[c, -s], [s, c]] with s negated for the inverse.
    double s = direction == Rotation::Forward ? kInvSqrt2 : -kInvSqrt2;
    double c = kInvSqrt2;
    uint64_t m = position_mask(n, qubit);
    auto src = state.amplitudes();
    std::vector<Complex> amps(src.size());
    for (uint64_t i = 0; i < src.size(); i++) {
        if (i & m) {
            continue;
        }
        amps[i] = c * src[i] - s * src[i | m];
        amps[i | m] = s * src[i] + c * src[i | m];
    }
    return Engine::make_state(n, std::move(amps));
}

}  // namespace qkdlab::qsim
