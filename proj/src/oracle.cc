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

#include "qkdlab/oracle.h"

#include <bit>
#include <cmath>
#include <iomanip>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace qkdlab::oracle {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using qsim::Basis;
using qsim::BellLabel;

const double kHalfRoot = std::sqrt(0.5);

Vector bell_ket(BellLabel label) {
    Vector v = Vector::Zero(4);
    switch (label) {
        case BellLabel::PhiPlus:
            v << kHalfRoot, 0, 0, kHalfRoot;
            break;
        case BellLabel::PhiMinus:
            v << kHalfRoot, 0, 0, -kHalfRoot;
            break;
        case BellLabel::PsiPlus:
            v << 0, kHalfRoot, kHalfRoot, 0;
            break;
        case BellLabel::PsiMinus:
            v << 0, kHalfRoot, -kHalfRoot, 0;
            break;
    }
    return v;
}

Matrix projector(const Vector &v) {
    return v * v.adjoint();
}

Matrix kron(const Matrix &a, const Matrix &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

Matrix identity(int qubits) {
    return Matrix::Identity(1 << qubits, 1 << qubits);
}

Matrix swap_gate() {
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = 1;
    s(1, 2) = 1;
    s(2, 1) = 1;
    s(3, 3) = 1;
    return s;
}

/// SWAP of positions 1 and 2 in a 4-qubit register.
Matrix swap_middle() {
    return kron(kron(identity(1), swap_gate()), identity(1));
}

Matrix rotation(bool forward) {
    double s = forward ? kHalfRoot : -kHalfRoot;
    Matrix r(2, 2);
    r << kHalfRoot, -s, s, kHalfRoot;
    return r;
}

/// Projectors for bit 0 and bit 1 of a single-photon measurement.
std::array<Matrix, 2> polarization_projectors(Basis basis) {
    Vector zero(2), one(2);
    if (basis == Basis::Rect) {
        zero << 1, 0;
        one << 0, 1;
    } else {
        zero << kHalfRoot, kHalfRoot;
        one << -kHalfRoot, kHalfRoot;
    }
    return {projector(zero), projector(one)};
}

std::array<int, 2> label_bits(int label) {
    return {label >> 1, label & 1};
}

BellLabel label_of(int index) {
    return static_cast<BellLabel>(index);
}

double real_trace(const Matrix &m) {
    return m.trace().real();
}

/// Bob's Bell-pair projectors on a 4-qubit register, indexed [m1][m2].
std::array<std::array<Matrix, 4>, 4> two_pair_projectors() {
    std::array<std::array<Matrix, 4>, 4> out;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            out[a][b] = kron(projector(bell_ket(label_of(a))), projector(bell_ket(label_of(b))));
        }
    }
    return out;
}

/// Mid-protocol carrier density matrix as Alice sends it.
Matrix mid_carrier(int l1, int l2, int flag) {
    Vector psi = kron(bell_ket(label_of(l1)), bell_ket(label_of(l2)));
    Matrix rho = projector(psi);
    if (flag) {
        Matrix s = swap_middle();
        rho = s * rho * s.adjoint();
    }
    return rho;
}

/// Eve's Bell measurement channel under a pairing guess; returns the
/// post-measurement ensemble as (probability, bits of Eve's labels, state).
struct Branch {
    double probability;
    int eve_labels[2];
    Matrix state;
};

std::vector<Branch> pairing_measurement(const Matrix &rho, int guess) {
    Matrix s = guess ? swap_middle() : identity(4);
    auto projs = two_pair_projectors();
    std::vector<Branch> out;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            Matrix p = s * projs[a][b] * s.adjoint();
            Matrix post = p * rho * p;
            double prob = real_trace(post);
            if (prob > 1e-15) {
                out.push_back({prob, {a, b}, post / prob});
            }
        }
    }
    return out;
}

/// Bob's label distribution on a 4-qubit state after his recombination.
std::array<std::array<double, 4>, 4> bob_mid_distribution(const Matrix &rho, int flag) {
    Matrix s = flag ? swap_middle() : identity(4);
    Matrix recombined = s * rho * s.adjoint();
    auto projs = two_pair_projectors();
    std::array<std::array<double, 4>, 4> dist{};
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            dist[a][b] = real_trace(projs[a][b] * recombined);
        }
    }
    return dist;
}

int hamming2(int a, int b) {
    return std::popcount(static_cast<unsigned>(a ^ b));
}

/// Expected mismatched bits between (l1,l2) and Bob's distribution.
double mid_bit_errors(const std::array<std::array<double, 4>, 4> &dist, int l1, int l2) {
    double errors = 0;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            errors += dist[a][b] * (hamming2(a, l1) + hamming2(b, l2));
        }
    }
    return errors;
}

Matrix trace_out_second(const Matrix &rho) {
    Matrix out = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            for (int k = 0; k < 2; k++) {
                out(i, j) += rho(2 * i + k, 2 * j + k);
            }
        }
    }
    return out;
}

Matrix trace_out_first(const Matrix &rho) {
    Matrix out = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            for (int k = 0; k < 2; k++) {
                out(i, j) += rho(2 * k + i, 2 * k + j);
            }
        }
    }
    return out;
}

/// Bob's Bell-label distribution for a 2-qubit state.
std::array<double, 4> bob_pair_distribution(const Matrix &rho) {
    std::array<double, 4> dist{};
    for (int m = 0; m < 4; m++) {
        dist[m] = real_trace(projector(bell_ket(label_of(m))) * rho);
    }
    return dist;
}

}  // namespace

Complex carrier_overlap() {
    Vector carrier = kron(bell_ket(BellLabel::PhiPlus), bell_ket(BellLabel::PhiPlus));
    return carrier.adjoint() * swap_middle() * carrier;
}

std::array<std::array<Complex, 4>, 4> bell_pair_overlaps() {
    std::array<std::array<Complex, 4>, 4> out{};
    Matrix s = swap_middle();
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            Vector v = kron(bell_ket(label_of(a)), bell_ket(label_of(b)));
            out[a][b] = v.adjoint() * s * v;
        }
    }
    return out;
}

std::array<std::array<Complex, 4>, 4> two_step_reduced_states(int particle) {
    std::array<std::array<Complex, 4>, 4> out{};
    for (int l = 0; l < 4; l++) {
        Matrix rho = projector(bell_ket(label_of(l)));
        Matrix reduced = particle == 0 ? trace_out_second(rho) : trace_out_first(rho);
        out[l] = {reduced(0, 0), reduced(0, 1), reduced(1, 0), reduced(1, 1)};
    }
    return out;
}

double two_step_max_deviation_from_mixed() {
    double worst = 0;
    for (int particle = 0; particle < 2; particle++) {
        for (const auto &r : two_step_reduced_states(particle)) {
            worst = std::max({worst, std::abs(r[0] - 0.5), std::abs(r[1]), std::abs(r[2]), std::abs(r[3] - 0.5)});
        }
    }
    return worst;
}

AttackValues intercept_resend() {
    AttackValues v{0, 0, 0};
    // Uniform over Alice's bit, her rotation flag and Eve's basis.
    const double weight = 1.0 / 8.0;
    for (int bit = 0; bit < 2; bit++) {
        for (int flag = 0; flag < 2; flag++) {
            Vector photon = Vector::Zero(2);
            photon(bit) = 1;
            if (flag) {
                photon = rotation(true) * photon;
            }
            Matrix rho = projector(photon);
            for (Basis eve : {Basis::Rect, Basis::Diag}) {
                auto projs = polarization_projectors(eve);
                for (int outcome = 0; outcome < 2; outcome++) {
                    Matrix post = projs[outcome] * rho * projs[outcome];
                    double p = real_trace(post);
                    if (p < 1e-15) {
                        continue;
                    }
                    post /= p;
                    if (outcome == bit) {
                        v.eve_bit_accuracy += weight * p;
                    }
                    Matrix undone = flag ? Matrix(rotation(false) * post * rotation(false).adjoint()) : post;
                    double wrong = real_trace(polarization_projectors(Basis::Rect)[1 - bit] * undone);
                    v.qber += weight * p * wrong;
                }
            }
        }
    }
    v.eve_unit_accuracy = v.eve_bit_accuracy;
    return v;
}

std::array<std::array<double, 4>, 4> mid_bob_distribution(BellLabel l1, BellLabel l2, int flag, int eve_guess) {
    Matrix rho = mid_carrier(static_cast<int>(l1), static_cast<int>(l2), flag);
    Matrix mixed = Matrix::Zero(16, 16);
    for (const auto &branch : pairing_measurement(rho, eve_guess)) {
        mixed += branch.probability * branch.state;
    }
    return bob_mid_distribution(mixed, flag);
}

AttackValues bell_pairing() {
    AttackValues v{0, 0, 0};
    // 16 label pairs x 2 flags x 2 guesses, all uniform.
    const double weight = 1.0 / 64.0;
    for (int l1 = 0; l1 < 4; l1++) {
        for (int l2 = 0; l2 < 4; l2++) {
            for (int flag = 0; flag < 2; flag++) {
                Matrix rho = mid_carrier(l1, l2, flag);
                for (int guess = 0; guess < 2; guess++) {
                    for (const auto &branch : pairing_measurement(rho, guess)) {
                        int wrong = hamming2(branch.eve_labels[0], l1) + hamming2(branch.eve_labels[1], l2);
                        v.eve_bit_accuracy += weight * branch.probability * (4 - wrong) / 4.0;
                        if (wrong == 0) {
                            v.eve_unit_accuracy += weight * branch.probability;
                        }
                        auto dist = bob_mid_distribution(branch.state, flag);
                        v.qber += weight * branch.probability * mid_bit_errors(dist, l1, l2) / 4.0;
                    }
                }
            }
        }
    }
    return v;
}

std::array<std::array<double, 2>, 4> first_part_outcome_table(Basis basis) {
    auto projs = polarization_projectors(basis);
    std::array<std::array<double, 2>, 4> table{};
    for (int l = 0; l < 4; l++) {
        Matrix rho = projector(bell_ket(label_of(l)));
        for (int outcome = 0; outcome < 2; outcome++) {
            table[l][outcome] = real_trace(kron(projs[outcome], identity(1)) * rho);
        }
    }
    return table;
}

double first_part_mutual_information(Basis basis) {
    auto table = first_part_outcome_table(basis);
    double info = 0;
    for (int outcome = 0; outcome < 2; outcome++) {
        double marginal = 0;
        for (int l = 0; l < 4; l++) {
            marginal += 0.25 * table[l][outcome];
        }
        for (int l = 0; l < 4; l++) {
            double joint = 0.25 * table[l][outcome];
            if (joint > 0) {
                info += joint * std::log2(table[l][outcome] / marginal);
            }
        }
    }
    return info;
}

AttackValues first_part(Basis basis) {
    AttackValues v{0, 0, 0};
    auto projs = polarization_projectors(basis);
    for (int l = 0; l < 4; l++) {
        Matrix rho = projector(bell_ket(label_of(l)));
        auto bits = label_bits(l);
        for (int outcome = 0; outcome < 2; outcome++) {
            Matrix p = kron(projs[outcome], identity(1));
            Matrix post = p * rho * p;
            double prob = real_trace(post);
            if (prob < 1e-15) {
                continue;
            }
            post /= prob;
            // First guessed bit is the outcome, second is a fair coin.
            double first_right = outcome == bits[0] ? 1.0 : 0.0;
            v.eve_bit_accuracy += 0.25 * prob * (first_right + 0.5) / 2.0;
            v.eve_unit_accuracy += 0.25 * prob * first_right * 0.5;
            auto dist = bob_pair_distribution(post);
            for (int m = 0; m < 4; m++) {
                v.qber += 0.25 * prob * dist[m] * hamming2(m, l) / 2.0;
            }
        }
    }
    return v;
}

AttackValues fake_injection(ProtocolId protocol) {
    AttackValues v{0, 1, 1};
    switch (protocol) {
        case ProtocolId::Mid: {
            Matrix substitute = Matrix::Zero(16, 16);
            for (int a = 0; a < 4; a++) {
                for (int b = 0; b < 4; b++) {
                    substitute += mid_carrier(a, b, 0) / 16.0;
                }
            }
            for (int l1 = 0; l1 < 4; l1++) {
                for (int l2 = 0; l2 < 4; l2++) {
                    for (int flag = 0; flag < 2; flag++) {
                        auto dist = bob_mid_distribution(substitute, flag);
                        v.qber += mid_bit_errors(dist, l1, l2) / 4.0 / 32.0;
                        // Eve runs Bob's honest procedure on the genuine carrier.
                        auto eve = bob_mid_distribution(mid_carrier(l1, l2, flag), flag);
                        v.eve_unit_accuracy = std::min(v.eve_unit_accuracy, eve[l1][l2]);
                    }
                }
            }
            break;
        }
        case ProtocolId::Bb84Delayed:
        case ProtocolId::Bb84Original: {
            Matrix substitute = Matrix::Zero(2, 2);
            for (int bit = 0; bit < 2; bit++) {
                for (int flag = 0; flag < 2; flag++) {
                    Vector photon = Vector::Zero(2);
                    photon(bit) = 1;
                    if (flag) {
                        photon = rotation(true) * photon;
                    }
                    substitute += projector(photon) / 4.0;
                }
            }
            auto rect = polarization_projectors(Basis::Rect);
            for (int bit = 0; bit < 2; bit++) {
                for (int flag = 0; flag < 2; flag++) {
                    Matrix undone =
                        flag ? Matrix(rotation(false) * substitute * rotation(false).adjoint()) : substitute;
                    v.qber += real_trace(rect[1 - bit] * undone) / 4.0;
                }
            }
            break;
        }
        case ProtocolId::TwoStepEpr: {
            Matrix substitute = Matrix::Zero(4, 4);
            for (int m = 0; m < 4; m++) {
                substitute += projector(bell_ket(label_of(m))) / 4.0;
            }
            auto dist = bob_pair_distribution(substitute);
            for (int l = 0; l < 4; l++) {
                for (int m = 0; m < 4; m++) {
                    v.qber += 0.25 * dist[m] * hamming2(m, l) / 2.0;
                }
            }
            break;
        }
    }
    v.eve_bit_accuracy = v.eve_unit_accuracy;
    return v;
}

double detection_probability(double per_bit_error, double check_fraction, long rounds, int bits_per_round) {
    double checked = check_fraction * static_cast<double>(rounds) * bits_per_round;
    return 1.0 - std::pow(1.0 - per_bit_error, checked);
}

void write_report(std::ostream &out) {
    auto old_flags = out.flags();
    auto old_precision = out.precision();
    out << std::fixed << std::setprecision(12);

    out << "eq3_overlap = " << carrier_overlap().real() << "\n";
    auto overlaps = bell_pair_overlaps();
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            out << "overlap[" << qsim::to_string(label_of(a)) << "," << qsim::to_string(label_of(b))
                << "] = " << overlaps[a][b].real() << "\n";
        }
    }
    for (int particle = 0; particle < 2; particle++) {
        auto states = two_step_reduced_states(particle);
        for (int l = 0; l < 4; l++) {
            const auto &r = states[l];
            out << "two_step_reduced[particle=" << particle << "," << qsim::to_string(label_of(l))
                << "] = [" << r[0].real() << ", " << r[1].real() << "; " << r[2].real() << ", " << r[3].real()
                << "]\n";
        }
    }
    out << "two_step_max_deviation = " << two_step_max_deviation_from_mixed() << "\n";

    auto ir = intercept_resend();
    out << "intercept_resend_qber = " << ir.qber << "\n";
    out << "intercept_resend_eve_accuracy = " << ir.eve_bit_accuracy << "\n";

    auto bp = bell_pairing();
    out << "bell_pairing_qber = " << bp.qber << "\n";
    out << "bell_pairing_eve_bit_accuracy = " << bp.eve_bit_accuracy << "\n";
    out << "bell_pairing_eve_unit_accuracy = " << bp.eve_unit_accuracy << "\n";

    for (Basis basis : {Basis::Rect, Basis::Diag}) {
        auto table = first_part_outcome_table(basis);
        for (int l = 0; l < 4; l++) {
            out << "first_part_outcome[" << qsim::to_string(basis) << "," << qsim::to_string(label_of(l))
                << "] = " << table[l][0] << " " << table[l][1] << "\n";
        }
        auto fp = first_part(basis);
        out << "first_part_mutual_information[" << qsim::to_string(basis)
            << "] = " << first_part_mutual_information(basis) << "\n";
        out << "first_part_qber[" << qsim::to_string(basis) << "] = " << fp.qber << "\n";
        out << "first_part_eve_unit_accuracy[" << qsim::to_string(basis) << "] = " << fp.eve_unit_accuracy
            << "\n";
    }

    for (ProtocolId p : kAllProtocols) {
        out << "fake_injection_qber[" << to_string(p) << "] = " << fake_injection(p).qber << "\n";
    }

    out.flags(old_flags);
    out.precision(old_precision);
}

}  // namespace qkdlab::oracle
