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

#ifndef QKDLAB_ORACLE_H
#define QKDLAB_ORACLE_H

#include <array>
#include <complex>
#include <ostream>

#include "qkdlab/ids.h"
#include "qkdlab/qsim.h"

/// Exact reference values computed by dense density-matrix evolution.
///
/// Everything here is built from explicit operator matrices (Kronecker
/// products of 2x2 and 4x4 blocks, SWAP gates, projectors) and never calls
/// the statevector engine, so the two can check each other.
namespace qkdlab::oracle {

using Complex = std::complex<double>;

/// <Phi+ Phi+| SWAP_12 |Phi+ Phi+>.
Complex carrier_overlap();

/// overlaps[l1][l2] = <B1 B2| SWAP_12 |B1 B2> for every ordered Bell pair.
std::array<std::array<Complex, 4>, 4> bell_pair_overlaps();

/// Reduced 2x2 state of particle 0 or 1 of each Bell state, row-major.
std::array<std::array<Complex, 4>, 4> two_step_reduced_states(int particle);

/// Largest entrywise deviation of any reduced two-step state from identity/2.
double two_step_max_deviation_from_mixed();

struct AttackValues {
    /// Expected fraction of Bob's key bits that differ from Alice's.
    double qber;
    /// Expected fraction of Eve's inferred bits equal to Alice's.
    double eve_bit_accuracy;
    /// Probability that all of Eve's inferred bits for a round are right.
    double eve_unit_accuracy;
};

/// Delayed-choice BB84 under intercept-resend with a uniform basis guess.
AttackValues intercept_resend();

/// Mid protocol with Eve Bell-measuring under a uniformly guessed pairing.
AttackValues bell_pairing();

/// Two-step EPR with Eve measuring the phase-1 particle in `basis`.
/// Eve's label guess is (outcome, uniform bit).
AttackValues first_part(qsim::Basis basis);

/// table[label][outcome] = probability of Eve's outcome for that label.
std::array<std::array<double, 2>, 4> first_part_outcome_table(qsim::Basis basis);

/// Mutual information (bits) between Eve's outcome and Alice's label,
/// uniform labels.
double first_part_mutual_information(qsim::Basis basis);

/// Eve keeps the genuine part and forwards a uniformly random substitute.
AttackValues fake_injection(ProtocolId protocol);

/// dist[m1][m2] = probability Bob reads Bell labels (m1, m2) in the mid
/// protocol after Eve Bell-measured with pairing guess `eve_guess` on a
/// carrier prepared with (l1, l2, flag).
std::array<std::array<double, 4>, 4> mid_bob_distribution(qsim::BellLabel l1, qsim::BellLabel l2, int flag,
                                                           int eve_guess);

/// Probability that at least one of round(check_fraction * rounds *
/// bits_per_round) independently checked bits shows an error of rate q.
double detection_probability(double per_bit_error, double check_fraction, long rounds, int bits_per_round);

/// Prints every fixture as "name = value" with 12 decimals.
void write_report(std::ostream &out);

}  // namespace qkdlab::oracle

#endif
