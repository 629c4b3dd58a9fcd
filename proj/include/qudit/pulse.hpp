// Copyright 2026 The qudit-bench Authors
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

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qudit/common.hpp"
#include "qudit/hilbert.hpp"

namespace qudit {

// Dispersive shift used throughout the benchmarks: chi = 2 pi x 1 MHz.
inline constexpr double kDefaultChi = kTwoPi * 1.0e6;

// Second SNAP pulse phase is pi + kSnapPhaseSign * theta. With the drive term
// eps [e^{-i phi} sigma+ + h.c.] a pair of resonant pi rotations at phases 0
// and phi leaves |n,g> multiplied by -e^{i phi}; choosing phi = pi - theta
// would therefore imprint e^{-i theta}. The sign here makes the simulated gate
// equal snap_matrix(theta).
inline constexpr double kSnapPhaseSign = 1.0;

enum class EnvelopeShape { kGaussian, kFlatTop };

// Real, non-negative drive envelope on [0, duration].
struct Envelope {
  EnvelopeShape shape = EnvelopeShape::kFlatTop;
  double duration = 0.0;   // s
  double amplitude = 0.0;  // rad/s, peak value
  double rise = 0.0;       // s, sin^2 ramp at each end (flat-top only)
  double truncation = 2.0; // half-width in sigmas (Gaussian only)

  void validate() const;
  // Envelope value at local time tau (0 outside [0, duration]).
  double value(double tau) const;
  // Integral over [0, duration] in closed form.
  double area() const;
  // Area per unit amplitude for this shape/duration.
  double unit_area() const;
  // Local times where the envelope has a kink, interior to [0, duration].
  std::vector<double> kinks() const;
};

enum class Channel { kCavity, kQubit };

// One carrier inside a segment: e^{-i(detuning t + phase)}.
struct Tone {
  double detuning = 0.0;  // rad/s
  double phase = 0.0;     // rad
};

// Cavity segments carry exactly one tone. Qubit segments may multiplex several
// tones that share the envelope (each tone has the envelope's amplitude).
struct DriveSegment {
  Channel channel = Channel::kCavity;
  double start = 0.0;  // s, absolute schedule time
  Envelope envelope;
  std::vector<Tone> tones;

  double end() const { return start + envelope.duration; }
};

struct PulseSchedule {
  std::vector<DriveSegment> segments;  // ordered by start time
  double total_duration = 0.0;
  double chi = kDefaultChi;

  // Checks ordering, total duration and channel mutual exclusion.
  void validate() const;
  bool empty() const { return segments.empty(); }
  // Appends `other` shifted to start at total_duration + gap.
  void append(const PulseSchedule& other, double gap = 0.0);
};

// Envelope used for cavity displacements: flat-top, 100 ns long with 10 ns
// sin^2 ramps. The amplitude is filled in by displacement_schedule.
Envelope default_displacement_envelope();

// Resonant cavity drive realizing D(alpha) = exp(-i int eps (e^{-i phi} a^dag + h.c.)):
// phase = -pi/2 - arg(alpha), area = |alpha|. alpha == 0 gives an empty schedule.
PulseSchedule displacement_schedule(Complex alpha, const Envelope& shape = default_displacement_envelope(),
                                    double chi = kDefaultChi);

struct SnapPulseConfig {
  EnvelopeShape shape = EnvelopeShape::kGaussian;
  double truncation = 2.0;       // Gaussian half-width in sigmas
  double rise_fraction = 0.1;    // flat-top ramp length / duration
  double weak_drive_ratio = 10.0;  // |chi| / peak single-tone amplitude
  // Single-tone pi-pulse duration. <= 0 derives it from weak_drive_ratio and
  // the pi-rotation area condition.
  double base_pi_duration = 0.0;
};

// Duration of a single-tone conditional pi pulse under `config`.
double single_tone_pi_duration(double chi, const SnapPulseConfig& config = {});

// Multiplexed SNAP on levels 0..thetas.size()-1: two back-to-back qubit
// segments of duration base * sqrt(d), tone j at detuning j*chi with amplitude
// scaled by 1/sqrt(d). First segment phases 0, second pi + sign * theta_j.
PulseSchedule snap_schedule(std::span<const double> thetas, double chi, const SnapPulseConfig& config = {});

// Same construction restricted to the listed Fock levels (one tone per level).
PulseSchedule selective_snap_schedule(std::span<const int> levels, std::span<const double> thetas, double chi,
                                      const SnapPulseConfig& config = {});

struct ScheduleOptions {
  Envelope displacement_envelope = default_displacement_envelope();
  SnapPulseConfig snap;
  double buffer = 0.0;  // idle time inserted between consecutive gates, s
};

struct GateSequence;

// Time-ordered concatenation of the native gates in `seq`. Throws
// ValidationError for non-native elements (Givens rotations).
PulseSchedule schedule_for_sequence(const GateSequence& seq, double chi, const ScheduleOptions& options = {});

// Drive coefficients of the rotating-frame Hamiltonian at time t:
// H' = chi a^dag a |e><e| + (cavity a^dag + h.c.) + (qubit sigma+ + h.c.).
struct DriveCoefficients {
  Complex cavity{0.0, 0.0};
  Complex qubit{0.0, 0.0};
};

// Sums all segments of `segments` that are active at absolute time t.
DriveCoefficients drive_coefficients(double t, std::span<const DriveSegment> segments);

// Dense H'(t) on cavity (x) qubit, basis index 2*n + q with q = 0 for |g>,
// 1 for |e>. Throws ValidationError for t outside [0, total_duration].
Operator drive_hamiltonian(double t, const PulseSchedule& schedule, const FockSpaceConfig& cfg);

nlohmann::json schedule_to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace qudit
