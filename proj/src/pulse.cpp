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

#include "qudit/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qudit/gates.hpp"

namespace qudit {

namespace {

constexpr double kTimeSlack = 1e-15;  // s
constexpr double kPiRotationArea = kPi / 2.0;

const char* shape_name(EnvelopeShape s) { return s == EnvelopeShape::kGaussian ? "gaussian" : "flat_top"; }

EnvelopeShape shape_from_name(const std::string& s) {
  if (s == "gaussian") return EnvelopeShape::kGaussian;
  if (s == "flat_top") return EnvelopeShape::kFlatTop;
  throw ValidationError("unknown envelope shape '" + s + "'");
}

}  // namespace

void Envelope::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("envelope duration must be > 0");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ValidationError("envelope amplitude must be >= 0");
  if (shape == EnvelopeShape::kFlatTop && (rise < 0.0 || 2.0 * rise > duration)) {
    throw ValidationError("flat-top rise must lie in [0, duration/2]");
  }
  if (shape == EnvelopeShape::kGaussian && !(truncation > 0.0)) {
    throw ValidationError("Gaussian truncation must be > 0");
  }
}

double Envelope::value(double tau) const {
  if (tau < 0.0 || tau > duration) return 0.0;
  if (shape == EnvelopeShape::kGaussian) {
    const double sigma = duration / (2.0 * truncation);
    const double u = (tau - 0.5 * duration) / sigma;
    return amplitude * std::exp(-0.5 * u * u);
  }
  if (rise > 0.0) {
    const double edge = std::min(tau, duration - tau);
    if (edge < rise) {
      const double s = std::sin(0.5 * kPi * edge / rise);
      return amplitude * s * s;
    }
  }
  return amplitude;
}

double Envelope::unit_area() const {
  if (shape == EnvelopeShape::kGaussian) {
    const double sigma = duration / (2.0 * truncation);
    return sigma * std::sqrt(kTwoPi) * std::erf(truncation / std::sqrt(2.0));
  }
  // Each sin^2 ramp integrates to rise / 2.
  return duration - rise;
}

double Envelope::area() const { return amplitude * unit_area(); }

std::vector<double> Envelope::kinks() const {
  if (shape == EnvelopeShape::kFlatTop && rise > 0.0 && 2.0 * rise < duration) return {rise, duration - rise};
  return {};
}

void PulseSchedule::validate() const {
  if (chi == 0.0 || !std::isfinite(chi)) throw ValidationError("schedule chi must be finite and nonzero");
  double max_end = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    seg.envelope.validate();
    if (seg.start < -kTimeSlack) throw ValidationError("segment starts before t = 0");
    if (seg.tones.empty()) throw ValidationError("segment without tones");
    if (seg.channel == Channel::kCavity && seg.tones.size() != 1) {
      throw ValidationError("cavity segments carry exactly one tone");
    }
    if (i > 0) {
      const auto& prev = segments[i - 1];
      if (seg.start < prev.start) throw ValidationError("segments are not time ordered");
      // Every pair of segments is mutually exclusive in time, whatever the
      // channel, so ordered neighbours suffice.
      if (seg.start < prev.end() - kTimeSlack) {
        throw ValidationError("drive segments overlap at t = " + std::to_string(seg.start));
      }
    }
    max_end = std::max(max_end, seg.end());
  }
  if (std::abs(max_end - total_duration) > 1e-12 * std::max(1.0, total_duration) &&
      !(segments.empty() && total_duration >= 0.0)) {
    throw ValidationError("total_duration does not match the last segment end");
  }
}

void PulseSchedule::append(const PulseSchedule& other, double gap) {
  const double offset = segments.empty() && total_duration == 0.0 ? 0.0 : total_duration + gap;
  for (auto seg : other.segments) {
    seg.start += offset;
    segments.push_back(std::move(seg));
  }
  if (!other.segments.empty()) total_duration = offset + other.total_duration;
}

Envelope default_displacement_envelope() {
  Envelope e;
  e.shape = EnvelopeShape::kFlatTop;
  e.duration = 100e-9;
  e.rise = 10e-9;
  return e;
}

PulseSchedule displacement_schedule(Complex alpha, const Envelope& shape, double chi) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw ValidationError("displacement amplitude must be finite");
  }
  PulseSchedule out;
  out.chi = chi;
  const double magnitude = std::abs(alpha);
  if (magnitude == 0.0) return out;
  DriveSegment seg;
  seg.channel = Channel::kCavity;
  seg.envelope = shape;
  seg.envelope.amplitude = 1.0;
  seg.envelope.validate();
  seg.envelope.amplitude = magnitude / seg.envelope.unit_area();
  seg.tones = {Tone{0.0, -0.5 * kPi - std::arg(alpha)}};
  out.total_duration = seg.envelope.duration;
  out.segments.push_back(std::move(seg));
  return out;
}

namespace {

Envelope pi_envelope(const SnapPulseConfig& config, double duration) {
  Envelope e;
  e.shape = config.shape;
  e.duration = duration;
  e.truncation = config.truncation;
  e.rise = config.shape == EnvelopeShape::kFlatTop ? config.rise_fraction * duration : 0.0;
  e.amplitude = 1.0;
  e.validate();
  e.amplitude = kPiRotationArea / e.unit_area();
  return e;
}

}  // namespace

double single_tone_pi_duration(double chi, const SnapPulseConfig& config) {
  if (chi == 0.0 || !std::isfinite(chi)) throw ValidationError("chi must be finite and nonzero");
  if (config.base_pi_duration > 0.0) return config.base_pi_duration;
  if (!(config.weak_drive_ratio > 0.0)) throw ValidationError("weak_drive_ratio must be > 0");
  // Peak amplitude fixed at |chi| / ratio; area per unit duration depends only
  // on the shape, so solve for the duration that integrates to a pi rotation.
  const double peak = std::abs(chi) / config.weak_drive_ratio;
  const Envelope unit = pi_envelope(config, 1.0);
  return kPiRotationArea / (peak * unit.unit_area());
}

PulseSchedule selective_snap_schedule(std::span<const int> levels, std::span<const double> thetas, double chi,
                                      const SnapPulseConfig& config) {
  if (levels.empty()) throw ValidationError("SNAP needs at least one level (d >= 1)");
  if (levels.size() != thetas.size()) throw ValidationError("SNAP level and phase lists differ in length");
  if (chi == 0.0 || !std::isfinite(chi)) throw ValidationError("SNAP requires nonzero chi");
  for (double th : thetas) {
    if (!std::isfinite(th)) throw ValidationError("SNAP phase must be finite");
  }
  const double tones = static_cast<double>(levels.size());
  const double base = single_tone_pi_duration(chi, config);
  const Envelope env = pi_envelope(config, base * std::sqrt(tones));
  const double single_peak = pi_envelope(config, base).amplitude;
  if (single_peak > std::abs(chi) / config.weak_drive_ratio * (1.0 + 1e-9)) {
    throw ValidationError("SNAP pulse violates the weak-drive condition |eps| <= |chi| / " +
                          std::to_string(config.weak_drive_ratio));
  }

  PulseSchedule out;
  out.chi = chi;
  DriveSegment first;
  first.channel = Channel::kQubit;
  first.start = 0.0;
  first.envelope = env;
  DriveSegment second = first;
  second.start = env.duration;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double detuning = levels[j] * chi;
    first.tones.push_back(Tone{detuning, 0.0});
    second.tones.push_back(Tone{detuning, kPi + kSnapPhaseSign * thetas[j]});
  }
  out.segments = {std::move(first), std::move(second)};
  out.total_duration = 2.0 * env.duration;
  return out;
}

PulseSchedule snap_schedule(std::span<const double> thetas, double chi, const SnapPulseConfig& config) {
  std::vector<int> levels(thetas.size());
  for (std::size_t j = 0; j < levels.size(); ++j) levels[j] = static_cast<int>(j);
  return selective_snap_schedule(levels, thetas, chi, config);
}

PulseSchedule schedule_for_sequence(const GateSequence& seq, double chi, const ScheduleOptions& options) {
  PulseSchedule out;
  out.chi = chi;
  for (const auto& element : seq.elements) {
    PulseSchedule piece;
    if (const auto* disp = std::get_if<Displacement>(&element)) {
      piece = displacement_schedule(disp->alpha, options.displacement_envelope, chi);
    } else if (const auto* snap = std::get_if<Snap>(&element)) {
      piece = snap_schedule(snap->thetas, chi, options.snap);
    } else {
      throw ValidationError("Givens rotations have no pulse realization; native-compile the sequence first");
    }
    if (piece.empty()) continue;
    out.append(piece, options.buffer);
  }
  return out;
}

DriveCoefficients drive_coefficients(double t, std::span<const DriveSegment> segments) {
  DriveCoefficients c;
  for (const auto& seg : segments) {
    if (t < seg.start - kTimeSlack || t > seg.end() + kTimeSlack) continue;
    const double env = seg.envelope.value(std::clamp(t - seg.start, 0.0, seg.envelope.duration));
    if (env == 0.0) continue;
    Complex sum{0.0, 0.0};
    for (const auto& tone : seg.tones) sum += std::polar(1.0, -(tone.detuning * t + tone.phase));
    (seg.channel == Channel::kCavity ? c.cavity : c.qubit) += env * sum;
  }
  return c;
}

Operator drive_hamiltonian(double t, const PulseSchedule& schedule, const FockSpaceConfig& cfg) {
  if (t < -kTimeSlack || t > schedule.total_duration + kTimeSlack) {
    throw ValidationError("time " + std::to_string(t) + " lies outside the schedule");
  }
  const int n = cfg.n_cavity;
  const int dim = 2 * n;
  const auto c = drive_coefficients(t, schedule.segments);
  Operator h = Operator::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    const int g = 2 * k, e = 2 * k + 1;
    h(e, e) = schedule.chi * k;
    h(e, g) = c.qubit;
    h(g, e) = std::conj(c.qubit);
    if (k + 1 < n) {
      const double s = std::sqrt(k + 1.0);
      for (int q = 0; q < 2; ++q) {
        h(2 * (k + 1) + q, 2 * k + q) = c.cavity * s;
        h(2 * k + q, 2 * (k + 1) + q) = std::conj(c.cavity) * s;
      }
    }
  }
  return h;
}

nlohmann::json schedule_to_json(const PulseSchedule& schedule) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : schedule.segments) {
    nlohmann::json tones = nlohmann::json::array();
    for (const auto& tone : seg.tones) tones.push_back({{"detuning", tone.detuning}, {"phase", tone.phase}});
    nlohmann::json env = {{"shape", shape_name(seg.envelope.shape)},
                          {"duration", seg.envelope.duration},
                          {"amplitude", seg.envelope.amplitude}};
    if (seg.envelope.shape == EnvelopeShape::kFlatTop) {
      env["rise"] = seg.envelope.rise;
    } else {
      env["truncation"] = seg.envelope.truncation;
    }
    segs.push_back({{"channel", seg.channel == Channel::kCavity ? "cavity" : "qubit"},
                    {"start", seg.start},
                    {"envelope", env},
                    {"tones", tones}});
  }
  return {{"units", "SI"}, {"chi", schedule.chi}, {"total_duration", schedule.total_duration}, {"segments", segs}};
}

PulseSchedule schedule_from_json(const nlohmann::json& j) {
  PulseSchedule out;
  out.chi = j.at("chi").get<double>();
  out.total_duration = j.at("total_duration").get<double>();
  for (const auto& s : j.at("segments")) {
    DriveSegment seg;
    const auto channel = s.at("channel").get<std::string>();
    if (channel != "cavity" && channel != "qubit") throw ValidationError("unknown channel '" + channel + "'");
    seg.channel = channel == "cavity" ? Channel::kCavity : Channel::kQubit;
    seg.start = s.at("start").get<double>();
    const auto& e = s.at("envelope");
    seg.envelope.shape = shape_from_name(e.at("shape").get<std::string>());
    seg.envelope.duration = e.at("duration").get<double>();
    seg.envelope.amplitude = e.at("amplitude").get<double>();
    seg.envelope.rise = e.value("rise", 0.0);
    seg.envelope.truncation = e.value("truncation", 2.0);
    for (const auto& t : s.at("tones")) {
      seg.tones.push_back(Tone{t.at("detuning").get<double>(), t.at("phase").get<double>()});
    }
    out.segments.push_back(std::move(seg));
  }
  out.validate();
  return out;
}

}  // namespace qudit
