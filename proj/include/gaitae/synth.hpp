#pragma once

// Deterministic synthetic treadmill gaits (frontal view, subject facing the
// sensor). Sensor frame: X to the subject's left, Y up, Z away from the
// sensor; walking direction is -Z.
//
// For frame n, t = n / frame_rate_hz and phi = 2*pi*cadence_hz*t + phase_offset.
// Leg phases: psi_L = phi - lag_L, psi_R = phi + pi. Arm phase = leg phase + pi.
// With lift(psi) = max(0, cos psi)^2, a leg with step S, foot lift F and
// knee lift K moves
//   knee:           z -= 0.5 S sin psi,  y += K lift(psi)
//   ankle, foot:    z -= S sin psi,      y += F lift(psi),  x += ankle_sway sin psi
// an arm with swing A moves
//   elbow:                          z -= 0.5 A sin alpha
//   wrist, hand, hand tip, thumb:   z -= A sin alpha,  y += 0.2 A sin^2 alpha
// and globally every joint gets y += pelvis_bob cos(2 phi); trunk, head,
// shoulders, arms and hips get x += trunk_sway sin phi.
//
// Abnormalities:
//   sole_pad(h cm), right leg: knee, ankle, foot y += h; right hip y += h/2;
//     SpineBase y += h/4; right step S *= max(0, 1 - 0.02 h).
//   ankle_weight(m kg), left leg: S *= max(0, 1 - 0.05 m);
//     F, K *= max(0, 1 - 0.08 m); lag_L = 0.05 m rad.
// Template posture, offsets and amplitudes scale with height_m / 1.75; the
// sole pad height does not. Gaussian noise N(0, noise_sigma) is added to
// every coordinate last.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gaitae/dataset.hpp"
#include "gaitae/skeleton.hpp"

namespace gaitae {

struct GaitAmplitudes {
  double step = 0.12;
  double foot_lift = 0.06;
  double knee_lift = 0.04;
  double arm_swing = 0.10;
  double pelvis_bob = 0.02;
  double trunk_sway = 0.02;
  double ankle_sway = 0.01;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_frames = 1200;
  double frame_rate_hz = 30.0;
  double cadence_hz = 0.75;  // strides per second
  double phase_offset = 0.0;
  double height_m = 1.75;
  double depth_m = 2.5;
  GaitAmplitudes amplitudes;
  // Per-joint deviation from the template posture (before height scaling).
  std::array<Vec3, kJointCount> posture_offsets{};
  GaitKind abnormality;
  double noise_sigma = 0.005;
  std::string subject_id = "s0";

  void validate() const;
};

// Rest posture of a 1.75 m subject at the origin, before depth offset.
const std::array<Vec3, kJointCount>& template_posture();

GaitSequence synth_gait(const SynthConfig& cfg);

// Dataset-level generator: `subjects` subjects ("s1".."sN"), each with its
// own body (height, posture offsets, amplitudes, cadence, phase) drawn from
// `seed`, walking every variant in `variants`.
struct SynthPlan {
  std::uint64_t seed = 2019;
  std::size_t subjects = 9;
  std::size_t n_frames = 1200;
  double noise_sigma = 0.005;
  bool subject_variation = true;
  std::vector<GaitKind> variants{GaitKind::normal(), GaitKind::sole_pad(5), GaitKind::sole_pad(10),
                                 GaitKind::sole_pad(15), GaitKind::ankle_weight(4)};

  void validate() const;
};

std::string subject_name(std::size_t index);  // 0 -> "s1"
SynthConfig subject_config(const SynthPlan& plan, std::size_t subject_index, std::size_t variant_index);
std::vector<GaitSequence> synth_dataset(const SynthPlan& plan);

}  // namespace gaitae
