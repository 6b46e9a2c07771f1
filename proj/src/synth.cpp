#include "gaitae/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gaitae/error.hpp"

namespace gaitae {

namespace {

constexpr double kTemplateHeight = 1.75;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

double lift(double psi) {
  const double c = std::max(0.0, std::cos(psi));
  return c * c;
}

std::size_t idx(Joint j) { return static_cast<std::size_t>(j); }

struct LegMotion {
  double step;
  double foot_lift;
  double knee_lift;
};

void move_leg(std::array<Vec3, kJointCount>& p, Joint knee, Joint ankle, Joint foot, double psi,
              const LegMotion& m, double ankle_sway) {
  const double s = std::sin(psi);
  const double l = lift(psi);
  p[idx(knee)].z -= 0.5 * m.step * s;
  p[idx(knee)].y += m.knee_lift * l;
  for (Joint j : {ankle, foot}) {
    p[idx(j)].z -= m.step * s;
    p[idx(j)].y += m.foot_lift * l;
    p[idx(j)].x += ankle_sway * s;
  }
}

void move_arm(std::array<Vec3, kJointCount>& p, Joint elbow, std::initializer_list<Joint> distal, double alpha,
              double swing) {
  const double s = std::sin(alpha);
  p[idx(elbow)].z -= 0.5 * swing * s;
  for (Joint j : distal) {
    p[idx(j)].z -= swing * s;
    p[idx(j)].y += 0.2 * swing * s * s;
  }
}

constexpr Joint kSwayJoints[] = {
    Joint::SpineBase,    Joint::SpineMid,     Joint::Neck,         Joint::Head,       Joint::ShoulderLeft,
    Joint::ElbowLeft,    Joint::WristLeft,    Joint::HandLeft,     Joint::ShoulderRight, Joint::ElbowRight,
    Joint::WristRight,   Joint::HandRight,    Joint::HipLeft,      Joint::HipRight,   Joint::SpineShoulder,
    Joint::HandTipLeft,  Joint::ThumbLeft,    Joint::HandTipRight, Joint::ThumbRight,
};

}  // namespace

const std::array<Vec3, kJointCount>& template_posture() {
  static const std::array<Vec3, kJointCount> posture{{
      {0.00, 0.95, 0.00},    // SpineBase
      {0.00, 1.20, 0.00},    // SpineMid
      {0.00, 1.50, 0.00},    // Neck
      {0.00, 1.63, 0.00},    // Head
      {0.18, 1.43, 0.00},    // ShoulderLeft
      {0.21, 1.16, 0.00},    // ElbowLeft
      {0.22, 0.92, 0.00},    // WristLeft
      {0.22, 0.85, -0.01},   // HandLeft
      {-0.18, 1.43, 0.00},   // ShoulderRight
      {-0.21, 1.16, 0.00},   // ElbowRight
      {-0.22, 0.92, 0.00},   // WristRight
      {-0.22, 0.85, -0.01},  // HandRight
      {0.09, 0.92, 0.00},    // HipLeft
      {0.10, 0.52, -0.02},   // KneeLeft
      {0.10, 0.10, 0.02},    // AnkleLeft
      {0.11, 0.03, -0.08},   // FootLeft
      {-0.09, 0.92, 0.00},   // HipRight
      {-0.10, 0.52, -0.02},  // KneeRight
      {-0.10, 0.10, 0.02},   // AnkleRight
      {-0.11, 0.03, -0.08},  // FootRight
      {0.00, 1.44, 0.00},    // SpineShoulder
      {0.22, 0.77, -0.01},   // HandTipLeft
      {0.20, 0.83, -0.04},   // ThumbLeft
      {-0.22, 0.77, -0.01},  // HandTipRight
      {-0.20, 0.83, -0.04},  // ThumbRight
  }};
  return posture;
}

void SynthConfig::validate() const {
  if (n_frames == 0) throw Error(ErrorKind::argument, "n_frames must be > 0");
  if (!(frame_rate_hz > 0.0) || !(cadence_hz > 0.0) || !(height_m > 0.0)) {
    throw Error(ErrorKind::argument, "frame rate, cadence and height must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::argument, "noise_sigma must be >= 0");
  if (!(abnormality.magnitude >= 0.0)) throw Error(ErrorKind::argument, "perturbation magnitude must be >= 0");
  const GaitAmplitudes& a = amplitudes;
  for (double v : {a.step, a.foot_lift, a.knee_lift, a.arm_swing, a.pelvis_bob, a.trunk_sway, a.ankle_sway}) {
    if (!(v >= 0.0)) throw Error(ErrorKind::argument, "gait amplitudes must be >= 0");
  }
}

GaitSequence synth_gait(const SynthConfig& cfg) {
  cfg.validate();
  const double scale = cfg.height_m / kTemplateHeight;
  GaitAmplitudes amp = cfg.amplitudes;
  for (double* v : {&amp.step, &amp.foot_lift, &amp.knee_lift, &amp.arm_swing, &amp.pelvis_bob, &amp.trunk_sway,
                    &amp.ankle_sway}) {
    *v *= scale;
  }

  std::array<Vec3, kJointCount> rest{};
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const Vec3& t = template_posture()[j];
    const Vec3& o = cfg.posture_offsets[j];
    rest[j] = {scale * (t.x + o.x), scale * (t.y + o.y), scale * (t.z + o.z) + cfg.depth_m};
  }

  LegMotion left{amp.step, amp.foot_lift, amp.knee_lift};
  LegMotion right = left;
  double lag_left = 0.0;
  const double mag = cfg.abnormality.magnitude;
  switch (cfg.abnormality.type) {
    case GaitKind::Type::normal:
      break;
    case GaitKind::Type::sole_pad: {
      const double h = mag / 100.0;
      for (Joint j : {Joint::KneeRight, Joint::AnkleRight, Joint::FootRight}) rest[idx(j)].y += h;
      rest[idx(Joint::HipRight)].y += h / 2.0;
      rest[idx(Joint::SpineBase)].y += h / 4.0;
      right.step *= std::max(0.0, 1.0 - 0.02 * mag);
      break;
    }
    case GaitKind::Type::ankle_weight: {
      left.step *= std::max(0.0, 1.0 - 0.05 * mag);
      left.foot_lift *= std::max(0.0, 1.0 - 0.08 * mag);
      left.knee_lift *= std::max(0.0, 1.0 - 0.08 * mag);
      lag_left = 0.05 * mag;
      break;
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);

  GaitSequence seq;
  seq.subject_id = cfg.subject_id;
  seq.gait = cfg.abnormality;
  seq.frames.reserve(cfg.n_frames);
  constexpr double pi = std::numbers::pi;
  for (std::size_t n = 0; n < cfg.n_frames; ++n) {
    const double t = static_cast<double>(n) / cfg.frame_rate_hz;
    const double phi = 2.0 * pi * cfg.cadence_hz * t + cfg.phase_offset;
    const double psi_left = phi - lag_left;
    const double psi_right = phi + pi;

    RawSkeleton s;
    s.frame_index = n;
    auto& p = s.joints;
    p = rest;
    move_leg(p, Joint::KneeLeft, Joint::AnkleLeft, Joint::FootLeft, psi_left, left, amp.ankle_sway);
    move_leg(p, Joint::KneeRight, Joint::AnkleRight, Joint::FootRight, psi_right, right, amp.ankle_sway);
    move_arm(p, Joint::ElbowLeft, {Joint::WristLeft, Joint::HandLeft, Joint::HandTipLeft, Joint::ThumbLeft},
             psi_left + pi, amp.arm_swing);
    move_arm(p, Joint::ElbowRight, {Joint::WristRight, Joint::HandRight, Joint::HandTipRight, Joint::ThumbRight},
             psi_right + pi, amp.arm_swing);

    const double bob = amp.pelvis_bob * std::cos(2.0 * phi);
    for (auto& q : p) q.y += bob;
    const double sway = amp.trunk_sway * std::sin(phi);
    for (Joint j : kSwayJoints) p[idx(j)].x += sway;

    if (cfg.noise_sigma > 0.0) {
      for (auto& q : p) {
        q.x += noise(rng);
        q.y += noise(rng);
        q.z += noise(rng);
      }
    }
    seq.frames.push_back(s);
  }
  return seq;
}

void SynthPlan::validate() const {
  if (subjects == 0) throw Error(ErrorKind::argument, "synth plan needs at least one subject");
  if (n_frames == 0) throw Error(ErrorKind::argument, "synth plan needs n_frames > 0");
  if (variants.empty()) throw Error(ErrorKind::argument, "synth plan needs at least one gait variant");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::argument, "noise_sigma must be >= 0");
}

std::string subject_name(std::size_t index) { return "s" + std::to_string(index + 1); }

SynthConfig subject_config(const SynthPlan& plan, std::size_t subject_index, std::size_t variant_index) {
  SynthConfig cfg;
  cfg.subject_id = subject_name(subject_index);
  cfg.n_frames = plan.n_frames;
  cfg.noise_sigma = plan.noise_sigma;
  cfg.abnormality = plan.variants.at(variant_index);
  cfg.seed = splitmix64(splitmix64(plan.seed ^ splitmix64(subject_index + 1)) + variant_index);

  if (plan.subject_variation) {
    // The body depends on the subject only, so it is shared by all variants.
    std::mt19937_64 body(splitmix64(plan.seed) ^ splitmix64(0x5b0d1e5ull + subject_index));
    cfg.height_m = uniform(body, 1.55, 1.90);
    cfg.cadence_hz = uniform(body, 0.70, 0.80);
    cfg.phase_offset = uniform(body, 0.0, 2.0 * std::numbers::pi);
    GaitAmplitudes& a = cfg.amplitudes;
    for (double* v : {&a.step, &a.foot_lift, &a.knee_lift, &a.arm_swing, &a.pelvis_bob, &a.trunk_sway,
                      &a.ankle_sway}) {
      *v *= uniform(body, 0.9, 1.1);
    }
    for (auto& o : cfg.posture_offsets) {
      o.x = uniform(body, -0.015, 0.015);
      o.y = uniform(body, -0.015, 0.015);
      o.z = uniform(body, -0.01, 0.01);
    }
  }
  return cfg;
}

std::vector<GaitSequence> synth_dataset(const SynthPlan& plan) {
  plan.validate();
  std::vector<GaitSequence> out;
  out.reserve(plan.subjects * plan.variants.size());
  for (std::size_t s = 0; s < plan.subjects; ++s) {
    for (std::size_t v = 0; v < plan.variants.size(); ++v) out.push_back(synth_gait(subject_config(plan, s, v)));
  }
  return out;
}

}  // namespace gaitae
