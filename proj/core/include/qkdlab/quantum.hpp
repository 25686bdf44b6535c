#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "qkdlab/random.hpp"

namespace qkdlab::quantum {

enum class Basis : std::uint8_t { Rectilinear = 0, Diagonal = 1 };

/// Polarization states. H = 0 deg, V = 90 deg, D = 45 deg, A = 135 deg.
/// H and D carry bit 0; V and A carry bit 1.
enum class Polarization : std::uint8_t { H = 0, V = 1, D = 2, A = 3 };

inline constexpr std::array<Basis, 2> kBases{Basis::Rectilinear, Basis::Diagonal};
inline constexpr std::array<Polarization, 4> kPolarizations{Polarization::H, Polarization::V,
                                                             Polarization::D, Polarization::A};

constexpr Basis other(Basis b) {
  return b == Basis::Rectilinear ? Basis::Diagonal : Basis::Rectilinear;
}

constexpr Polarization encode(std::uint8_t bit, Basis basis) {
  return static_cast<Polarization>((static_cast<std::uint8_t>(basis) << 1) | (bit & 1U));
}

constexpr Basis basis_of(Polarization p) {
  return static_cast<Basis>(static_cast<std::uint8_t>(p) >> 1);
}

constexpr std::uint8_t bit_of(Polarization p) { return static_cast<std::uint8_t>(p) & 1U; }

/// The other state of the same basis (a 90 degree rotation).
constexpr Polarization orthogonal(Polarization p) {
  return static_cast<Polarization>(static_cast<std::uint8_t>(p) ^ 1U);
}

constexpr bool are_orthogonal(Polarization a, Polarization b) { return orthogonal(a) == b; }

std::string_view to_string(Basis b);
std::string_view to_string(Polarization p);

struct PhotonPulse {
  std::uint32_t photon_count = 1;
  Polarization polarization = Polarization::H;

  bool is_vacuum() const { return photon_count == 0; }
  friend bool operator==(const PhotonPulse&, const PhotonPulse&) = default;
};

class SourceModel {
 public:
  enum class Kind : std::uint8_t { SinglePhoton, WeakLaser };

  static SourceModel single_photon() { return SourceModel(Kind::SinglePhoton, 1.0); }
  /// Throws ConfigInvalid unless 0 < mean_photon_number <= 2.
  static SourceModel weak_laser(double mean_photon_number);

  Kind kind() const { return kind_; }
  double mean_photon_number() const { return mean_; }

  friend bool operator==(const SourceModel&, const SourceModel&) = default;

 private:
  SourceModel(Kind kind, double mean) : kind_(kind), mean_(mean) {}

  Kind kind_;
  double mean_;
};

/// Result of a detector click: a bit, or nothing for an empty pulse.
enum class Outcome : std::uint8_t { Zero = 0, One = 1, NoDetection = 2 };

constexpr bool detected(Outcome o) { return o != Outcome::NoDetection; }
constexpr std::uint8_t bit_of(Outcome o) { return static_cast<std::uint8_t>(o) & 1U; }
constexpr Outcome outcome_for(std::uint8_t bit) { return static_cast<Outcome>(bit & 1U); }

/// Projective measurement in `basis`. A matching basis returns the encoded
/// bit; a mismatched basis returns a fair coin and collapses the pulse onto
/// the measured state.
Outcome measure(PhotonPulse& pulse, Basis basis, RandomStream& rng);

PhotonPulse emit_pulse(const SourceModel& source, std::uint8_t bit, Basis basis, RandomStream& rng);

}  // namespace qkdlab::quantum
