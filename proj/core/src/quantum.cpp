#include "qkdlab/quantum.hpp"

#include <fmt/format.h>

#include "qkdlab/errors.hpp"

namespace qkdlab::quantum {

std::string_view to_string(Basis b) {
  return b == Basis::Rectilinear ? "rectilinear" : "diagonal";
}

std::string_view to_string(Polarization p) {
  switch (p) {
    case Polarization::H: return "H";
    case Polarization::V: return "V";
    case Polarization::D: return "D";
    case Polarization::A: return "A";
  }
  return "?";
}

SourceModel SourceModel::weak_laser(double mean_photon_number) {
  if (!(mean_photon_number > 0.0 && mean_photon_number <= 2.0)) {
    throw Error(ErrorCode::ConfigInvalid,
                fmt::format("source.mu: mean photon number {} outside (0, 2]", mean_photon_number));
  }
  return SourceModel(Kind::WeakLaser, mean_photon_number);
}

Outcome measure(PhotonPulse& pulse, Basis basis, RandomStream& rng) {
  if (pulse.is_vacuum()) return Outcome::NoDetection;
  if (basis_of(pulse.polarization) == basis) return outcome_for(bit_of(pulse.polarization));
  const std::uint8_t bit = rng.bit();
  pulse.polarization = encode(bit, basis);
  return outcome_for(bit);
}

PhotonPulse emit_pulse(const SourceModel& source, std::uint8_t bit, Basis basis, RandomStream& rng) {
  PhotonPulse pulse;
  pulse.polarization = encode(bit, basis);
  pulse.photon_count =
      source.kind() == SourceModel::Kind::SinglePhoton ? 1U : rng.poisson(source.mean_photon_number());
  return pulse;
}

}  // namespace qkdlab::quantum
