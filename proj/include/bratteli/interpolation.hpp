#pragma once

// Interpolating a direct system through a target system with the Fermion
// property: isometric compression maps gamma_k : A_k -> B_{n_k} with
// contractive left inverses delta_k, commuting with the source embeddings
// phi_k and the composed target embeddings theta_k.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bratteli/maps.hpp"
#include "bratteli/system.hpp"

namespace bratteli {

enum class Variant { SelfAdjoint, Ordered, Refinement };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct CheckRecord {
  std::string check;  // wellformed, isometry, left_inverse, square_gamma, square_delta, ...
  std::size_t level = 0;
  bool passed = true;
  std::optional<IndexPair> counterexample;  // a matrix unit of the relevant domain
  std::string detail;
  bool operator==(const CheckRecord&) const = default;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  bool passed() const;
  /// First failing record, if any.
  const CheckRecord* first_failure() const;
};

struct InterpolationCertificate {
  Variant variant = Variant::SelfAdjoint;
  bool ordered = false;
  bool unitized = false;
  std::size_t depth = 0;

  std::vector<Algebra> source_algebras;          // A_1 .. A_K
  std::vector<MatrixUnitHom> source_embeddings;  // phi_1 .. phi_{K-1}

  std::vector<std::size_t> target_levels;          // n_1 < ... < n_K
  std::vector<std::size_t> distinguished;          // witness vertex at n_k
  std::vector<Algebra> target_algebras;            // B_{n_1} .. B_{n_K}
  std::vector<MatrixUnitHom> target_embeddings;    // psi_{n_1} .. psi_{n_K - 1}
  std::vector<MatrixUnitHom> theta;                // theta_k : B_{n_k} -> B_{n_{k+1}}

  std::vector<CompressionMap> gamma;
  std::vector<CompressionMap> delta;
  std::vector<IsometryCertificate> isometry;

  VerificationReport report;  // as recorded by the producer
};

/// Builds the certificate and records verify_certificate's report in it.
/// FermionUnavailable when the target has no usable witness within `horizon` levels.
InterpolationCertificate lemma11_construct(const DirectSystem& source, const DirectSystem& target,
                                           std::size_t depth, Variant variant,
                                           std::size_t horizon = 64);

/// Re-derives every check from the certificate's explicit data.
/// OpenMP-parallel over matrix units; counterexamples are the least failing unit.
VerificationReport verify_certificate(const InterpolationCertificate& cert);
/// Single-threaded reference implementation of the same checks.
VerificationReport verify_certificate_serial(const InterpolationCertificate& cert);

struct FaultDescription {
  std::string map;  // "gamma" or "delta"
  std::size_t level = 0;
  std::size_t part = 0;
  std::size_t position = 0;
  std::size_t old_index = 0;
  std::size_t new_index = 0;
};

/// Moves one index of one elementary summand of some gamma_k or delta_k to
/// another index of the same summand.  Returns nullopt if the perturbed map
/// is rejected at construction (it then never reaches the verifier).
std::optional<FaultDescription> inject_fault(InterpolationCertificate& cert, std::mt19937_64& rng);

}  // namespace bratteli
