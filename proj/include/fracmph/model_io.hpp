#pragma once

// JSON model files.
//
//   {"kind": "ph",          "pi": [...], "T": [[...], ...]}
//   {"kind": "fph",         "alpha": a, "pi": [...], "T": [[...]], "atom": optional}
//   {"kind": "mph",         "pi": [...], "T": [[...]], "R": [[...]]}
//   {"kind": "mpha",        "alpha": a, "pi": [...], "T": [[...]], "R": [[...]]}
//   {"kind": "feedforward", "alpha": a, "pi": [...],
//                           "blocks": [{"C": [[...]], "D": [[...]]}, ..., {"C": [[...]]}]}
//   {"kind": "bivariate",   "alpha": a,
//                           "blocks": {"pi1", "pi2", "pi3", "T11", "T12", "T13", "T22", "T33"}}
//   {"kind": "preset",      "name": "paper-fig3"}
//
// Every kind accepts an optional "nu": [...] (power transform, one exponent
// per component). Matrices are arrays of rows.

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "fracmph/constructors.hpp"
#include "fracmph/mph.hpp"

namespace fracmph {

struct LoadedModel {
  std::string kind;
  /// Every kind as an MPH*_alpha law (alpha = 1 for ph/mph, one all-ones
  /// reward column for the univariate kinds).
  MPHAlphaDist dist;
  std::optional<BivariateModel> bivariate;
  std::optional<FeedForwardSpec> feedforward;
  std::optional<PowerVector> nu;

  bool univariate() const { return dist.components() == 1; }
};

/// Parses and validates a model document. Throws ValidationError naming the
/// first violated invariant.
LoadedModel parse_model(const nlohmann::ordered_json& doc);
/// Reads a model file; IoError if it cannot be read, ValidationError if it
/// is malformed.
LoadedModel load_model(const std::string& path);

/// Document of kind fph for a PH_alpha law with an explicit atom field.
nlohmann::ordered_json fph_document(const FracPHDist& d);

nlohmann::ordered_json matrix_to_json(const Matrix& m);
nlohmann::ordered_json vector_to_json(const Vector& v);

}  // namespace fracmph
