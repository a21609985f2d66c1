#pragma once

// JSON debug format: matrices are row-major lists of [re, im] pairs.
//   {"rows": R, "cols": C, "data": [[re, im], ...]}
// Density matrices add "n_max" and "leakage"; two-mode states use the
// row = a * n_max + b flattening.

#include <json.hpp>

#include "cvtele/fock.hpp"

namespace cvtele {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TwoModeState& w);
TwoModeState two_mode_state_from_json(const nlohmann::json& j);

}  // namespace cvtele
