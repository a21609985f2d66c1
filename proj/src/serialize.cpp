#include "cvtele/serialize.hpp"

namespace cvtele {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ConfigError("matrix JSON: data length does not match rows * cols");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = data[static_cast<std::size_t>(r * cols + c)];
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

json to_json(const DensityMatrix& rho) {
  json j = matrix_to_json(rho.data());
  j["n_max"] = rho.dim().n();
  j["leakage"] = rho.leakage();
  return j;
}

DensityMatrix density_matrix_from_json(const json& j) {
  const FockDim dim(j.at("n_max").get<int>());
  return DensityMatrix(dim, matrix_from_json(j), j.value("leakage", 0.0));
}

json to_json(const TwoModeState& w) {
  json j = matrix_to_json(w.dense());
  j["n_max"] = w.dim().n();
  j["leakage"] = w.leakage();
  j["layout"] = "row = a * n_max + b";
  return j;
}

TwoModeState two_mode_state_from_json(const json& j) {
  const FockDim dim(j.at("n_max").get<int>());
  return TwoModeState::from_dense(dim, matrix_from_json(j), j.value("leakage", 0.0));
}

}  // namespace cvtele
