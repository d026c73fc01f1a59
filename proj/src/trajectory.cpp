#include "simlab/trajectory.hpp"

#include <stdexcept>

namespace simlab {

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::OneLayerAnalytic: return "one_layer_analytic";
    case ModelKind::OneLayerEuler: return "one_layer_euler";
    case ModelKind::TwoLayerW: return "two_layer_w";
    case ModelKind::TwoLayerU: return "two_layer_u";
  }
  throw std::invalid_argument("model_kind_name: unknown kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "one_layer_analytic") return ModelKind::OneLayerAnalytic;
  if (name == "one_layer_euler") return ModelKind::OneLayerEuler;
  if (name == "two_layer_w") return ModelKind::TwoLayerW;
  if (name == "two_layer_u") return ModelKind::TwoLayerU;
  throw std::invalid_argument("unknown model kind: " + name);
}

}  // namespace simlab
