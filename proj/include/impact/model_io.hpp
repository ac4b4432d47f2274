#pragma once

#include <string>

#include "impact/core_types.hpp"
#include "impact/neuralnet.hpp"

namespace impact {

/// One trained per-component model together with its inference settings.
struct ComponentModel {
  ComponentId component = ComponentId::LinAccX;
  nn::Strategy strategy = nn::Strategy::Direct;
  double scale = 1.0;  ///< normalization divisor applied to inputs and targets
  nn::DenoiserNetwork network;
};

namespace io {

inline constexpr int kModelFormatVersion = 1;

/// Model file JSON. Weights and biases are written with 17 significant digits
/// so they reload bit-exactly; weights are flattened in row-major order of the
/// layer's stored shape ([out][in][k] for conv, [in][out][k] for tconv).
std::string model_to_json(const ComponentModel& model, int indent = 0);
ComponentModel model_from_json(const std::string& text);

}  // namespace io
}  // namespace impact
