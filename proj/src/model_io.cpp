#include "impact/model_io.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "json.hpp"

namespace impact::io {

using nlohmann::json;

namespace {

void append_numbers(std::string& out, const double* data, Eigen::Index n) {
  out += '[';
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) out += ',';
    fmt::format_to(std::back_inserter(out), "{:.17g}", data[i]);
  }
  out += ']';
}

template <class Layer>
void append_layer(std::string& out, const Layer& l, const char* kind, int output_padding,
                  const std::string& pad) {
  fmt::format_to(std::back_inserter(out),
                 "{}{{\"kind\":\"{}\",\"in_ch\":{},\"out_ch\":{},\"k\":{},\"stride\":{},"
                 "\"padding\":{},\"output_padding\":{},\"weights\":",
                 pad, kind, l.in_ch, l.out_ch, l.k, l.stride, l.padding, output_padding);
  append_numbers(out, l.weights.data(), l.weights.size());
  out += ",\"bias\":";
  append_numbers(out, l.bias.data(), l.bias.size());
  out += '}';
}

template <class Layer>
void read_params(const json& j, Layer& layer) {
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (w.size() != static_cast<std::size_t>(layer.weights.size()) ||
      b.size() != static_cast<std::size_t>(layer.bias.size())) {
    throw std::runtime_error("model file: parameter count does not match layer shape");
  }
  std::copy(w.begin(), w.end(), layer.weights.data());
  std::copy(b.begin(), b.end(), layer.bias.data());
}

}  // namespace

std::string model_to_json(const ComponentModel& m, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner = pad + "  ";
  const auto& net = m.network;
  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "{{\n{}\"format_version\":{},\n", inner, kModelFormatVersion);
  fmt::format_to(it, "{}\"component\":\"{}\",\n", inner, component_name(m.component));
  fmt::format_to(it, "{}\"strategy\":\"{}\",\n", inner, nn::strategy_name(m.strategy));
  fmt::format_to(it, "{}\"window\":{},\n", inner, net.window);
  fmt::format_to(it, "{}\"kernel_size\":{},\n", inner, net.kernel_size);
  fmt::format_to(it, "{}\"channel_plan\":[{},{},{}],\n", inner, net.channel_plan[0],
                 net.channel_plan[1], net.channel_plan[2]);
  fmt::format_to(it, "{}\"normalization\":{{\"scale\":{:.17g}}},\n", inner, m.scale);
  fmt::format_to(it, "{}\"layers\":[\n", inner);
  const std::string layer_pad = inner + "  ";
  for (std::size_t i = 0; i < 3; ++i) {
    append_layer(out, net.encoder[i], "conv", 0, layer_pad);
    out += ",\n";
  }
  for (std::size_t i = 0; i < 3; ++i) {
    append_layer(out, net.decoder[i], "tconv", net.decoder[i].output_padding, layer_pad);
    out += i < 2 ? ",\n" : "\n";
  }
  fmt::format_to(it, "{}]\n{}}}", inner, pad);
  return out;
}

namespace {

ComponentModel model_from(const json& j) {
  if (j.value("format_version", 0) != kModelFormatVersion) {
    throw std::runtime_error("model file: unsupported format_version");
  }
  ComponentModel m;
  m.component = component_from_name(j.at("component").get<std::string>());
  if (!is_trainable(m.component)) throw std::runtime_error("model file: component is not trainable");
  m.strategy = nn::strategy_from_name(j.at("strategy").get<std::string>());
  m.scale = j.at("normalization").at("scale").get<double>();
  if (!(m.scale > 0.0)) throw std::runtime_error("model file: normalization scale must be positive");

  const auto plan = j.at("channel_plan").get<std::vector<int>>();
  if (plan.size() != 3) throw std::runtime_error("model file: channel_plan needs 3 entries");
  m.network = nn::make_network({plan[0], plan[1], plan[2]}, j.at("kernel_size").get<int>(),
                               j.at("window").get<int>());

  const auto& layers = j.at("layers");
  if (layers.size() != 6) throw std::runtime_error("model file: expected 6 layers");
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& lj = layers[i];
    const bool conv = i < 3;
    if (lj.at("kind").get<std::string>() != (conv ? "conv" : "tconv")) {
      throw std::runtime_error("model file: layer order must be conv x3 then tconv x3");
    }
    const auto check = [&lj](const auto& l, int out_pad) {
      if (lj.at("in_ch").get<int>() != l.in_ch || lj.at("out_ch").get<int>() != l.out_ch ||
          lj.at("k").get<int>() != l.k || lj.at("stride").get<int>() != l.stride ||
          lj.at("padding").get<int>() != l.padding ||
          lj.value("output_padding", 0) != out_pad) {
        throw std::runtime_error("model file: layer geometry does not match the channel plan");
      }
    };
    if (conv) {
      auto& l = m.network.encoder[i];
      check(l, 0);
      read_params(lj, l);
    } else {
      auto& l = m.network.decoder[i - 3];
      check(l, l.output_padding);
      read_params(lj, l);
    }
  }
  return m;
}

}  // namespace

ComponentModel model_from_json(const std::string& text) {
  try {
    return model_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
}

}  // namespace impact::io
