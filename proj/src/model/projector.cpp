#include "ptinv/model/projector.hpp"

#include <cmath>

namespace ptinv {

nlohmann::json ProjectorConfig::to_json() const {
  return {{"input_dim", input_dim}, {"hidden", hidden}, {"output_dim", output_dim}};
}

ProjectorConfig ProjectorConfig::from_json(const nlohmann::json& j) {
  ProjectorConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.output_dim = j.value("output_dim", c.output_dim);
  if (c.input_dim == 0 || c.output_dim == 0) throw std::invalid_argument("projector: zero-width layer");
  for (auto h : c.hidden) {
    if (h == 0) throw std::invalid_argument("projector: zero-width layer");
  }
  return c;
}

template <class T>
Projector<T>::Projector(const ProjectorConfig& config) : config_(config) {
  layers[0] = nn::Dense<T>(config.input_dim, config.hidden[0]);
  layers[1] = nn::Dense<T>(config.hidden[0], config.hidden[1]);
  layers[2] = nn::Dense<T>(config.hidden[1], config.hidden[2]);
  layers[3] = nn::Dense<T>(config.hidden[2], config.output_dim);
}

template <class T>
void Projector<T>::init(std::mt19937_64& rng) {
  for (std::size_t i = 0; i < 3; ++i) layers[i].init(rng, std::sqrt(2.0));
  layers[3].init(rng, 1.0);
}

template <class T>
Projector<T> Projector<T>::zeros_like() const {
  return Projector(config_);
}

template <class T>
nn::Tensor<T> Projector<T>::forward(const nn::Tensor<T>& x) const {
  nn::Tensor<T> h = nn::relu(layers[0].forward(x));
  h = nn::relu(layers[1].forward(h));
  h = nn::relu(layers[2].forward(h));
  return nn::sigmoid(layers[3].forward(h));
}

template <class T>
typename Projector<T>::Trace Projector<T>::forward_trace(nn::Tensor<T> x) const {
  Trace tr;
  tr.input = std::move(x);
  tr.out[0] = nn::relu(layers[0].forward(tr.input));
  tr.out[1] = nn::relu(layers[1].forward(tr.out[0]));
  tr.out[2] = nn::relu(layers[2].forward(tr.out[1]));
  tr.out[3] = nn::sigmoid(layers[3].forward(tr.out[2]));
  return tr;
}

template <class T>
nn::Tensor<T> Projector<T>::backward(const Trace& tr, const nn::Tensor<T>& d_out, Projector& grad,
                                     bool need_dx) const {
  nn::Tensor<T> d = nn::sigmoid_backward(tr.out[3], d_out);
  d = layers[3].backward(tr.out[2], d, grad.layers[3]);
  d = layers[2].backward(tr.out[1], nn::relu_backward(tr.out[2], std::move(d)), grad.layers[2]);
  d = layers[1].backward(tr.out[0], nn::relu_backward(tr.out[1], std::move(d)), grad.layers[1]);
  return layers[0].backward(tr.input, nn::relu_backward(tr.out[0], std::move(d)), grad.layers[0], need_dx);
}

template <class T>
std::vector<std::pair<std::string, nn::Tensor<T>*>> Projector<T>::named_params(const std::string& prefix) {
  std::vector<std::pair<std::string, nn::Tensor<T>*>> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string base = prefix + "dense" + std::to_string(i);
    out.emplace_back(base + ".weight", &layers[i].weight);
    out.emplace_back(base + ".bias", &layers[i].bias);
  }
  return out;
}

template <class T>
std::vector<std::pair<std::string, const nn::Tensor<T>*>> Projector<T>::named_params(
    const std::string& prefix) const {
  std::vector<std::pair<std::string, const nn::Tensor<T>*>> out;
  for (auto& [name, t] : const_cast<Projector*>(this)->named_params(prefix)) out.emplace_back(name, t);
  return out;
}

template class Projector<float>;
template class Projector<double>;

}  // namespace ptinv
