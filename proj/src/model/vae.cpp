#include "ptinv/model/vae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptinv {

namespace {

std::size_t padding_for(std::size_t kernel) { return kernel / 2; }

bool contains(std::span<const ParamGroup> groups, ParamGroup g) {
  return std::find(groups.begin(), groups.end(), g) != groups.end();
}

}  // namespace

std::vector<std::size_t> VaeConfig::lengths() const {
  std::vector<std::size_t> out{input_dim};
  const std::size_t pad = padding_for(kernel);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::size_t L = out.back();
    if (L + 2 * pad < kernel) throw std::invalid_argument("vae config: sequence too short for the encoder stack");
    out.push_back((L + 2 * pad - kernel) / stride + 1);
  }
  return out;
}

void VaeConfig::validate() const {
  if (input_dim == 0 || latent_dim == 0 || kernel == 0 || stride == 0) {
    throw std::invalid_argument("vae config: dimensions must be positive");
  }
  if (channels.empty()) throw std::invalid_argument("vae config: encoder needs at least one layer");
  if (projector.input_dim != latent_dim) {
    throw std::invalid_argument("vae config: projector input must equal latent_dim");
  }
  const auto L = lengths();
  const std::size_t pad = padding_for(kernel);
  for (std::size_t i = L.size() - 1; i > 0; --i) {
    const std::size_t base = (L[i] - 1) * stride + kernel;
    if (base < 2 * pad || L[i - 1] + 2 * pad < base || L[i - 1] + 2 * pad - base >= stride) {
      throw std::invalid_argument("vae config: decoder cannot mirror encoder length " + std::to_string(L[i - 1]));
    }
  }
}

nlohmann::json VaeConfig::to_json() const {
  return {{"input_dim", input_dim}, {"channels", channels},     {"kernel", kernel},
          {"stride", stride},       {"latent_dim", latent_dim}, {"projector", projector.to_json()}};
}

VaeConfig VaeConfig::from_json(const nlohmann::json& j) {
  VaeConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.channels = j.value("channels", c.channels);
  c.kernel = j.value("kernel", c.kernel);
  c.stride = j.value("stride", c.stride);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  if (j.contains("projector")) {
    c.projector = ProjectorConfig::from_json(j["projector"]);
  } else {
    c.projector.input_dim = c.latent_dim;
  }
  c.validate();
  return c;
}

template <class T>
VaeModel<T>::VaeModel(const VaeConfig& config) : projector(config.projector), config_(config) {
  config.validate();
  const auto L = config.lengths();
  const std::size_t pad = padding_for(config.kernel);
  std::size_t cin = 1;
  for (auto c : config.channels) {
    encoder.emplace_back(cin, c, config.kernel, config.stride, pad);
    cin = c;
  }
  const std::size_t flat = config.channels.back() * L.back();
  mu_head = nn::Dense<T>(flat, config.latent_dim);
  logvar_head = nn::Dense<T>(flat, config.latent_dim);
  decoder_in = nn::Dense<T>(config.latent_dim, flat);
  for (std::size_t i = config.channels.size(); i > 0; --i) {
    const std::size_t c_in = config.channels[i - 1];
    const std::size_t c_out = i >= 2 ? config.channels[i - 2] : 1;
    const std::size_t base = (L[i] - 1) * config.stride + config.kernel;
    const std::size_t output_padding = L[i - 1] + 2 * pad - base;
    decoder.emplace_back(c_in, c_out, config.kernel, config.stride, pad, output_padding);
  }
}

template <class T>
VaeModel<T> VaeModel<T>::create(const VaeConfig& config, std::uint64_t seed) {
  VaeModel m(config);
  std::mt19937_64 rng(seed);
  const double relu_gain = std::sqrt(2.0);
  for (auto& c : m.encoder) c.init(rng, relu_gain);
  m.mu_head.init(rng, 1.0);
  m.logvar_head.init(rng, 0.1);
  m.decoder_in.init(rng, relu_gain);
  for (std::size_t i = 0; i < m.decoder.size(); ++i) m.decoder[i].init(rng, i + 1 < m.decoder.size() ? relu_gain : 1.0);
  m.projector.init(rng);
  return m;
}

template <class T>
VaeModel<T> VaeModel<T>::zeros_like() const {
  return VaeModel(config_);
}

template <class T>
std::pair<nn::Tensor<T>, nn::Tensor<T>> VaeModel<T>::encode(const nn::Tensor<T>& mel) const {
  if (mel.rank() != 2 || mel.dim(1) != config_.input_dim) {
    throw std::invalid_argument("vae: input shape " + mel.shape_str() + " is not [B, " +
                                std::to_string(config_.input_dim) + "]");
  }
  nn::Tensor<T> h = mel.reshaped({mel.dim(0), 1, config_.input_dim});
  for (const auto& c : encoder) h = nn::relu(c.forward(h));
  const std::size_t B = mel.dim(0);
  h = std::move(h).reshaped({B, h.size() / B});
  return {mu_head.forward(h), logvar_head.forward(h)};
}

template <class T>
nn::Tensor<T> VaeModel<T>::reconstruct(const nn::Tensor<T>& z) const {
  const std::size_t B = z.dim(0);
  const auto L = config_.lengths();
  nn::Tensor<T> h = nn::relu(decoder_in.forward(z)).reshaped({B, config_.channels.back(), L.back()});
  for (std::size_t i = 0; i < decoder.size(); ++i) {
    h = decoder[i].forward(h);
    h = i + 1 < decoder.size() ? nn::relu(std::move(h)) : nn::sigmoid(std::move(h));
  }
  return std::move(h).reshaped({B, config_.input_dim});
}

template <class T>
typename VaeModel<T>::Trace VaeModel<T>::forward(const nn::Tensor<T>& mel, const nn::Tensor<T>* eps) const {
  if (mel.rank() != 2 || mel.dim(1) != config_.input_dim) {
    throw std::invalid_argument("vae: input shape " + mel.shape_str() + " is not [B, " +
                                std::to_string(config_.input_dim) + "]");
  }
  const std::size_t B = mel.dim(0);
  Trace tr;
  tr.x = mel.reshaped({B, 1, config_.input_dim});
  const nn::Tensor<T>* h = &tr.x;
  for (const auto& c : encoder) {
    tr.enc.push_back(nn::relu(c.forward(*h)));
    h = &tr.enc.back();
  }
  tr.flat = h->reshaped({B, h->size() / B});
  tr.mu = mu_head.forward(tr.flat);
  tr.logvar = logvar_head.forward(tr.flat);
  tr.z = tr.mu;
  if (eps != nullptr) {
    nn::require_same_shape("vae eps", eps->shape, tr.mu.shape);
    tr.eps = *eps;
    tr.sampled = true;
    for (std::size_t i = 0; i < tr.z.size(); ++i) tr.z[i] += std::exp(T(0.5) * tr.logvar[i]) * tr.eps[i];
  }

  const auto L = config_.lengths();
  tr.dec_in = nn::relu(decoder_in.forward(tr.z)).reshaped({B, config_.channels.back(), L.back()});
  h = &tr.dec_in;
  for (std::size_t i = 0; i < decoder.size(); ++i) {
    auto y = decoder[i].forward(*h);
    tr.dec.push_back(i + 1 < decoder.size() ? nn::relu(std::move(y)) : nn::sigmoid(std::move(y)));
    h = &tr.dec.back();
  }
  tr.projector = projector.forward_trace(tr.z);
  return tr;
}

template <class T>
void VaeModel<T>::backward(const Trace& tr, const OutputGrads& g, VaeModel& grad,
                           std::span<const ParamGroup> train) const {
  const std::size_t B = tr.x.dim(0);
  const bool train_encoder = contains(train, ParamGroup::encoder);
  nn::Tensor<T> dz(tr.z.shape);

  if (contains(train, ParamGroup::projector)) {
    auto d = projector.backward(tr.projector, g.params_hat, grad.projector, train_encoder);
    if (train_encoder) dz = std::move(d);
  }

  if (contains(train, ParamGroup::reconstruction)) {
    nn::Tensor<T> d = g.recon.reshaped(tr.dec.back().shape);
    for (std::size_t i = decoder.size(); i > 0; --i) {
      const std::size_t k = i - 1;
      d = k + 1 < decoder.size() ? nn::relu_backward(tr.dec[k], std::move(d))
                                 : nn::sigmoid_backward(tr.dec[k], std::move(d));
      const nn::Tensor<T>& input = k == 0 ? tr.dec_in : tr.dec[k - 1];
      d = decoder[k].backward(input, d, grad.decoder[k]);
    }
    d = nn::relu_backward(tr.dec_in, std::move(d)).reshaped({B, tr.dec_in.size() / B});
    d = decoder_in.backward(tr.z, d, grad.decoder_in, train_encoder);
    if (train_encoder) {
      for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += d[i];
    }
  }

  if (!train_encoder) return;

  nn::Tensor<T> dmu = dz;
  nn::Tensor<T> dlogvar(tr.logvar.shape);
  if (tr.sampled) {
    for (std::size_t i = 0; i < dz.size(); ++i) {
      dlogvar[i] = dz[i] * T(0.5) * std::exp(T(0.5) * tr.logvar[i]) * tr.eps[i];
    }
  }
  if (!g.mu.data.empty()) {
    for (std::size_t i = 0; i < dmu.size(); ++i) dmu[i] += g.mu[i];
  }
  if (!g.logvar.data.empty()) {
    for (std::size_t i = 0; i < dlogvar.size(); ++i) dlogvar[i] += g.logvar[i];
  }
  nn::Tensor<T> dflat = mu_head.backward(tr.flat, dmu, grad.mu_head);
  const nn::Tensor<T> dflat2 = logvar_head.backward(tr.flat, dlogvar, grad.logvar_head);
  for (std::size_t i = 0; i < dflat.size(); ++i) dflat[i] += dflat2[i];

  nn::Tensor<T> d = std::move(dflat).reshaped(tr.enc.back().shape);
  for (std::size_t i = encoder.size(); i > 0; --i) {
    const std::size_t k = i - 1;
    d = nn::relu_backward(tr.enc[k], std::move(d));
    const nn::Tensor<T>& input = k == 0 ? tr.x : tr.enc[k - 1];
    d = encoder[k].backward(input, d, grad.encoder[k], k > 0);
  }
}

template <class T>
std::vector<std::pair<std::string, nn::Tensor<T>*>> VaeModel<T>::named_params(ParamGroup group) {
  std::vector<std::pair<std::string, nn::Tensor<T>*>> out;
  switch (group) {
    case ParamGroup::encoder:
      for (std::size_t i = 0; i < encoder.size(); ++i) {
        out.emplace_back("encoder.conv" + std::to_string(i) + ".weight", &encoder[i].weight);
        out.emplace_back("encoder.conv" + std::to_string(i) + ".bias", &encoder[i].bias);
      }
      out.emplace_back("encoder.mu.weight", &mu_head.weight);
      out.emplace_back("encoder.mu.bias", &mu_head.bias);
      out.emplace_back("encoder.logvar.weight", &logvar_head.weight);
      out.emplace_back("encoder.logvar.bias", &logvar_head.bias);
      break;
    case ParamGroup::reconstruction:
      out.emplace_back("reconstruction.dense.weight", &decoder_in.weight);
      out.emplace_back("reconstruction.dense.bias", &decoder_in.bias);
      for (std::size_t i = 0; i < decoder.size(); ++i) {
        out.emplace_back("reconstruction.deconv" + std::to_string(i) + ".weight", &decoder[i].weight);
        out.emplace_back("reconstruction.deconv" + std::to_string(i) + ".bias", &decoder[i].bias);
      }
      break;
    case ParamGroup::projector:
      out = projector.named_params(kProjectorPrefix);
      break;
  }
  return out;
}

template <class T>
std::vector<std::pair<std::string, nn::Tensor<T>*>> VaeModel<T>::named_params() {
  auto out = named_params(ParamGroup::encoder);
  for (auto g : {ParamGroup::reconstruction, ParamGroup::projector}) {
    auto more = named_params(g);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

template class VaeModel<float>;
template class VaeModel<double>;

nn::Checkpoint to_checkpoint(VaeModel<float>& model, nlohmann::json header) {
  nn::Checkpoint ck;
  header["model"] = model.config().to_json();
  ck.header = std::move(header);
  for (auto& [name, t] : model.named_params()) ck.add(name, *t);
  return ck;
}

VaeModel<float> vae_from_checkpoint(const nn::Checkpoint& ck) {
  if (!ck.header.contains("model")) throw std::runtime_error("checkpoint has no model description");
  VaeModel<float> model(VaeConfig::from_json(ck.header["model"]));
  for (auto& [name, t] : model.named_params()) {
    const auto& stored = ck.get(name);
    nn::require_same_shape(name, stored.shape, t->shape);
    *t = stored;
  }
  return model;
}

}  // namespace ptinv
