#include "ptinv/nn/losses.hpp"

namespace ptinv::nn {

template float kl_gaussian<float>(std::span<const float>, std::span<const float>);
template double kl_gaussian<double>(std::span<const double>, std::span<const double>);
template float huber<float>(float, float, float);
template double huber<double>(double, double, double);

}  // namespace ptinv::nn
