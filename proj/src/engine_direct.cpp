#include <algorithm>
#include <vector>

#include "engine_internal.hpp"
#include "l3fuse/engines.hpp"

namespace l3f {

ConvResult conv_direct(const Tensor4D& input, const Tensor4D& kernels,
                       const LayerSpec& spec) {
  detail::check_shapes(input, spec);
  detail::check_kernels(kernels, spec);
  const auto start = detail::Clock::now();

  const std::size_t out_h = spec.out_height();
  const std::size_t out_w = spec.out_width();
  const auto in_h = static_cast<std::ptrdiff_t>(spec.in_height);
  const auto in_w = static_cast<std::ptrdiff_t>(spec.in_width);
  const auto pad = static_cast<std::ptrdiff_t>(spec.pad_lo);
  const auto k = static_cast<std::ptrdiff_t>(spec.kernel);

  ConvResult result{Tensor4D({spec.batch, spec.out_channels, out_h, out_w}), {}};
  std::vector<double> acc(out_h * out_w);

  for (std::size_t b = 0; b < spec.batch; ++b) {
    for (std::size_t cp = 0; cp < spec.out_channels; ++cp) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t c = 0; c < spec.in_channels; ++c) {
        const float* in = input.plane(b, c);
        const float* w = kernels.plane(cp, c);
        for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
          for (std::ptrdiff_t kx = 0; kx < k; ++kx) {
            const double weight = w[ky * k + kx];
            const std::ptrdiff_t x_lo = std::max<std::ptrdiff_t>(0, pad - kx);
            const std::ptrdiff_t x_hi =
                std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(out_w), in_w + pad - kx);
            for (std::size_t y = 0; y < out_h; ++y) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y) + ky - pad;
              if (iy < 0 || iy >= in_h) continue;
              const float* row = in + iy * in_w;
              const std::ptrdiff_t shift = kx - pad;
              double* dst = acc.data() + y * out_w;
              for (std::ptrdiff_t x = x_lo; x < x_hi; ++x) dst[x] += weight * row[x + shift];
            }
          }
        }
      }
      float* out = result.output.plane(b, cp);
      for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i]);
    }
  }

  auto& stats = result.stats;
  stats.wall_seconds = detail::seconds_since(start);
  stats.flops = 2ull * spec.batch * spec.out_channels * out_h * out_w *
                spec.in_channels * spec.kernel * spec.kernel;
  return result;
}

}  // namespace l3f
