#pragma once

#include <cstddef>
#include <string>

namespace l3f {

// A 2-D convolutional layer with an isotropic K x K kernel, stride 1.
struct LayerSpec {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t in_height = 1;
  std::size_t in_width = 1;
  std::size_t kernel = 3;
  std::size_t pad_lo = 0;
  std::size_t pad_hi = 0;

  // Throws InvalidDimension when an extent is 0 or the output is empty.
  void validate() const;

  std::size_t out_height() const noexcept {
    return in_height + pad_lo + pad_hi - kernel + 1;
  }
  std::size_t out_width() const noexcept {
    return in_width + pad_lo + pad_hi - kernel + 1;
  }

  std::string to_string() const;

  bool operator==(const LayerSpec&) const = default;
};

struct OutputDims {
  std::size_t height;
  std::size_t width;
  bool operator==(const OutputDims&) const = default;
};

OutputDims output_dims(const LayerSpec& spec);

}  // namespace l3f
