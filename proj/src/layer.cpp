#include "l3fuse/layer.hpp"

#include <sstream>

#include "l3fuse/errors.hpp"

namespace l3f {

void LayerSpec::validate() const {
  if (batch == 0 || in_channels == 0 || out_channels == 0 || in_height == 0 ||
      in_width == 0 || kernel == 0)
    throw InvalidDimension("layer extents must be positive: " + to_string());
  if (in_height + pad_lo + pad_hi < kernel || in_width + pad_lo + pad_hi < kernel)
    throw InvalidDimension("padded input smaller than kernel: " + to_string());
}

std::string LayerSpec::to_string() const {
  std::ostringstream os;
  os << "B=" << batch << " C=" << in_channels << " C'=" << out_channels
     << " D=" << in_height << " W=" << in_width << " K=" << kernel
     << " pad=" << pad_lo << "/" << pad_hi;
  return os.str();
}

OutputDims output_dims(const LayerSpec& spec) {
  spec.validate();
  return {spec.out_height(), spec.out_width()};
}

}  // namespace l3f
