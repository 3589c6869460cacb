#ifndef AQUA_PNG_IO_HPP
#define AQUA_PNG_IO_HPP

#include "aqua/image.hpp"

#include <stdexcept>
#include <string>

namespace aqua {

struct PngError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Read any 8/16-bit gray/palette/RGB(A) PNG as an RGB image in [0,1].
RgbImage read_image_png(const std::string& path);

/// Write an 8-bit RGB PNG; values are clamped and rounded. Output bytes are
/// deterministic for identical pixel data.
void write_image_png(const std::string& path, const RgbImage& img);

/// 16-bit grayscale PNGs carry transmission maps; quantization error stays
/// below 1/65535.
Plane read_gray16_png(const std::string& path);
void write_gray16_png(const std::string& path, const Plane& plane);

} // namespace aqua

#endif
