#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "relight/image.hpp"

namespace relight {

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decode PNG or JPEG bytes (format sniffed from the signature) to a unit-range
/// image: channels mapped by v/255, alpha dropped, grayscale replicated to RGB.
/// Throws CodecError naming the failing stage on malformed input.
ImageF decode_srgb8(const std::uint8_t* bytes, std::size_t size);
ImageF decode_srgb8(const std::vector<std::uint8_t>& bytes);

/// Encode as 8-bit RGB PNG; channels quantized by round(v*255) clamped to [0, 255].
std::vector<std::uint8_t> encode_srgb8(const ImageF& img);

ImageF load_image(const std::string& path);
void save_png(const std::string& path, const ImageF& img);

/// 8-bit palette PNG from small nonnegative indices; used for winner-map dumps.
std::vector<std::uint8_t> encode_indexed_png(const std::vector<int>& indices, int width,
                                             int height);

}  // namespace relight
