#pragma once

#include <string>
#include <string_view>

#include "brainloop/scene.hpp"

namespace brainloop {

// 8-bit RGB PNG, no filtering, zlib-compressed.
std::string encode_png(const RgbImage& img);

std::string base64_encode(std::string_view bytes);
// Throws DomainError on characters outside the standard alphabet.
std::string base64_decode(std::string_view text);

}  // namespace brainloop
