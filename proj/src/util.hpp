#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gap::detail {

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);  // throws IoError on bad input

}  // namespace gap::detail
