#pragma once

#include <string>
#include <string_view>

namespace symgauntlet {

/// Hex-encoded SHA-256 of the input bytes (OpenSSL EVP under the hood).
std::string sha256_hex(std::string_view bytes);

}  // namespace symgauntlet
