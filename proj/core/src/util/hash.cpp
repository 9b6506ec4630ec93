#include "osmorom/util/hash.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "osmorom/errors.hpp"

namespace osmorom::util {

std::string sha256_hex(const void* data, std::size_t size) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data, size, md.data(), &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 digest failed");
  std::string hex(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) std::snprintf(&hex[2 * i], 3, "%02x", md[i]);
  return hex;
}

}  // namespace osmorom::util
