#include <cstddef>
#include <cstdint>

#include "ire/keymat.hpp"

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size) {
  try {
    const auto k = ire::parse_keyset(ire::ByteView(data, size));
    if (ire::serialize_keyset(k).size() != size) __builtin_trap();
  } catch (const ire::Error&) {
  }
  return 0;
}
