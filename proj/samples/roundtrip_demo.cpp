// Generates a key set, encrypts a short text, and decrypts it again.
#include <iostream>
#include <string>

#include "ire/ire.hpp"

int main() {
  ire::SystemEntropy entropy;
  const ire::KeySet key = ire::generate_keyset(entropy, std::uint64_t{1} << 16, ire::CombineRule::B);
  const ire::Cipher cipher(key);

  const std::string text = "attack at dawn ";
  const ire::Bytes plain(text.begin(), text.end());
  const ire::CipherEnvelope env = cipher.encrypt(plain, entropy);
  const ire::Bytes wire = ire::encode_envelope(env);

  std::cout << "plaintext:  " << plain.size() << " bytes\n"
            << "envelope:   " << wire.size() << " bytes, start offset " << env.start_offset << "\n";

  const ire::Bytes back = cipher.decrypt(ire::decode_envelope(wire));
  std::cout << "decrypted:  \"" << std::string(back.begin(), back.end()) << "\"\n";
  return back == plain ? 0 : 1;
}
