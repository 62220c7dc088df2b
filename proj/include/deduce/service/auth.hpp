#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace deduce::service {

enum class HashCost { Interactive, Minimal };  // Minimal is for tests only

// Argon2id via libsodium. The result embeds its salt and parameters, so
// verification works whatever cost was used.
std::string hash_password(std::string_view password, HashCost cost = HashCost::Interactive);
bool verify_password(std::string_view hash, std::string_view password);

// Hex-encoded random bytes, for bearer tokens and record ids.
std::string random_hex(std::size_t bytes);

}  // namespace deduce::service
