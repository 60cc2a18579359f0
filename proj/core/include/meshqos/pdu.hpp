#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "meshqos/errors.hpp"

namespace meshqos {

inline constexpr std::uint16_t kUnicastMax = 0x7FFF;
inline constexpr std::uint16_t kGroupBase = 0xC000;
inline constexpr std::uint8_t kTtlMax = 127;
inline constexpr std::size_t kHeaderOctets = 8;
inline constexpr std::size_t kMaxPayloadOctets = 11;

constexpr bool is_unicast_address(std::uint16_t a) {
  return a >= 0x0001 && a <= kUnicastMax;
}

constexpr bool is_group_address(std::uint16_t a) { return a >= kGroupBase; }

// Network-layer packet. The 24-bit sequence field of the stock network
// header is repurposed as a 16-bit sequence number plus an 8-bit priority
// class, so a pdu always carries its own priority. Priority 0 means "no
// explicit priority assigned"; relays fall back to the policy default for
// such packets.
struct NetworkPdu {
  std::uint16_t src = 0;                // originating element, unicast
  std::uint16_t dst = 0;                // unicast or group destination
  std::uint8_t ttl = 0;                 // remaining hops, 0..127
  std::uint16_t seq = 0;                // per-element sequence number
  std::uint8_t priority = 0;            // priority class, 0 = unprioritized
  std::vector<std::uint8_t> payload;    // unsegmented, at most 11 octets

  bool operator==(const NetworkPdu&) const = default;
};

// Packs (seq, priority) into the 24-bit on-air field, priority in the
// most significant octet. Throws CodecError when either value is out of
// range for its sub-field.
std::uint32_t pack_seq_priority(std::uint32_t seq, std::uint32_t priority);

// Exact inverse of pack_seq_priority. Throws CodecError when the field
// does not fit in 24 bits.
std::pair<std::uint16_t, std::uint8_t> unpack_seq_priority(std::uint32_t field);

// Throws CodecError naming the offending field when the pdu violates an
// address, ttl, or payload-size constraint.
void validate_pdu(const NetworkPdu& pdu);

// Serializes to the 8..19 octet wire image:
//   [ttl:1][priority|seq:3, big endian][src:2, big endian][dst:2, big endian][payload]
std::vector<std::uint8_t> encode_network_pdu(const NetworkPdu& pdu);

// Exact inverse of encode_network_pdu on valid encodings. Throws
// CodecError on truncated input, oversized input, a set ttl reserved bit,
// or an invalid decoded address.
NetworkPdu decode_network_pdu(std::span<const std::uint8_t> bytes);

}  // namespace meshqos
