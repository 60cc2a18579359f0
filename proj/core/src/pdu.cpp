#include "meshqos/pdu.hpp"

#include <string>

namespace meshqos {

namespace {

std::string hex4(std::uint16_t v) {
  static const char* digits = "0123456789ABCDEF";
  std::string s = "0x....";
  for (int i = 0; i < 4; ++i) s[5 - i] = digits[(v >> (4 * i)) & 0xF];
  return s;
}

}  // namespace

std::uint32_t pack_seq_priority(std::uint32_t seq, std::uint32_t priority) {
  if (seq > 0xFFFF) {
    throw CodecError("seq " + std::to_string(seq) + " does not fit in 16 bits");
  }
  if (priority > 0xFF) {
    throw CodecError("priority " + std::to_string(priority) +
                     " does not fit in 8 bits");
  }
  return (priority << 16) | seq;
}

std::pair<std::uint16_t, std::uint8_t> unpack_seq_priority(std::uint32_t field) {
  if (field > 0xFFFFFF) {
    throw CodecError("packed field " + std::to_string(field) +
                     " does not fit in 24 bits");
  }
  return {static_cast<std::uint16_t>(field & 0xFFFF),
          static_cast<std::uint8_t>(field >> 16)};
}

void validate_pdu(const NetworkPdu& pdu) {
  if (!is_unicast_address(pdu.src)) {
    throw CodecError("src " + hex4(pdu.src) + " is not a unicast address");
  }
  if (!is_unicast_address(pdu.dst) && !is_group_address(pdu.dst)) {
    throw CodecError("dst " + hex4(pdu.dst) +
                     " is neither unicast nor a group address");
  }
  if (pdu.ttl > kTtlMax) {
    throw CodecError("ttl " + std::to_string(pdu.ttl) + " exceeds 127");
  }
  if (pdu.payload.size() > kMaxPayloadOctets) {
    throw CodecError("payload of " + std::to_string(pdu.payload.size()) +
                     " octets exceeds the unsegmented limit of 11");
  }
}

std::vector<std::uint8_t> encode_network_pdu(const NetworkPdu& pdu) {
  validate_pdu(pdu);
  const std::uint32_t packed = pack_seq_priority(pdu.seq, pdu.priority);
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderOctets + pdu.payload.size());
  out.push_back(pdu.ttl);
  out.push_back(static_cast<std::uint8_t>(packed >> 16));
  out.push_back(static_cast<std::uint8_t>(packed >> 8));
  out.push_back(static_cast<std::uint8_t>(packed));
  out.push_back(static_cast<std::uint8_t>(pdu.src >> 8));
  out.push_back(static_cast<std::uint8_t>(pdu.src));
  out.push_back(static_cast<std::uint8_t>(pdu.dst >> 8));
  out.push_back(static_cast<std::uint8_t>(pdu.dst));
  out.insert(out.end(), pdu.payload.begin(), pdu.payload.end());
  return out;
}

NetworkPdu decode_network_pdu(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderOctets) {
    throw CodecError("pdu of " + std::to_string(bytes.size()) +
                     " octets is shorter than the 8 octet header");
  }
  if (bytes.size() > kHeaderOctets + kMaxPayloadOctets) {
    throw CodecError("pdu of " + std::to_string(bytes.size()) +
                     " octets exceeds the 19 octet maximum");
  }
  if (bytes[0] & 0x80) {
    throw CodecError("reserved high bit set in ttl octet");
  }
  NetworkPdu pdu;
  pdu.ttl = bytes[0];
  const std::uint32_t packed = (static_cast<std::uint32_t>(bytes[1]) << 16) |
                               (static_cast<std::uint32_t>(bytes[2]) << 8) |
                               bytes[3];
  const auto [seq, priority] = unpack_seq_priority(packed);
  pdu.seq = seq;
  pdu.priority = priority;
  pdu.src = static_cast<std::uint16_t>((bytes[4] << 8) | bytes[5]);
  pdu.dst = static_cast<std::uint16_t>((bytes[6] << 8) | bytes[7]);
  pdu.payload.assign(bytes.begin() + kHeaderOctets, bytes.end());
  validate_pdu(pdu);
  return pdu;
}

}  // namespace meshqos
