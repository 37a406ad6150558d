#include "tulip/cidr.h"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

#include "tulip/error.h"

namespace tulip {

std::optional<std::array<std::uint8_t, 16>> parse_ip_address(std::string_view address) {
  const std::string text(address);
  std::array<std::uint8_t, 16> out{};
  in_addr v4{};
  if (inet_pton(AF_INET, text.c_str(), &v4) == 1) {
    out[10] = 0xff;
    out[11] = 0xff;
    std::memcpy(out.data() + 12, &v4, 4);
    return out;
  }
  in6_addr v6{};
  if (inet_pton(AF_INET6, text.c_str(), &v6) == 1) {
    std::memcpy(out.data(), &v6, 16);
    return out;
  }
  return std::nullopt;
}

std::optional<CidrBlock> CidrBlock::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view addr = text.substr(0, slash);
  const bool is_v4 = addr.find(':') == std::string_view::npos;
  auto bytes = parse_ip_address(addr);
  if (!bytes) return std::nullopt;

  int prefix = is_v4 ? 32 : 128;
  if (slash != std::string_view::npos) {
    const std::string_view len = text.substr(slash + 1);
    auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), prefix);
    if (len.empty() || ec != std::errc() || ptr != len.data() + len.size()) return std::nullopt;
    if (prefix < 0 || prefix > (is_v4 ? 32 : 128)) return std::nullopt;
  }
  CidrBlock block;
  block.prefix_bits_ = is_v4 ? prefix + 96 : prefix;
  block.network_ = *bytes;
  // Zero host bits so containment is a plain prefix compare.
  for (int bit = block.prefix_bits_; bit < 128; ++bit) {
    block.network_[bit / 8] &= static_cast<std::uint8_t>(~(0x80 >> (bit % 8)));
  }
  block.text_ = std::string(text);
  return block;
}

bool CidrBlock::contains(std::string_view address) const {
  auto bytes = parse_ip_address(address);
  if (!bytes) return false;
  const int full = prefix_bits_ / 8;
  for (int i = 0; i < full; ++i) {
    if ((*bytes)[i] != network_[i]) return false;
  }
  const int rem = prefix_bits_ % 8;
  if (rem == 0) return true;
  const auto mask = static_cast<std::uint8_t>(0xff << (8 - rem));
  return ((*bytes)[full] & mask) == network_[full];
}

CidrList CidrList::parse(const std::vector<std::string>& entries) {
  std::vector<CidrBlock> blocks;
  for (const auto& e : entries) {
    auto block = CidrBlock::parse(e);
    if (!block) throw ConfigError("invalid CIDR block '" + e + "'");
    blocks.push_back(std::move(*block));
  }
  return CidrList(std::move(blocks));
}

bool CidrList::contains(std::string_view address) const {
  for (const auto& b : blocks_) {
    if (b.contains(address)) return true;
  }
  return false;
}

}  // namespace tulip
