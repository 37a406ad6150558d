#ifndef TULIP_CIDR_H_
#define TULIP_CIDR_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tulip {

// An IPv4 or IPv6 network. IPv4 blocks are stored as IPv4-mapped IPv6 so
// that "::ffff:10.0.0.5" and "10.0.0.5" compare equal.
class CidrBlock {
 public:
  // Accepts "a.b.c.d/len", "x::y/len" or a bare address (full-length
  // prefix). Returns nullopt on anything else.
  static std::optional<CidrBlock> parse(std::string_view text);

  bool contains(std::string_view address) const;
  std::string to_string() const { return text_; }

 private:
  std::array<std::uint8_t, 16> network_{};
  int prefix_bits_ = 0;
  std::string text_;

  friend class CidrList;
};

// Parses an address into 16 bytes (IPv4 mapped); nullopt if invalid.
std::optional<std::array<std::uint8_t, 16>> parse_ip_address(std::string_view address);

class CidrList {
 public:
  CidrList() = default;
  explicit CidrList(std::vector<CidrBlock> blocks) : blocks_(std::move(blocks)) {}
  // Throws ConfigError on any unparsable entry.
  static CidrList parse(const std::vector<std::string>& entries);

  bool contains(std::string_view address) const;
  bool empty() const { return blocks_.empty(); }
  const std::vector<CidrBlock>& blocks() const { return blocks_; }

 private:
  std::vector<CidrBlock> blocks_;
};

}  // namespace tulip

#endif  // TULIP_CIDR_H_
